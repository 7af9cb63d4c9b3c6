#include "agingmimo/estimation.hpp"

#include <stdexcept>

#include "agingmimo/linalg.hpp"

namespace agingmimo {

MatC LmmseEstimator::estimate_cov() const { return hermitize(weights * cross.adjoint()); }

LmmseEstimator make_estimator(const SecondOrderStats& stats,
                              const std::vector<int>& pilot_times, int t,
                              double regularizer) {
    if (pilot_times.empty()) throw std::invalid_argument("make_estimator: no pilot times");
    const Eigen::Index n = static_cast<Eigen::Index>(stats.n_tx) * stats.n_rx;
    const Eigen::Index np = static_cast<Eigen::Index>(pilot_times.size());

    LmmseEstimator est;
    est.pilot_times = pilot_times;
    est.regularizer = regularizer;
    est.cross.resize(n, np * n);
    est.gram.resize(np * n, np * n);
    for (Eigen::Index a = 0; a < np; ++a) {
        est.cross.block(0, a * n, n, n) = stats.cross_cov(t, pilot_times[a]);
        for (Eigen::Index b = 0; b < np; ++b)
            est.gram.block(a * n, b * n, n, n) =
                stats.cross_cov(pilot_times[a], pilot_times[b]);
    }
    est.gram += regularizer * MatC::Identity(np * n, np * n);
    est.gram = hermitize(est.gram);
    est.weights = solve_hpsd(est.gram, est.cross.adjoint()).adjoint();
    return est;
}

MatC error_cov(const SecondOrderStats& stats, const LmmseEstimator& est, int t) {
    return hermitize(stats.cov(t) - est.estimate_cov());
}

}  // namespace agingmimo
