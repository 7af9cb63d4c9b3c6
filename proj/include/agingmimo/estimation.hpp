#pragma once

#include <vector>

#include "agingmimo/channel.hpp"
#include "agingmimo/types.hpp"

namespace agingmimo {

/// Per-entry noise variance of a matched-filtered pilot observation.
inline double pilot_regularizer(double noise_var, double gain, double pilot_power,
                                int tau_p) {
    return noise_var / (gain * gain * pilot_power * tau_p);
}

/// Linear MMSE interpolator/predictor of h(t) from the stacked pilot
/// observations z = [z(d_1); ...; z(d_P)], z(d) = h(d) + e(d) with
/// e(d) ~ CN(0, regularizer * I) independent across pilots.
struct LmmseEstimator {
    std::vector<int> pilot_times;
    double regularizer = 0.0;
    MatC cross;    // E[h(t) z^H], N x PN
    MatC gram;     // E[z z^H] including the regularizer, PN x PN
    MatC weights;  // cross * gram^{-1}

    VecC estimate(const VecC& stacked_pilot_obs) const { return weights * stacked_pilot_obs; }
    /// Covariance of the estimate itself (equals E[h hhat^H] by orthogonality).
    MatC estimate_cov() const;
};

LmmseEstimator make_estimator(const SecondOrderStats& stats,
                              const std::vector<int>& pilot_times, int t,
                              double regularizer);

/// Estimation-error covariance Q(t) = cov(t) - estimate_cov().
MatC error_cov(const SecondOrderStats& stats, const LmmseEstimator& est, int t);

}  // namespace agingmimo
