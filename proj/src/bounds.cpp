#include "agingmimo/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "agingmimo/combining.hpp"
#include "agingmimo/linalg.hpp"
#include "agingmimo/rng.hpp"

namespace agingmimo {

namespace {

struct TrialRecord {
    double se = 0.0;              // log2(1 + sinr)
    double sinr = 0.0;
    double inv_sinr_floor = 0.0;  // 1 / (true-channel lower-bound SINR)
    double power_sum = 0.0;       // sum_k c_k^2 |g^H u_k|^2 over true channels
    double gnorm2 = 0.0;
    cxd target_gain{0.0, 0.0};    // g^H u_1
};

double mean_of(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s / static_cast<double>(hi - lo);
}

/// Batch-means standard error: evaluate the estimator on each of n_blocks
/// contiguous blocks and take std / sqrt(n_blocks).
template <typename F>
std::pair<double, double> batch_means(std::size_t n, const F& block_value) {
    const std::size_t n_blocks = std::min<std::size_t>(10, n);
    std::vector<double> vals(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const std::size_t lo = b * n / n_blocks;
        const std::size_t hi = (b + 1) * n / n_blocks;
        vals[b] = block_value(lo, hi);
    }
    const double overall = block_value(0, n);
    if (n_blocks < 2) return {overall, 0.0};
    double m = 0.0;
    for (double v : vals) m += v;
    m /= static_cast<double>(n_blocks);
    double s2 = 0.0;
    for (double v : vals) s2 += (v - m) * (v - m);
    s2 /= static_cast<double>(n_blocks - 1);
    return {overall, std::sqrt(s2 / static_cast<double>(n_blocks))};
}

}  // namespace

std::vector<BoundEstimate> bounds_compare(const std::vector<DetEquivUser>& users,
                                          double noise_var, int trials,
                                          std::uint64_t seed, int n_threads) {
    if (users.empty()) throw std::invalid_argument("bounds_compare: no users");
    if (trials < 1) throw std::invalid_argument("bounds_compare: need at least one trial");
    const int n_users = static_cast<int>(users.size());
    const Eigen::Index n_tx = users[0].beamformer.size();
    const Eigen::Index n_rx = users[0].est_cov.rows() / n_tx;

    // Per-user square-root factors for the estimate and error components.
    std::vector<MatC> est_factor, err_factor;
    std::vector<double> c2(n_users);
    for (int k = 0; k < n_users; ++k) {
        est_factor.push_back(psd_factor(users[k].est_cov));
        err_factor.push_back(psd_factor(users[k].err_cov));
        c2[k] = users[k].gain * users[k].gain * users[k].data_power;
    }

    std::vector<TrialRecord> rec(static_cast<std::size_t>(trials));
    auto run_range = [&](int lo, int hi) {
        const Eigen::Index n = n_tx * n_rx;
        for (int i = lo; i < hi; ++i) {
            Rng rng(derive_seed(seed, "bounds-trial", static_cast<std::uint64_t>(i)));
            std::vector<UserSignal> sig(n_users);
            std::vector<VecC> u_true(n_users);
            for (int k = 0; k < n_users; ++k) {
                const VecC hhat = est_factor[k] * rng.cgaussian_vec(n);
                const VecC h = hhat + err_factor[k] * rng.cgaussian_vec(n);
                sig[k].gain = users[k].gain;
                sig[k].data_power = users[k].data_power;
                sig[k].beamformer = users[k].beamformer;
                sig[k].channel_est = hhat;
                sig[k].error_cov = users[k].err_cov;
                u_true[k] = unvec(h, static_cast<int>(n_rx), static_cast<int>(n_tx)) *
                            users[k].beamformer;
            }
            const CombinerResult cr = mmse_combine(sig, noise_var);

            TrialRecord& t = rec[static_cast<std::size_t>(i)];
            t.sinr = cr.sinr;
            t.se = se_bits(cr.sinr);
            t.gnorm2 = cr.combiner.squaredNorm();
            t.target_gain = cr.combiner.dot(u_true[0]);
            for (int k = 0; k < n_users; ++k)
                t.power_sum += c2[k] * std::norm(cr.combiner.dot(u_true[k]));

            // True-channel lower-bound SINR for the target: diagonal of the
            // inverse interference-aware Gram.
            MatC h_tot(n_rx, n_users);
            for (int k = 0; k < n_users; ++k) h_tot.col(k) = std::sqrt(c2[k]) * u_true[k];
            const MatC gram = MatC::Identity(n_users, n_users) +
                              (h_tot.adjoint() * h_tot) / noise_var;
            const VecC x = solve_hpsd(gram, VecC::Unit(n_users, 0));
            const double floor_sinr = 1.0 / x[0].real() - 1.0;
            t.inv_sinr_floor = 1.0 / floor_sinr;
        }
    };

    int workers = n_threads > 0 ? n_threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, trials));
    if (workers == 1) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            const int lo = static_cast<int>(static_cast<long long>(trials) * w / workers);
            const int hi =
                static_cast<int>(static_cast<long long>(trials) * (w + 1) / workers);
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    // Column views for the block estimators (sequential reductions keep the
    // results independent of the thread count).
    const std::size_t n = rec.size();
    std::vector<double> se(n), sinr(n), invfloor(n), psum(n), gn2(n), g1re(n), g1im(n);
    for (std::size_t i = 0; i < n; ++i) {
        se[i] = rec[i].se;
        sinr[i] = rec[i].sinr;
        invfloor[i] = rec[i].inv_sinr_floor;
        psum[i] = rec[i].power_sum;
        gn2[i] = rec[i].gnorm2;
        g1re[i] = rec[i].target_gain.real();
        g1im[i] = rec[i].target_gain.imag();
    }

    auto mc_block = [&](std::size_t lo, std::size_t hi) { return mean_of(se, lo, hi); };
    auto jensen_block = [&](std::size_t lo, std::size_t hi) {
        return std::log2(1.0 + mean_of(sinr, lo, hi));
    };
    auto ngo_block = [&](std::size_t lo, std::size_t hi) {
        return std::log2(1.0 + 1.0 / mean_of(invfloor, lo, hi));
    };
    auto utf_block = [&](std::size_t lo, std::size_t hi) {
        const cxd mean_gain(mean_of(g1re, lo, hi), mean_of(g1im, lo, hi));
        const double num = c2[0] * std::norm(mean_gain);
        const double den =
            mean_of(psum, lo, hi) - num + noise_var * mean_of(gn2, lo, hi);
        return std::log2(1.0 + num / den);
    };

    std::vector<BoundEstimate> out;
    auto push = [&out](const char* name, std::pair<double, double> vs) {
        out.push_back({name, vs.first, vs.second});
    };
    push("mc", batch_means(n, mc_block));
    push("jensen", batch_means(n, jensen_block));
    push("ngo", batch_means(n, ngo_block));
    push("utf", batch_means(n, utf_block));

    const FixedPointResult fp = fixed_point(users, noise_var);
    const SeDeterministic sd = se_deterministic(users, noise_var, fp);
    out.push_back({"hoydis", std::log2(1.0 + sd.mean_sinr), 0.0});
    out.push_back({"se_det", sd.se, 0.0});
    return out;
}

}  // namespace agingmimo
