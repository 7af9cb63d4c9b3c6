#include "agingmimo/frame.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agingmimo {

int FrameSchedule::block_of(int slot) const {
    if (slot < 1 || slot > duration) throw std::out_of_range("block_of: slot outside frame");
    // boundaries is ascending; block m covers [boundaries[m-1], boundaries[m]).
    auto it = std::upper_bound(boundaries.begin(), boundaries.end(), slot);
    return static_cast<int>(it - boundaries.begin());
}

FrameSchedule make_frame(const std::vector<int>& block_sizes) {
    if (block_sizes.empty()) throw std::invalid_argument("make_frame: no blocks");
    for (int q : block_sizes)
        if (q < 2) throw std::invalid_argument("make_frame: block size below 2");

    FrameSchedule f;
    f.block_sizes = block_sizes;
    f.boundaries.reserve(block_sizes.size() + 1);
    f.boundaries.push_back(1);
    for (int q : block_sizes) f.boundaries.push_back(f.boundaries.back() + q);
    f.duration = f.boundaries.back() - 1;

    f.pilot_slots.assign(f.boundaries.begin(), f.boundaries.end() - 1);
    f.data_slots.reserve(f.duration - f.n_blocks());
    for (int t = 1; t <= f.duration; ++t)
        if (!std::binary_search(f.pilot_slots.begin(), f.pilot_slots.end(), t))
            f.data_slots.push_back(t);
    return f;
}

std::vector<int> pilot_times_for_slot(const FrameSchedule& frame, int slot) {
    const int m = frame.block_of(slot);
    if (m == 1) return {frame.pilot_slots[0]};
    return {frame.pilot_slots[m - 2], frame.pilot_slots[m - 1]};
}

PowerSplit split_powers(double pilot_budget, double data_budget, const FrameSchedule& frame) {
    if (pilot_budget < 0 || data_budget < 0)
        throw std::invalid_argument("split_powers: negative budget");
    PowerSplit s;
    s.pilot = pilot_budget / frame.n_blocks();
    s.data = data_budget / frame.n_data();
    return s;
}

std::vector<MatR> pilot_matrices(int n_users, int n_tx, int tau_p) {
    if (n_users < 1 || n_tx < 1) throw std::invalid_argument("pilot_matrices: empty system");
    if (tau_p < n_users * n_tx)
        throw std::invalid_argument("pilot_matrices: pilot length too short for orthogonality");
    const double scale = std::sqrt(static_cast<double>(tau_p));
    std::vector<MatR> pilots;
    pilots.reserve(n_users);
    for (int k = 0; k < n_users; ++k) {
        MatR s = MatR::Zero(tau_p, n_tx);
        for (int j = 0; j < n_tx; ++j) s(k * n_tx + j, j) = scale;
        pilots.push_back(std::move(s));
    }
    return pilots;
}

MatC synthesize_pilot_rx(const std::vector<MatC>& channels, const std::vector<double>& gains,
                         const std::vector<MatR>& pilots, double pilot_power,
                         double noise_var, Rng& rng) {
    if (channels.empty() || channels.size() != gains.size() || channels.size() != pilots.size())
        throw std::invalid_argument("synthesize_pilot_rx: per-user input size mismatch");
    const Eigen::Index n_rx = channels[0].rows();
    const Eigen::Index tau_p = pilots[0].rows();
    MatC y = MatC::Zero(n_rx, tau_p);
    for (std::size_t k = 0; k < channels.size(); ++k)
        y += gains[k] * std::sqrt(pilot_power) * channels[k] *
             pilots[k].transpose().cast<cxd>();
    for (Eigen::Index j = 0; j < tau_p; ++j)
        for (Eigen::Index i = 0; i < n_rx; ++i) y(i, j) += rng.cgaussian(noise_var);
    return y;
}

VecC despread_pilot(const MatC& pilot_rx, const MatR& pilot, double gain,
                    double pilot_power) {
    const double tau_p = static_cast<double>(pilot.rows());
    const MatC filtered = pilot_rx * pilot.cast<cxd>() / (gain * std::sqrt(pilot_power) * tau_p);
    return Eigen::Map<const VecC>(filtered.data(), filtered.size());
}

VecC synthesize_data_rx(const std::vector<MatC>& channels, const std::vector<double>& gains,
                        const std::vector<VecC>& beamformers,
                        const std::vector<double>& data_powers,
                        const std::vector<cxd>& symbols, double noise_var, Rng& rng) {
    if (channels.empty() || channels.size() != gains.size() ||
        channels.size() != beamformers.size() || channels.size() != data_powers.size() ||
        channels.size() != symbols.size())
        throw std::invalid_argument("synthesize_data_rx: per-user input size mismatch");
    const Eigen::Index n_rx = channels[0].rows();
    VecC y = VecC::Zero(n_rx);
    for (std::size_t k = 0; k < channels.size(); ++k)
        y += gains[k] * std::sqrt(data_powers[k]) * (channels[k] * beamformers[k]) * symbols[k];
    for (Eigen::Index i = 0; i < n_rx; ++i) y[i] += rng.cgaussian(noise_var);
    return y;
}

}  // namespace agingmimo
