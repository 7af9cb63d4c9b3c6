#pragma once

#include <vector>

#include "agingmimo/rng.hpp"
#include "agingmimo/types.hpp"

namespace agingmimo {

/// Pilot/data layout of one transmission frame.  The frame is divided into M
/// blocks of sizes q_1..q_M (each >= 2); block m opens with a pilot slot and
/// is followed by q_m - 1 data slots.  Slots are 1-based; boundaries[m] is the
/// first slot of block m+1 (boundaries[0] = 1), and the frame occupies slots
/// 1 .. boundaries[M] - 1.
struct FrameSchedule {
    std::vector<int> block_sizes;
    std::vector<int> boundaries;   // size M + 1
    std::vector<int> pilot_slots;  // size M, pilot_slots[m-1] = boundaries[m-1]
    std::vector<int> data_slots;   // ascending, size duration - M
    int duration = 0;              // boundaries[M] - 1

    int n_blocks() const { return static_cast<int>(block_sizes.size()); }
    int n_data() const { return static_cast<int>(data_slots.size()); }
    /// 1-based block index owning `slot` (1 <= slot <= duration).
    int block_of(int slot) const;
};

/// Build the schedule; throws std::invalid_argument on empty input or any
/// block size < 2.
FrameSchedule make_frame(const std::vector<int>& block_sizes);

/// Pilot times feeding the channel estimate at `slot`: the opening pilot of
/// the current block preceded by the previous block's pilot when one exists
/// (so one entry inside block 1, two entries afterwards).
std::vector<int> pilot_times_for_slot(const FrameSchedule& frame, int slot);

/// Per-slot transmit powers from per-frame budgets: the pilot budget is spread
/// evenly over the M pilot slots, the data budget over the data slots.
struct PowerSplit {
    double pilot = 0.0;
    double data = 0.0;
};
PowerSplit split_powers(double pilot_budget, double data_budget, const FrameSchedule& frame);

/// Mutually orthogonal pilot blocks: S_k is tau_p x n_tx holding sqrt(tau_p)
/// times disjoint identity columns, so S_k^T S_l = tau_p * I * delta_kl holds
/// exactly in integer arithmetic.  Requires tau_p >= n_users * n_tx.
std::vector<MatR> pilot_matrices(int n_users, int n_tx, int tau_p);

/// Received pilot block (n_rx x tau_p): sum_k gain_k * sqrt(pilot_power) *
/// H_k S_k^T plus white CN(0, noise_var) noise.
MatC synthesize_pilot_rx(const std::vector<MatC>& channels, const std::vector<double>& gains,
                         const std::vector<MatR>& pilots, double pilot_power,
                         double noise_var, Rng& rng);

/// Matched-filter one user's pilot out of the received block and rescale:
/// vec(Y S_k) / (gain_k * sqrt(pilot_power) * tau_p).  With orthogonal pilots
/// this equals the user's column-stacked channel plus white noise of variance
/// noise_var / (gain_k^2 * pilot_power * tau_p) per entry.
VecC despread_pilot(const MatC& pilot_rx, const MatR& pilot, double gain,
                    double pilot_power);

/// Received data-slot vector: sum_k gain_k * sqrt(data_power_k) * H_k w_k s_k
/// plus CN(0, noise_var) noise.
VecC synthesize_data_rx(const std::vector<MatC>& channels, const std::vector<double>& gains,
                        const std::vector<VecC>& beamformers,
                        const std::vector<double>& data_powers,
                        const std::vector<cxd>& symbols, double noise_var, Rng& rng);

}  // namespace agingmimo
