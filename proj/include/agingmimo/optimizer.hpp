#pragma once

#include <vector>

#include "agingmimo/channel.hpp"
#include "agingmimo/detequiv.hpp"
#include "agingmimo/frame.hpp"
#include "agingmimo/types.hpp"

namespace agingmimo {

/// Statistical description of the whole uplink, independent of the frame
/// layout and power split.  users[0] is the target whose rate is optimized.
struct UplinkEnsemble {
    std::vector<SecondOrderStats> stats;  // one per user, equal n_tx / n_rx
    std::vector<double> gains;            // large-scale amplitudes
    double pilot_noise_var = 1.0;
    double data_noise_var = 1.0;
    int tau_p = 1;  // pilot sequence length

    int n_users() const { return static_cast<int>(stats.size()); }
    int n_tx() const { return stats.empty() ? 0 : stats[0].n_tx; }
    int n_rx() const { return stats.empty() ? 0 : stats[0].n_rx; }
};

enum class BeamformerMode { optimal, isotropic };

struct OptimizerConfig {
    int q_max = 4;  // upper bound on the frame duration
    int m_max = 2;  // maximum number of pilot blocks
    double total_power = 1.0;
    int ao_rounds = 2;
    BeamformerMode beamformer_mode = BeamformerMode::optimal;
    int max_power_steps = 20;
    int max_backtracks = 20;
    double grad_rel_step = 1e-4;
    /// Use the full channel covariance (instead of the estimate covariance)
    /// inside the variance term of the rate expansion.
    bool variance_from_true_cov = false;
};

/// Candidate layout: one pilot block per entry, entry = block size (>= 2).
struct PlanSpec {
    std::vector<int> sizes;
    int m() const { return static_cast<int>(sizes.size()); }
    const std::vector<int>& block_sizes() const { return sizes; }
};

/// All candidate plans for the given bounds: for each m in 1..m_max, every
/// combination of m block sizes drawn independently from 2..ceil(q_max / m),
/// ordered by (m, lexicographic sizes).  The count is
/// sum_m (ceil(q_max/m) - 1)^m, dropping m whose size range is empty.
std::vector<PlanSpec> enumerate_plans(int q_max, int m_max);

/// Euclidean projection of v onto { x >= 0, sum(x) <= budget }.
VecR project_power(const VecR& v, double budget);

/// Per-data-slot per-user second-order statistics induced by a frame layout
/// and a per-slot pilot power (entries are aligned with frame.data_slots).
struct SlotStats {
    int slot = 0;
    std::vector<MatC> est_cov;
    std::vector<MatC> err_cov;
    std::vector<MatC> cov;
};
std::vector<SlotStats> slot_statistics(const UplinkEnsemble& ens, const FrameSchedule& frame,
                                       double pilot_power);

/// Per-user state for one data slot.  When `beamformers` is null every user
/// transmits isotropically (unit-trace identity shape).
std::vector<DetEquivUser> slot_users(const UplinkEnsemble& ens, const SlotStats& ss,
                                     double data_power,
                                     const std::vector<VecC>* beamformers);

/// One pass of the per-user beamformer rule for a single data slot: each user
/// becomes the target of its own fixed point (keeping everyone's current
/// directions, isotropic when `current` is null) and points along the top
/// eigenvector of its contracted estimate covariance.
std::vector<VecC> slot_beamformers(const UplinkEnsemble& ens, const SlotStats& ss,
                                   double data_power,
                                   const std::vector<VecC>* current = nullptr);

/// Deterministic average spectral efficiency of the target over the frame:
/// the rate expansion summed over data slots, divided by the frame duration
/// (pilot slots contribute zero rate but full duration).  `beamformers` holds
/// one unit-norm vector per user per data slot; pass empty to use isotropic
/// transmit shapes for everyone.
double dase(const UplinkEnsemble& ens, const FrameSchedule& frame, double pilot_budget,
            double data_budget, const std::vector<std::vector<VecC>>& beamformers,
            bool variance_from_true_cov = false);

/// One alternating-optimization evaluation of a plan: beamformer updates via
/// each user's own fixed point followed by projected-gradient power ascent,
/// repeated ao_rounds times from an even power split.  The best-seen iterate
/// (budgets + beamformers) is kept, so dase_value is non-decreasing across
/// rounds and always reproducible from the stored fields.
struct PlanResult {
    PlanSpec plan;
    double dase_value = 0.0;
    double pilot_budget = 0.0;
    double data_budget = 0.0;
    /// One unit vector per user per data slot; empty when transmission was
    /// isotropic (shape I/n_tx).
    std::vector<std::vector<VecC>> beamformers;
    bool best = false;
};
PlanResult optimize_plan(const UplinkEnsemble& ens, const PlanSpec& plan,
                         const OptimizerConfig& cfg);

/// Full search: optimize every candidate plan and mark the winner.  Plans
/// within 1e-9 of the best DASE tie-break toward fewer blocks, then
/// lexicographically smaller sizes.
struct OptimizeResult {
    std::vector<PlanResult> plans;
    int best_index = -1;
};
OptimizeResult opt_resource(const UplinkEnsemble& ens, const OptimizerConfig& cfg);

}  // namespace agingmimo
