#pragma once

#include <vector>

#include "agingmimo/frame.hpp"
#include "agingmimo/optimizer.hpp"
#include "agingmimo/scenario.hpp"
#include "agingmimo/types.hpp"

namespace agingmimo {

/// A scenario materialized at a concrete receive-array size: per-user
/// second-order statistics, the frame layout, and the generative ray models
/// kept around for Monte-Carlo synthesis.
struct BuiltSystem {
    ScenarioConfig cfg;
    int n_rx = 1;
    UplinkEnsemble ensemble;
    FrameSchedule frame;  // meaningful only when cfg.has_frame

    std::vector<bool> is_ray;
    std::vector<MobilityModel> mobility;   // ray users; default-constructed otherwise
    std::vector<ArrayGeometry> geometry;   // likewise
    std::vector<bool> normalize_channel;   // ray users: divide h by sqrt(L)
};

/// Materialize with the scenario's own n_rx.
BuiltSystem build_system(const ScenarioConfig& cfg);

/// Materialize with an overridden receive-array size (receive-side statistics
/// are regenerated at that size).  force_numeric routes every ray-model
/// second-order statistic through quadrature.
BuiltSystem build_system(const ScenarioConfig& cfg, int n_rx_override,
                         bool force_numeric = false);

/// Amplitude corresponding to a power gain in dB.
double amplitude_from_db(double gain_db);

/// Per-side spatial covariance with unit diagonal: rho on every off-diagonal.
MatC ones_mix_cov(int n, double rho);

/// Per-side spatial covariance from an equal-power mix of steering directions
/// on a uniform linear array (unit diagonal).
MatC steering_cov(int n, double spacing_wl, double orientation_rad,
                  const std::vector<double>& angles_rad);

/// The data slot a scenario's single-slot evaluations target: the configured
/// one (validated) or the last data slot of the frame when unset.
int evaluation_slot(const BuiltSystem& sys);

}  // namespace agingmimo
