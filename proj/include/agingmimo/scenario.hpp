#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "agingmimo/angular.hpp"
#include "agingmimo/channel.hpp"

namespace agingmimo {

/// Scenario file or section is malformed / fails validation.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Reading or writing a file failed.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// A numerical routine failed to produce a usable result.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpectrumConfig {
    SpectrumKind kind = SpectrumKind::uniform;
    double center_rad = 0.0;
    double concentration = 1.0;
    AngularSpectrum make() const;
};

/// Geometric ray-ensemble channel.
struct RayChannelConfig {
    double speed_mps = 0.0;
    double carrier_hz = 299792458.0;  // wavelength 1 m by default
    double symbol_rate_hz = 1.0;
    int scatterers = 1;
    AnglePersistence persistence = AnglePersistence::persistent;
    SpectrumConfig aod, aoa;
    bool normalize = true;
    double tx_spacing_wavelengths = 0.5;
    double rx_spacing_wavelengths = 0.5;
    double tx_orientation_rad = 0.0;
    double rx_orientation_rad = 0.0;
};

enum class SpatialKind { iid, ones_mix, steering };
enum class TemporalKind { constant, jakes };

/// Gaussian channel with a separable space/time structure.
struct GaussianChannelConfig {
    SpatialKind spatial = SpatialKind::iid;
    double tx_rho = 0.0;  // ones_mix: per-side off-diagonal correlation
    double rx_rho = 0.0;
    std::vector<double> tx_angles_rad;  // steering: ray directions per side
    std::vector<double> rx_angles_rad;
    double tx_spacing_wavelengths = 0.5;
    double rx_spacing_wavelengths = 0.5;
    double tx_orientation_rad = 0.0;
    double rx_orientation_rad = 0.0;
    TemporalKind temporal = TemporalKind::constant;
    double doppler_hz = 0.0;
    double symbol_rate_hz = 1.0;
};

struct UserConfig {
    double gain_db = 0.0;
    bool is_ray = true;
    RayChannelConfig ray;
    GaussianChannelConfig gaussian;
};

struct CorrelateConfig {
    int user = 0;
    int reference_t = 1;
    int t_start = 1;
    int t_end = 8;
    bool numeric = false;  // force quadrature even when closed forms apply
};

struct EvaluationConfig {
    int trials = 1000;
    std::vector<int> n_rx_sweep;  // empty: just the system n_rx
    int slot = -1;                // data slot to evaluate; -1: last data slot
};

struct OptimizerSection {
    int q_max = 4;
    int m_max = 2;
    double total_power = 1.0;
    int ao_rounds = 2;
};

struct ScenarioConfig {
    std::string name;
    std::uint64_t seed = 0;
    int n_tx = 1;
    int n_rx = 1;
    int tau_p = 1;
    double pilot_noise_var = 1.0;
    double data_noise_var = 1.0;
    std::vector<UserConfig> users;

    bool has_frame = false;
    std::vector<int> frame_blocks;

    bool has_powers = false;
    double pilot_budget = 1.0;
    double data_budget = 1.0;

    std::string beamformer_mode = "optimal";  // or "isotropic"
    bool variance_from_true_cov = false;

    bool has_correlate = false;
    CorrelateConfig correlate;

    EvaluationConfig evaluation;

    bool has_optimizer = false;
    OptimizerSection optimizer;
};

/// Reads and validates a scenario file.  Unknown keys anywhere in the
/// document are rejected.  Throws IoError / ScenarioError.
ScenarioConfig parse_scenario_file(const std::string& path);

/// Same, from an in-memory JSON string (origin names the source in errors).
ScenarioConfig parse_scenario_json(const std::string& text, const std::string& origin);

/// Whole-file read; throws IoError.
std::string read_file(const std::string& path);

/// FNV-1a 64-bit hash (used to fingerprint scenario files in run manifests).
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace agingmimo
