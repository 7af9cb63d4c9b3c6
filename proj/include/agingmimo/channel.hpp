#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>

#include "agingmimo/angular.hpp"
#include "agingmimo/quadrature.hpp"
#include "agingmimo/rng.hpp"
#include "agingmimo/types.hpp"

namespace agingmimo {

/// Uniform linear arrays at both ends.  Spacings are in carrier wavelengths.
/// `tx_orientation_rad` doubles as the user's direction of motion (the model
/// ties the two together); `rx_orientation_rad` is the base-station array
/// orientation.
struct ArrayGeometry {
    int n_tx = 1;
    int n_rx = 1;
    double tx_spacing_wl = 0.5;
    double rx_spacing_wl = 0.5;
    double tx_orientation_rad = 0.0;
    double rx_orientation_rad = 0.0;
};

enum class ArraySide { transmit, receive };

/// ULA steering vector: element s carries phase 2*pi*d*s*cos(orientation - angle),
/// element 0 is 1.
VecC steering_vector(const ArrayGeometry& geo, double angle_rad, ArraySide side);

enum class AnglePersistence { persistent, per_slot };

/// Scatterer/mobility description for one user.  Constant speed and scatterer
/// count unless the optional time functions are set.  The per-ray Doppler is
/// speed * cos(tx_orientation - aod) / wavelength; slot t maps to physical
/// time t * slot_duration_s.
struct MobilityModel {
    double speed_mps = 0.0;
    int scatterers = 1;
    std::function<double(int)> speed_fn;     // overrides speed_mps when set
    std::function<int(int)> scatterers_fn;   // overrides scatterers when set
    AngularSpectrum aoa = AngularSpectrum::make_uniform();
    AngularSpectrum aod = AngularSpectrum::make_uniform();
    AnglePersistence persistence = AnglePersistence::persistent;
    double wavelength_m = 1.0;
    double slot_duration_s = 1.0;

    double speed(int t) const { return speed_fn ? speed_fn(t) : speed_mps; }
    int scatterer_count(int t) const { return scatterers_fn ? scatterers_fn(t) : scatterers; }
    bool stationary() const {
        return !speed_fn && !scatterers_fn && persistence == AnglePersistence::persistent;
    }
};

/// One draw of the scatterer ensemble.  Phases and angles are derived lazily
/// from the seed, so ray i keeps its identity (phase, angle streams) across
/// every slot it is evaluated at, and across different scatterer counts.
struct RayRealization {
    std::uint64_t seed = 0;

    double phase(int ray) const;
    /// (aod, aoa) of `ray` at slot t; constant in t for persistent models.
    std::pair<double, double> angles(const MobilityModel& mob, int ray, int t) const;
};

RayRealization draw_rays(Rng& rng);

/// Channel vector at slot t in the canonical column-stacked layout
/// (vec of the n_rx x n_tx matrix; receive index fastest).  Unnormalized:
/// the sum over L(t) unit-power rays, so E[h h^H] scales with L(t).
VecC sample_channel(const RayRealization& rays, const MobilityModel& mob,
                    const ArrayGeometry& geo, int t);

/// Convenience form drawing a fresh realization from `rng`.
std::pair<VecC, RayRealization> sample_channel(const MobilityModel& mob,
                                               const ArrayGeometry& geo, int t, Rng& rng);

struct CorrelationOptions {
    double quad_abs_tol = 1e-8;
    int quad_max_evals = 1 << 14;
    bool force_numeric = false;  // skip closed forms even when they apply
};

/// Transmit-side factor of E[h(t1) h(t2)^H]: n_tx x n_tx, entries are the
/// angular expectations of the joint Doppler/steering phases.
MatC tx_cov_factor(const MobilityModel& mob, const ArrayGeometry& geo, int t1, int t2,
                   const CorrelationOptions& opts = {});
/// Receive-side factor: n_rx x n_rx.
MatC rx_cov_factor(const MobilityModel& mob, const ArrayGeometry& geo, int t1, int t2,
                   const CorrelationOptions& opts = {});

/// Model covariance E[h(t1) h(t2)^H] = min(L(t1), L(t2)) * kron(T, R) in the
/// canonical layout (transmit factor outer).
MatC covariance(const MobilityModel& mob, const ArrayGeometry& geo, int t1, int t2,
                const CorrelationOptions& opts = {});

/// Whitened correlation: scaled by min(L1,L2)/sqrt(L1 L2) and normalized by
/// the single-time factors on both sides.
MatC correlation(const MobilityModel& mob, const ArrayGeometry& geo, int t1, int t2,
                 const CorrelationOptions& opts = {});

/// Quadrature-only evaluation (no closed-form dispatch); otherwise identical
/// to correlation().
MatC correlation_numeric(const MobilityModel& mob, const ArrayGeometry& geo, int t1,
                         int t2, const CorrelationOptions& opts = {});

/// Stationary closed forms for the lag-tau correlation.  The receive side
/// whitens to the identity, so the result is kron(T_whitened(tau), I_nrx).
MatC correlation_vonmises(const ArrayGeometry& geo, double aod_center_rad,
                          double aod_concentration, double speed_mps, double wavelength_m,
                          double slot_duration_s, int tau);
MatC correlation_uniform(const ArrayGeometry& geo, double speed_mps, double wavelength_m,
                         double slot_duration_s, int tau);

/// Second-order channel description consumed by estimation and the
/// deterministic-equivalent machinery.  All three members are total functions
/// of slot indices; implementations memoize internally.
struct SecondOrderStats {
    int n_tx = 1;
    int n_rx = 1;
    std::function<MatC(int)> cov;                // E[h(t) h(t)^H]
    std::function<MatC(int, int)> cross_cov;     // E[h(t1) h(t2)^H]
    std::function<MatC(int, int)> corr;
};

/// Stats backed by the ray model.  `normalize` rescales h(t) by 1/sqrt(L(t))
/// so per-entry variance is 1 for unit-modulus rays.
SecondOrderStats ray_stats(const MobilityModel& mob, const ArrayGeometry& geo,
                           const CorrelationOptions& opts = {}, bool normalize = false);

/// Separable Gaussian-model stats: E[h(t1) h(t2)^H] = rho(t2 - t1) * spatial.
/// `temporal` must be even with temporal(0) = 1.
SecondOrderStats separable_stats(MatC spatial_cov, std::function<double(int)> temporal,
                                 int n_tx, int n_rx);

}  // namespace agingmimo
