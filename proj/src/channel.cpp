#include "agingmimo/channel.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "agingmimo/linalg.hpp"
#include "agingmimo/special.hpp"

namespace agingmimo {

namespace {

constexpr cxd kJ{0.0, 1.0};

double wavenumber(double spacing_wl) { return 2.0 * pi * spacing_wl; }

/// E[e^{j b cos(orientation - theta)}] for theta ~ spectrum, closed form.
/// Only valid for uniform and von Mises spectra.
cxd closed_single_expectation(const AngularSpectrum& sp, double orientation, double b) {
    if (sp.kind() == SpectrumKind::uniform) return cxd(bessel_j0(b), 0.0);
    const double kappa = sp.concentration();
    const double delta = orientation - sp.center();
    const cxd arg(kappa * kappa - b * b, 2.0 * kappa * b * std::cos(delta));
    return bessel_i0_ratio(std::sqrt(arg), kappa);
}

std::pair<double, double> integration_domain(const AngularSpectrum& sp) {
    if (sp.kind() == SpectrumKind::von_mises) return {sp.center() - pi, sp.center() + pi};
    return {-pi, pi};
}

cxd numeric_single_expectation(const AngularSpectrum& sp, double orientation, double b,
                               const CorrelationOptions& opts) {
    auto [lo, hi] = integration_domain(sp);
    auto f = [&](double theta) {
        return std::exp(kJ * b * std::cos(orientation - theta)) * sp.pdf(theta);
    };
    QuadratureResult r = integrate(f, lo, hi, opts.quad_abs_tol, opts.quad_max_evals);
    return r.value;
}

cxd single_expectation(const AngularSpectrum& sp, double orientation, double b,
                       const CorrelationOptions& opts) {
    if (!opts.force_numeric && sp.kind() != SpectrumKind::custom)
        return closed_single_expectation(sp, orientation, b);
    return numeric_single_expectation(sp, orientation, b, opts);
}

/// E[e^{j(b1 cos(o - theta1) - b2 cos(o - theta2))}].  When the two angles are
/// the same draw this collapses to a single expectation at b1 - b2; when they
/// are independent it factors into two single expectations.
cxd pair_expectation(const AngularSpectrum& sp, double orientation, double b1, double b2,
                     bool same_draw, const CorrelationOptions& opts) {
    if (same_draw) return single_expectation(sp, orientation, b1 - b2, opts);
    return single_expectation(sp, orientation, b1, opts) *
           single_expectation(sp, orientation, -b2, opts);
}

/// Scalar multiplying cos(tx_orientation - aod) in the phase of transmit
/// element q at slot t: Doppler accumulation plus array offset.
double tx_phase_scale(const MobilityModel& mob, const ArrayGeometry& geo, int t, int q) {
    const double doppler_cycles =
        mob.speed(t) * static_cast<double>(t) * mob.slot_duration_s / mob.wavelength_m;
    return 2.0 * pi * (doppler_cycles + geo.tx_spacing_wl * q);
}

std::uint64_t pack_ray_slot(int ray, int t) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ray)) << 32) ^
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(t));
}

}  // namespace

VecC steering_vector(const ArrayGeometry& geo, double angle_rad, ArraySide side) {
    const bool tx = side == ArraySide::transmit;
    const int n = tx ? geo.n_tx : geo.n_rx;
    const double k = wavenumber(tx ? geo.tx_spacing_wl : geo.rx_spacing_wl);
    const double orient = tx ? geo.tx_orientation_rad : geo.rx_orientation_rad;
    VecC a(n);
    const double c = std::cos(orient - angle_rad);
    for (int m = 0; m < n; ++m) a[m] = std::exp(kJ * (k * m * c));
    return a;
}

double RayRealization::phase(int ray) const {
    Rng r(derive_seed(seed, "ray-phase", static_cast<std::uint64_t>(ray)));
    return r.uniform(0.0, 2.0 * pi);
}

std::pair<double, double> RayRealization::angles(const MobilityModel& mob, int ray,
                                                 int t) const {
    const bool per_slot = mob.persistence == AnglePersistence::per_slot;
    const std::uint64_t idx =
        per_slot ? pack_ray_slot(ray, t) : static_cast<std::uint64_t>(ray);
    Rng rd(derive_seed(seed, "ray-aod", idx));
    Rng ra(derive_seed(seed, "ray-aoa", idx));
    return {mob.aod.sample(rd), mob.aoa.sample(ra)};
}

RayRealization draw_rays(Rng& rng) { return RayRealization{rng.next_u64()}; }

VecC sample_channel(const RayRealization& rays, const MobilityModel& mob,
                    const ArrayGeometry& geo, int t) {
    VecC h = VecC::Zero(static_cast<Eigen::Index>(geo.n_tx) * geo.n_rx);
    const int rays_now = mob.scatterer_count(t);
    for (int i = 0; i < rays_now; ++i) {
        auto [aod, aoa] = rays.angles(mob, i, t);
        const double doppler_hz =
            mob.speed(t) * std::cos(geo.tx_orientation_rad - aod) / mob.wavelength_m;
        const double ph =
            2.0 * pi * doppler_hz * static_cast<double>(t) * mob.slot_duration_s +
            rays.phase(i);
        const cxd gain = std::exp(kJ * ph);
        const VecC at = steering_vector(geo, aod, ArraySide::transmit);
        const VecC ar = steering_vector(geo, aoa, ArraySide::receive);
        for (int q = 0; q < geo.n_tx; ++q)
            for (int p = 0; p < geo.n_rx; ++p)
                h[static_cast<Eigen::Index>(q) * geo.n_rx + p] += gain * at[q] * ar[p];
    }
    return h;
}

std::pair<VecC, RayRealization> sample_channel(const MobilityModel& mob,
                                               const ArrayGeometry& geo, int t, Rng& rng) {
    RayRealization rays = draw_rays(rng);
    return {sample_channel(rays, mob, geo, t), rays};
}

MatC tx_cov_factor(const MobilityModel& mob, const ArrayGeometry& geo, int t1, int t2,
                   const CorrelationOptions& opts) {
    const bool same_draw =
        (t1 == t2) || mob.persistence == AnglePersistence::persistent;
    MatC out(geo.n_tx, geo.n_tx);
    for (int q1 = 0; q1 < geo.n_tx; ++q1)
        for (int q2 = 0; q2 < geo.n_tx; ++q2)
            out(q1, q2) = pair_expectation(mob.aod, geo.tx_orientation_rad,
                                           tx_phase_scale(mob, geo, t1, q1),
                                           tx_phase_scale(mob, geo, t2, q2), same_draw, opts);
    if (t1 == t2) out = hermitize(out);
    return out;
}

MatC rx_cov_factor(const MobilityModel& mob, const ArrayGeometry& geo, int t1, int t2,
                   const CorrelationOptions& opts) {
    const bool same_draw =
        (t1 == t2) || mob.persistence == AnglePersistence::persistent;
    const double k = wavenumber(geo.rx_spacing_wl);
    MatC out(geo.n_rx, geo.n_rx);
    for (int p1 = 0; p1 < geo.n_rx; ++p1)
        for (int p2 = 0; p2 < geo.n_rx; ++p2)
            out(p1, p2) = pair_expectation(mob.aoa, geo.rx_orientation_rad, k * p1, k * p2,
                                           same_draw, opts);
    if (t1 == t2) out = hermitize(out);
    return out;
}

MatC covariance(const MobilityModel& mob, const ArrayGeometry& geo, int t1, int t2,
                const CorrelationOptions& opts) {
    const double l_min = std::min(mob.scatterer_count(t1), mob.scatterer_count(t2));
    return l_min * kron(tx_cov_factor(mob, geo, t1, t2, opts),
                        rx_cov_factor(mob, geo, t1, t2, opts));
}

MatC correlation(const MobilityModel& mob, const ArrayGeometry& geo, int t1, int t2,
                 const CorrelationOptions& opts) {
    const MatC t11 = inv_sqrt_hpsd(tx_cov_factor(mob, geo, t1, t1, opts));
    const MatC t22 = inv_sqrt_hpsd(tx_cov_factor(mob, geo, t2, t2, opts));
    const MatC r11 = inv_sqrt_hpsd(rx_cov_factor(mob, geo, t1, t1, opts));
    const MatC r22 = inv_sqrt_hpsd(rx_cov_factor(mob, geo, t2, t2, opts));
    const MatC wt = t11 * tx_cov_factor(mob, geo, t1, t2, opts) * t22;
    const MatC wr = r11 * rx_cov_factor(mob, geo, t1, t2, opts) * r22;
    const double l1 = mob.scatterer_count(t1);
    const double l2 = mob.scatterer_count(t2);
    const double rho_l = std::min(l1, l2) / std::sqrt(l1 * l2);
    return rho_l * kron(wt, wr);
}

MatC correlation_numeric(const MobilityModel& mob, const ArrayGeometry& geo, int t1, int t2,
                         const CorrelationOptions& opts) {
    CorrelationOptions numeric = opts;
    numeric.force_numeric = true;
    return correlation(mob, geo, t1, t2, numeric);
}

namespace {

/// Stationary lag-tau whitened transmit factor for a spectrum given through
/// the single-expectation kernel; the receive factor whitens to identity.
MatC stationary_whitened(const ArrayGeometry& geo, double speed_mps, double wavelength_m,
                         double slot_duration_s, int tau,
                         const std::function<cxd(double)>& expectation_minus) {
    const double kt = wavenumber(geo.tx_spacing_wl);
    const double psi = 2.0 * pi * speed_mps * slot_duration_s * tau / wavelength_m;
    MatC lagged(geo.n_tx, geo.n_tx), single(geo.n_tx, geo.n_tx);
    for (int q1 = 0; q1 < geo.n_tx; ++q1)
        for (int q2 = 0; q2 < geo.n_tx; ++q2) {
            const double nt = q1 - q2;
            lagged(q1, q2) = expectation_minus(kt * nt + psi);
            single(q1, q2) = expectation_minus(kt * nt);
        }
    const MatC w = inv_sqrt_hpsd(hermitize(single));
    return kron(w * lagged * w, MatC::Identity(geo.n_rx, geo.n_rx));
}

}  // namespace

MatC correlation_vonmises(const ArrayGeometry& geo, double aod_center_rad,
                          double aod_concentration, double speed_mps, double wavelength_m,
                          double slot_duration_s, int tau) {
    const double delta = geo.tx_orientation_rad - aod_center_rad;
    const double kappa = aod_concentration;
    auto em = [&](double c) {
        const cxd arg(kappa * kappa - c * c, 2.0 * kappa * c * std::cos(delta));
        return bessel_i0_ratio(std::sqrt(arg), kappa);
    };
    return stationary_whitened(geo, speed_mps, wavelength_m, slot_duration_s, tau, em);
}

MatC correlation_uniform(const ArrayGeometry& geo, double speed_mps, double wavelength_m,
                         double slot_duration_s, int tau) {
    auto em = [](double c) { return cxd(bessel_j0(c), 0.0); };
    return stationary_whitened(geo, speed_mps, wavelength_m, slot_duration_s, tau, em);
}

SecondOrderStats ray_stats(const MobilityModel& mob, const ArrayGeometry& geo,
                           const CorrelationOptions& opts, bool normalize) {
    struct Cache {
        std::mutex m;
        std::map<std::pair<int, int>, MatC> cross, corr;
    };
    auto cache = std::make_shared<Cache>();

    auto cross = [mob, geo, opts, normalize, cache](int t1, int t2) -> MatC {
        {
            std::lock_guard<std::mutex> lk(cache->m);
            auto it = cache->cross.find({t1, t2});
            if (it != cache->cross.end()) return it->second;
        }
        MatC c = covariance(mob, geo, t1, t2, opts);
        if (normalize) {
            const double l1 = mob.scatterer_count(t1);
            const double l2 = mob.scatterer_count(t2);
            c /= std::sqrt(l1 * l2);
        }
        std::lock_guard<std::mutex> lk(cache->m);
        return cache->cross.emplace(std::make_pair(t1, t2), std::move(c)).first->second;
    };
    auto corr = [mob, geo, opts, cache](int t1, int t2) -> MatC {
        {
            std::lock_guard<std::mutex> lk(cache->m);
            auto it = cache->corr.find({t1, t2});
            if (it != cache->corr.end()) return it->second;
        }
        MatC p = correlation(mob, geo, t1, t2, opts);
        std::lock_guard<std::mutex> lk(cache->m);
        return cache->corr.emplace(std::make_pair(t1, t2), std::move(p)).first->second;
    };

    SecondOrderStats stats;
    stats.n_tx = geo.n_tx;
    stats.n_rx = geo.n_rx;
    stats.cov = [cross](int t) { return cross(t, t); };
    stats.cross_cov = cross;
    stats.corr = corr;
    return stats;
}

SecondOrderStats separable_stats(MatC spatial_cov, std::function<double(int)> temporal,
                                 int n_tx, int n_rx) {
    if (spatial_cov.rows() != static_cast<Eigen::Index>(n_tx) * n_rx ||
        spatial_cov.rows() != spatial_cov.cols())
        throw std::invalid_argument("separable_stats: spatial covariance shape mismatch");
    auto spatial = std::make_shared<MatC>(hermitize(spatial_cov));
    const MatC w = inv_sqrt_hpsd(*spatial);
    auto whitened = std::make_shared<MatC>(hermitize(w * *spatial * w));

    SecondOrderStats stats;
    stats.n_tx = n_tx;
    stats.n_rx = n_rx;
    stats.cov = [spatial](int) { return *spatial; };
    stats.cross_cov = [spatial, temporal](int t1, int t2) -> MatC {
        return temporal(t2 - t1) * *spatial;
    };
    stats.corr = [whitened, temporal](int t1, int t2) -> MatC {
        return temporal(t2 - t1) * *whitened;
    };
    return stats;
}

}  // namespace agingmimo
