#include "agingmimo/system.hpp"

#include <algorithm>
#include <cmath>

#include "agingmimo/linalg.hpp"
#include "agingmimo/special.hpp"

namespace agingmimo {

double amplitude_from_db(double gain_db) { return std::pow(10.0, gain_db / 20.0); }

MatC ones_mix_cov(int n, double rho) {
    MatC c = MatC::Constant(n, n, cxd(rho, 0.0));
    c.diagonal().setOnes();
    return c;
}

MatC steering_cov(int n, double spacing_wl, double orientation_rad,
                  const std::vector<double>& angles_rad) {
    ArrayGeometry geo;
    geo.n_tx = n;
    geo.tx_spacing_wl = spacing_wl;
    geo.tx_orientation_rad = orientation_rad;
    MatC c = MatC::Zero(n, n);
    for (double th : angles_rad) {
        const VecC a = steering_vector(geo, th, ArraySide::transmit);
        c += a * a.adjoint();
    }
    return c / static_cast<double>(angles_rad.size());
}

namespace {

SecondOrderStats build_gaussian_stats(const GaussianChannelConfig& g, int n_tx, int n_rx) {
    MatC c_tx, c_rx;
    switch (g.spatial) {
        case SpatialKind::iid:
            c_tx = MatC::Identity(n_tx, n_tx);
            c_rx = MatC::Identity(n_rx, n_rx);
            break;
        case SpatialKind::ones_mix:
            c_tx = ones_mix_cov(n_tx, g.tx_rho);
            c_rx = ones_mix_cov(n_rx, g.rx_rho);
            break;
        case SpatialKind::steering:
            c_tx = steering_cov(n_tx, g.tx_spacing_wavelengths, g.tx_orientation_rad,
                                g.tx_angles_rad);
            c_rx = steering_cov(n_rx, g.rx_spacing_wavelengths, g.rx_orientation_rad,
                                g.rx_angles_rad);
            break;
    }
    std::function<double(int)> temporal;
    if (g.temporal == TemporalKind::jakes) {
        const double scale = 2.0 * pi * g.doppler_hz / g.symbol_rate_hz;
        temporal = [scale](int tau) { return bessel_j0(scale * tau); };
    } else {
        temporal = [](int) { return 1.0; };
    }
    return separable_stats(kron(c_tx, c_rx), std::move(temporal), n_tx, n_rx);
}

}  // namespace

BuiltSystem build_system(const ScenarioConfig& cfg) {
    return build_system(cfg, cfg.n_rx, false);
}

BuiltSystem build_system(const ScenarioConfig& cfg, int n_rx_override, bool force_numeric) {
    if (n_rx_override < 1) throw ScenarioError(cfg.name + ": n_rx override must be >= 1");
    const int n_users = static_cast<int>(cfg.users.size());
    if (cfg.tau_p < n_users * cfg.n_tx)
        throw ScenarioError(cfg.name +
                            ": tau_p must be >= n_users * n_tx for orthogonal pilots");

    BuiltSystem sys;
    sys.cfg = cfg;
    sys.n_rx = n_rx_override;
    sys.ensemble.pilot_noise_var = cfg.pilot_noise_var;
    sys.ensemble.data_noise_var = cfg.data_noise_var;
    sys.ensemble.tau_p = cfg.tau_p;

    for (const UserConfig& u : cfg.users) {
        sys.ensemble.gains.push_back(amplitude_from_db(u.gain_db));
        sys.is_ray.push_back(u.is_ray);
        if (u.is_ray) {
            const RayChannelConfig& r = u.ray;
            MobilityModel mob;
            mob.speed_mps = r.speed_mps;
            mob.scatterers = r.scatterers;
            mob.aod = r.aod.make();
            mob.aoa = r.aoa.make();
            mob.persistence = r.persistence;
            mob.wavelength_m = 299792458.0 / r.carrier_hz;
            mob.slot_duration_s = 1.0 / r.symbol_rate_hz;

            ArrayGeometry geo;
            geo.n_tx = cfg.n_tx;
            geo.n_rx = n_rx_override;
            geo.tx_spacing_wl = r.tx_spacing_wavelengths;
            geo.rx_spacing_wl = r.rx_spacing_wavelengths;
            geo.tx_orientation_rad = r.tx_orientation_rad;
            geo.rx_orientation_rad = r.rx_orientation_rad;

            CorrelationOptions opts;
            opts.force_numeric = force_numeric;
            sys.ensemble.stats.push_back(ray_stats(mob, geo, opts, r.normalize));
            sys.mobility.push_back(std::move(mob));
            sys.geometry.push_back(geo);
            sys.normalize_channel.push_back(r.normalize);
        } else {
            sys.ensemble.stats.push_back(
                build_gaussian_stats(u.gaussian, cfg.n_tx, n_rx_override));
            sys.mobility.emplace_back();
            sys.geometry.emplace_back();
            sys.normalize_channel.push_back(false);
        }
    }

    if (cfg.has_frame) sys.frame = make_frame(cfg.frame_blocks);
    return sys;
}

int evaluation_slot(const BuiltSystem& sys) {
    if (!sys.cfg.has_frame)
        throw ScenarioError(sys.cfg.name + ": evaluation needs a frame section");
    const std::vector<int>& data = sys.frame.data_slots;
    const int want = sys.cfg.evaluation.slot;
    if (want < 0) return data.back();
    if (!std::binary_search(data.begin(), data.end(), want))
        throw ScenarioError(sys.cfg.name + ": evaluation.slot " + std::to_string(want) +
                            " is not a data slot of the frame");
    return want;
}

}  // namespace agingmimo
