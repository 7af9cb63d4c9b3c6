#include <cmath>

#include "agingmimo/channel.hpp"
#include "agingmimo/linalg.hpp"
#include "agingmimo/rng.hpp"
#include "agingmimo/special.hpp"
#include "agingmimo/types.hpp"
#include "doctest.h"

namespace am = agingmimo;
using am::cxd;
using am::MatC;
using am::VecC;

namespace {

am::MobilityModel basic_mobility() {
    am::MobilityModel mob;
    mob.speed_mps = 20.0;
    mob.scatterers = 6;
    mob.wavelength_m = 0.15;
    mob.slot_duration_s = 1e-3;
    mob.aod = am::AngularSpectrum::make_von_mises(0.8, 3.0);
    mob.aoa = am::AngularSpectrum::make_uniform();
    return mob;
}

am::ArrayGeometry basic_geometry(int n_tx, int n_rx) {
    am::ArrayGeometry geo;
    geo.n_tx = n_tx;
    geo.n_rx = n_rx;
    geo.tx_orientation_rad = 0.4;
    geo.rx_orientation_rad = 1.1;
    return geo;
}

}  // namespace

TEST_SUITE("channel") {
    TEST_CASE("single-antenna uniform-spectrum lag correlation is the Doppler kernel") {
        am::ArrayGeometry geo = basic_geometry(1, 2);
        const double speed = 12.0, wl = 0.2, slot = 2e-3;
        for (int tau = 0; tau < 10; ++tau) {
            const MatC r = am::correlation_uniform(geo, speed, wl, slot, tau);
            const double want = am::bessel_j0(2.0 * am::pi * speed * slot * tau / wl);
            CHECK((r - want * MatC::Identity(2, 2)).norm() < 1e-13);
        }
    }

    TEST_CASE("closed-form stationary correlations match the quadrature path") {
        am::MobilityModel mob = basic_mobility();
        am::ArrayGeometry geo = basic_geometry(3, 2);
        geo.tx_spacing_wl = 0.45;
        for (int tau : {0, 2, 5}) {
            const MatC closed = am::correlation_vonmises(geo, 0.8, 3.0, mob.speed_mps,
                                                         mob.wavelength_m,
                                                         mob.slot_duration_s, tau);
            const MatC numeric = am::correlation_numeric(mob, geo, 2 + tau, 2);
            CHECK((closed - numeric).cwiseAbs().maxCoeff() < 1e-7);
        }

        mob.aod = am::AngularSpectrum::make_uniform();
        const MatC closed_u = am::correlation_uniform(geo, mob.speed_mps, mob.wavelength_m,
                                                      mob.slot_duration_s, 3);
        const MatC numeric_u = am::correlation_numeric(mob, geo, 4, 1);
        CHECK((closed_u - numeric_u).cwiseAbs().maxCoeff() < 1e-7);
    }

    TEST_CASE("persistent constant-speed channels are stationary") {
        const am::MobilityModel mob = basic_mobility();
        const am::ArrayGeometry geo = basic_geometry(2, 2);
        const MatC a = am::correlation(mob, geo, 3, 1);
        const MatC b = am::correlation(mob, geo, 9, 7);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
        // Equal-time correlation whitens to the identity.
        const MatC eq = am::correlation(mob, geo, 4, 4);
        CHECK((eq - MatC::Identity(4, 4)).norm() < 1e-9);
    }

    TEST_CASE("a single ray is the outer product of the steering vectors") {
        am::MobilityModel mob = basic_mobility();
        mob.scatterers = 1;
        const am::ArrayGeometry geo = basic_geometry(2, 3);
        am::Rng rng(11);
        const auto [h, rays] = am::sample_channel(mob, geo, 2, rng);
        REQUIRE(h.size() == 6);
        const MatC hm = am::unvec(h, 3, 2);
        // Rank one with unit-modulus entries scaled by the array responses.
        Eigen::JacobiSVD<MatC> svd(hm);
        CHECK(svd.singularValues()[1] < 1e-12 * svd.singularValues()[0]);
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 2; ++q)
                CHECK(std::abs(std::abs(hm(p, q)) - 1.0) < 1e-12);
        // The same realization is reproducible.
        const VecC h2 = am::sample_channel(rays, mob, geo, 2);
        CHECK((h - h2).norm() == 0.0);
    }

    TEST_CASE("monte-carlo covariance of ray samples matches the model covariance") {
        am::MobilityModel mob = basic_mobility();
        const am::ArrayGeometry geo = basic_geometry(1, 2);
        const int n = 2, trials = 100000;
        const int t1 = 3, t2 = 1;

        const MatC want_eq = am::covariance(mob, geo, t1, t1);
        const MatC want_cross = am::covariance(mob, geo, t1, t2);

        am::Rng rng(2024);
        MatC sum_eq = MatC::Zero(n, n), sum_cross = MatC::Zero(n, n);
        Eigen::MatrixXd sq_eq_re = Eigen::MatrixXd::Zero(n, n),
                        sq_eq_im = Eigen::MatrixXd::Zero(n, n),
                        sq_cr_re = Eigen::MatrixXd::Zero(n, n),
                        sq_cr_im = Eigen::MatrixXd::Zero(n, n);
        for (int t = 0; t < trials; ++t) {
            const am::RayRealization rays = am::draw_rays(rng);
            const VecC ha = am::sample_channel(rays, mob, geo, t1);
            const VecC hb = am::sample_channel(rays, mob, geo, t2);
            const MatC oe = ha * ha.adjoint();
            const MatC oc = ha * hb.adjoint();
            sum_eq += oe;
            sum_cross += oc;
            sq_eq_re += oe.real().cwiseAbs2();
            sq_eq_im += oe.imag().cwiseAbs2();
            sq_cr_re += oc.real().cwiseAbs2();
            sq_cr_im += oc.imag().cwiseAbs2();
        }
        const double tn = trials;
        auto check_entries = [&](const MatC& sum, const Eigen::MatrixXd& sre,
                                 const Eigen::MatrixXd& sim, const MatC& want) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const cxd mean = sum(i, j) / tn;
                    const double se_re = std::sqrt(
                        std::max(sre(i, j) / tn - mean.real() * mean.real(), 0.0) / tn);
                    const double se_im = std::sqrt(
                        std::max(sim(i, j) / tn - mean.imag() * mean.imag(), 0.0) / tn);
                    CHECK(std::abs(mean.real() - want(i, j).real()) <=
                          3.0 * se_re + 1e-9);
                    CHECK(std::abs(mean.imag() - want(i, j).imag()) <=
                          3.0 * se_im + 1e-9);
                }
        };
        check_entries(sum_eq, sq_eq_re, sq_eq_im, want_eq);
        check_entries(sum_cross, sq_cr_re, sq_cr_im, want_cross);
    }

    TEST_CASE("per-slot scattering decorrelates through independent draws") {
        am::MobilityModel mob = basic_mobility();
        mob.persistence = am::AnglePersistence::per_slot;
        const am::ArrayGeometry geo = basic_geometry(2, 2);
        // Cross-time covariance factors into single-time expectations; verify
        // against the persistent model being different.
        const MatC per_slot = am::covariance(mob, geo, 4, 2);
        mob.persistence = am::AnglePersistence::persistent;
        const MatC persistent = am::covariance(mob, geo, 4, 2);
        CHECK((per_slot - persistent).cwiseAbs().maxCoeff() > 1e-3);
        // Equal-time statistics are unaffected by persistence.
        mob.persistence = am::AnglePersistence::per_slot;
        const MatC eq_a = am::covariance(mob, geo, 4, 4);
        mob.persistence = am::AnglePersistence::persistent;
        const MatC eq_b = am::covariance(mob, geo, 4, 4);
        CHECK((eq_a - eq_b).cwiseAbs().maxCoeff() < 1e-9);
    }

    TEST_CASE("time-varying scatterer count scales covariance by the overlap") {
        am::MobilityModel mob = basic_mobility();
        mob.scatterers_fn = [](int t) { return t <= 2 ? 8 : 2; };
        const am::ArrayGeometry geo = basic_geometry(1, 2);
        const MatC c22 = am::covariance(mob, geo, 2, 2);
        const MatC c44 = am::covariance(mob, geo, 4, 4);
        // Power is proportional to the live scatterer count.
        CHECK(c22.real().trace() == doctest::Approx(4.0 * c44.real().trace()));
        // The cross term carries min(L1, L2) while the correlation normalizes
        // by the geometric mean.
        const MatC cross = am::covariance(mob, geo, 2, 4);
        const MatC corr = am::correlation(mob, geo, 2, 4);
        const double rho_l = 2.0 / std::sqrt(8.0 * 2.0);
        const MatC stationary_corr = am::correlation(mob, geo, 4, 6);
        CHECK(cross.norm() > 0.0);
        CHECK(corr.norm() == doctest::Approx(rho_l * stationary_corr.norm()).epsilon(1e-6));
    }

    TEST_CASE("separable statistics expose the declared covariance structure") {
        am::Rng rng(31);
        MatC x(3, 3);
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) x(i, j) = rng.cgaussian(1.0);
        const MatC spatial = am::hermitize(x * x.adjoint() + MatC::Identity(3, 3));
        const auto temporal = [](int dt) { return am::bessel_j0(0.45 * std::abs(dt)); };
        const am::SecondOrderStats st = am::separable_stats(spatial, temporal, 3, 1);
        CHECK(st.n_tx == 3);
        CHECK(st.n_rx == 1);
        CHECK((st.cov(5) - spatial).norm() < 1e-12);
        CHECK((st.cross_cov(7, 3) - temporal(3 - 7) * spatial).norm() < 1e-12);
        // Whitened correlation: rho * identity.
        const MatC corr = st.corr(7, 3);
        CHECK((corr - temporal(3 - 7) * MatC::Identity(3, 3)).norm() < 1e-9);
    }

    TEST_CASE("ray statistics delegate to the covariance functions") {
        const am::MobilityModel mob = basic_mobility();
        const am::ArrayGeometry geo = basic_geometry(2, 2);
        const am::SecondOrderStats st = am::ray_stats(mob, geo);
        CHECK((st.cov(3) - am::covariance(mob, geo, 3, 3)).norm() < 1e-12);
        CHECK((st.cross_cov(5, 2) - am::covariance(mob, geo, 5, 2)).norm() < 1e-12);
        CHECK((st.corr(5, 2) - am::correlation(mob, geo, 5, 2)).norm() < 1e-12);
    }
}
