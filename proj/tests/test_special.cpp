#include <cmath>
#include <complex>

#include "agingmimo/combining.hpp"
#include "agingmimo/linalg.hpp"
#include "agingmimo/quadrature.hpp"
#include "agingmimo/rng.hpp"
#include "agingmimo/special.hpp"
#include "agingmimo/types.hpp"
#include "doctest.h"

namespace am = agingmimo;
using am::cxd;
using am::MatC;
using am::MatR;
using am::VecC;

namespace {

// Power-series oracles in extended precision.  Both series have either
// alternating terms with modest cancellation (J0, |x| <= 10) or all-positive
// terms (I0), so long double keeps ~1e-16 relative accuracy on the ranges
// used below.
long double j0_series(long double x) {
    long double term = 1.0L, sum = 1.0L;
    const long double q = x * x / 4.0L;
    for (int m = 1; m < 64; ++m) {
        term *= -q / (static_cast<long double>(m) * m);
        sum += term;
    }
    return sum;
}

std::complex<long double> i0_series(std::complex<long double> z) {
    std::complex<long double> term = 1.0L, sum = 1.0L;
    const std::complex<long double> q = z * z / 4.0L;
    for (int m = 1; m < 128; ++m) {
        term *= q / (static_cast<long double>(m) * m);
        sum += term;
    }
    return sum;
}

cxd i0_scaled_oracle(cxd z) {
    const std::complex<long double> zl(z.real(), z.imag());
    const std::complex<long double> v = i0_series(zl) * std::exp(-zl.real());
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

}  // namespace

TEST_SUITE("special") {
    TEST_CASE("bessel j0 matches its power series") {
        for (double x = 0.0; x <= 10.0; x += 0.37) {
            const double want = static_cast<double>(j0_series(x));
            CHECK(am::bessel_j0(x) == doctest::Approx(want).epsilon(1e-12));
        }
        CHECK(am::bessel_j0(0.0) == 1.0);
        // First zero of J0.
        CHECK(std::abs(am::bessel_j0(2.404825557695773)) < 1e-12);
        // Even function.
        CHECK(am::bessel_j0(-3.3) == doctest::Approx(am::bessel_j0(3.3)).epsilon(1e-14));
    }

    TEST_CASE("scaled i0 matches its power series on both algorithm branches") {
        const cxd pts[] = {{0.0, 0.0}, {0.3, 0.0},  {5.0, 0.0},  {19.5, 0.0},
                           {20.5, 0.0}, {28.0, 0.0}, {3.0, 4.0},  {0.0, 7.0},
                           {15.0, -9.0}, {22.0, 11.0}};
        for (const cxd z : pts) {
            const cxd want = i0_scaled_oracle(z);
            const cxd got = am::bessel_i0_scaled(z);
            CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
        }
    }

    TEST_CASE("i0 of a purely imaginary argument reproduces j0") {
        // A purely imaginary argument turns the all-positive i0 series into an
        // alternating one, so the achievable absolute accuracy on the series
        // branch is ulp * I0(|x|) ~ ulp * e^x / sqrt(2 pi x); the asymptotic
        // branch past |z| = 20 is ulp-accurate again.
        for (double x = 0.1; x <= 25.0; x += 1.7) {
            const cxd v = am::bessel_i0_scaled(cxd(0.0, x));
            const double cancellation =
                1e-15 * std::exp(std::min(x, 20.0)) /
                std::sqrt(2.0 * am::pi * std::max(x, 1.0));
            const double tol = 1e-13 + cancellation;
            CHECK(std::abs(v.real() - am::bessel_j0(x)) <= tol);
            CHECK(std::abs(v.imag()) < 1e-12);
        }
    }

    TEST_CASE("i0 ratio agrees with the scaled quotient and survives huge kappa") {
        const double kappas[] = {0.5, 4.0, 18.0, 60.0};
        am::Rng rng(7);
        for (const double kappa : kappas) {
            for (int d = 0; d < 8; ++d) {
                const cxd z(kappa * rng.uniform(), 10.0 * (rng.uniform() - 0.5));
                const cxd want = am::bessel_i0_scaled(z) /
                                 am::bessel_i0_scaled(cxd(kappa, 0.0)) *
                                 std::exp(cxd(z.real() - kappa, 0.0));
                const cxd got = am::bessel_i0_ratio(z, kappa);
                CHECK(std::abs(got - want) <= 1e-11 * std::max(1.0, std::abs(want)));
            }
        }
        const cxd at_kappa = am::bessel_i0_ratio(cxd(1000.0, 0.0), 1000.0);
        CHECK(at_kappa.real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(at_kappa.imag()) < 1e-12);
        // Uniform asymptotics: I0(z)/I0(k) ~ e^{z-k} sqrt(k/z) for large real
        // arguments; 1/(8z) correction bounds the error.
        const cxd r = am::bessel_i0_ratio(cxd(990.0, 0.0), 1000.0);
        const double asym = std::exp(-10.0) * std::sqrt(1000.0 / 990.0);
        CHECK(r.real() == doctest::Approx(asym).epsilon(1e-3));
    }

    TEST_CASE("quadrature integrates polynomials and oscillatory kernels") {
        const auto cube = [](double x) { return cxd(x * x * x, 0.0); };
        const am::QuadratureResult r1 = am::integrate(cube, 0.0, 1.0);
        CHECK(r1.converged);
        CHECK(r1.value.real() == doctest::Approx(0.25).epsilon(1e-14));

        // Integral representation: (1/pi) * int_0^pi cos(b sin t) dt = J0(b).
        for (const double b : {0.7, 3.0, 11.5}) {
            const auto f = [b](double t) { return cxd(std::cos(b * std::sin(t)), 0.0); };
            const am::QuadratureResult r = am::integrate(f, 0.0, am::pi, 1e-12);
            CHECK(r.converged);
            CHECK(r.value.real() / am::pi ==
                  doctest::Approx(am::bessel_j0(b)).epsilon(1e-10));
        }

        const auto osc = [](double t) { return std::exp(cxd(0.0, t)); };
        const am::QuadratureResult r2 = am::integrate(osc, 0.0, 10.0 * am::pi, 1e-12);
        CHECK(r2.converged);
        CHECK(std::abs(r2.value) < 1e-10);
        CHECK(r2.evaluations > 0);
    }

    TEST_CASE("kron, vec and unvec follow the column-stacked layout") {
        MatC a(2, 2), b(2, 2);
        a << cxd(1, 0), cxd(2, 0), cxd(3, 0), cxd(4, 1);
        b << cxd(0, 1), cxd(1, 0), cxd(2, 0), cxd(0, -1);
        const MatC k = am::kron(a, b);
        REQUIRE(k.rows() == 4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int s = 0; s < 2; ++s)
                    for (int t = 0; t < 2; ++t)
                        CHECK(k(i * 2 + s, j * 2 + t) == a(i, j) * b(s, t));

        am::Rng rng(3);
        MatC x(3, 2);
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 3; ++i) x(i, j) = rng.cgaussian(1.0);
        const VecC v = am::vec(x);
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 3; ++i) CHECK(v[j * 3 + i] == x(i, j));
        CHECK((am::unvec(v, 3, 2) - x).norm() == 0.0);
    }

    TEST_CASE("commutation matrix transposes vectorized matrices") {
        const MatR k = am::commutation(2, 3);
        REQUIRE(k.rows() == 6);
        // Permutation matrix: one unit entry per row and per column.
        for (int i = 0; i < 6; ++i) {
            CHECK(k.row(i).sum() == 1.0);
            CHECK(k.col(i).sum() == 1.0);
        }
        am::Rng rng(4);
        MatC x(2, 3);
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 2; ++i) x(i, j) = rng.cgaussian(1.0);
        const VecC lhs = k * am::vec(x);
        const VecC rhs = am::vec(MatC(x.transpose()));
        CHECK((lhs - rhs).norm() == 0.0);
    }

    TEST_CASE("hermitize, psd factor, inverse square root and hpsd solve") {
        am::Rng rng(5);
        MatC x(4, 4);
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < 4; ++i) x(i, j) = rng.cgaussian(1.0);
        const MatC h = am::hermitize(x);
        CHECK((h - h.adjoint()).norm() < 1e-14);
        CHECK((am::hermitize(h) - h).norm() < 1e-14);

        const MatC a = am::hermitize(x * x.adjoint());
        const MatC f = am::psd_factor(a);
        CHECK((f * f.adjoint() - a).norm() <= 1e-10 * a.norm());

        // Rank-deficient input stays factorizable.
        const VecC u = x.col(0);
        const MatC r1 = u * u.adjoint();
        const MatC f1 = am::psd_factor(r1);
        CHECK((f1 * f1.adjoint() - r1).norm() <= 1e-10 * r1.norm());

        const MatC w = am::inv_sqrt_hpsd(a);
        CHECK((w * a * w - MatC::Identity(4, 4)).norm() < 1e-10);

        MatC b(4, 2);
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 4; ++i) b(i, j) = rng.cgaussian(1.0);
        const MatC s = am::solve_hpsd(a, b);
        CHECK((a * s - b).norm() <= 1e-10 * b.norm());
    }

    TEST_CASE("frobenius inner product conjugates its second argument") {
        MatC a(2, 2), b(2, 2);
        a << cxd(1, 2), cxd(0, 1), cxd(3, 0), cxd(0, -2);
        b << cxd(2, -1), cxd(1, 1), cxd(0, 4), cxd(5, 0);
        const cxd got = am::frob_inner(a, b);
        const cxd want = (b.adjoint() * a).trace();
        CHECK(std::abs(got - want) < 1e-14);
    }

    TEST_CASE("random streams are deterministic and seed derivation separates") {
        am::Rng a(123), b(123), c(124);
        bool same = true, diff = false;
        for (int i = 0; i < 100; ++i) {
            const std::uint64_t va = a.next_u64();
            same = same && (va == b.next_u64());
            diff = diff || (va != c.next_u64());
        }
        CHECK(same);
        CHECK(diff);

        CHECK(am::derive_seed(1, "x", 0) != am::derive_seed(1, "x", 1));
        CHECK(am::derive_seed(1, "x", 0) != am::derive_seed(1, "y", 0));
        CHECK(am::derive_seed(1, "x", 0) == am::derive_seed(1, "x", 0));
        CHECK(am::derive_seed(1, "x", 0) != am::derive_seed(2, "x", 0));
    }

    TEST_CASE("complex gaussian draws have the declared first two moments") {
        am::Rng rng(99);
        const int n = 40000;
        cxd mean = 0.0;
        double second = 0.0, re2 = 0.0, im2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const cxd z = rng.cgaussian(1.0);
            mean += z;
            second += std::norm(z);
            re2 += z.real() * z.real();
            im2 += z.imag() * z.imag();
        }
        mean /= static_cast<double>(n);
        second /= static_cast<double>(n);
        // 5-sigma bands.
        CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
        CHECK(second == doctest::Approx(1.0).epsilon(0.03));
        // Circular symmetry: half the energy per real component.
        CHECK(re2 / n == doctest::Approx(0.5).epsilon(0.05));
        CHECK(im2 / n == doctest::Approx(0.5).epsilon(0.05));

        am::Rng r2(100);
        for (int i = 0; i < 1000; ++i) {
            const double u = r2.uniform(2.0, 5.0);
            CHECK(u >= 2.0);
            CHECK(u < 5.0);
        }
    }
}
