#include "agingmimo/angular.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "agingmimo/special.hpp"

namespace agingmimo {

AngularSpectrum AngularSpectrum::make_uniform() { return AngularSpectrum{}; }

AngularSpectrum AngularSpectrum::make_von_mises(double center_rad, double concentration) {
    if (concentration < 0.0) throw std::invalid_argument("concentration must be >= 0");
    AngularSpectrum s;
    s.kind_ = SpectrumKind::von_mises;
    s.center_ = center_rad;
    s.concentration_ = concentration;
    return s;
}

AngularSpectrum AngularSpectrum::make_custom(std::function<double(double)> unnormalized_pdf) {
    AngularSpectrum s;
    s.kind_ = SpectrumKind::custom;
    s.custom_ = std::move(unnormalized_pdf);
    // Composite-Simpson normalization and cumulative table on a fixed grid.
    constexpr int n = 1 << 12;
    const double h = 2.0 * pi / n;
    auto grid = std::make_shared<std::vector<double>>(n + 1, 0.0);
    double acc = 0.0;
    double prev = s.custom_(-pi);
    for (int i = 1; i <= n; ++i) {
        const double x = -pi + i * h;
        const double cur = s.custom_(x);
        const double mid = s.custom_(x - 0.5 * h);
        acc += h / 6.0 * (prev + 4.0 * mid + cur);
        (*grid)[i] = acc;
        prev = cur;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("custom spectrum integrates to zero");
    for (auto& v : *grid) v /= acc;
    s.custom_norm_ = acc;
    s.cdf_grid_ = std::move(grid);
    return s;
}

double AngularSpectrum::pdf(double theta) const {
    switch (kind_) {
        case SpectrumKind::uniform:
            return 1.0 / (2.0 * pi);
        case SpectrumKind::von_mises: {
            if (concentration_ == 0.0) return 1.0 / (2.0 * pi);
            // exp(k cos(t - c)) / (2 pi I0(k)), evaluated in scaled form.
            const double k = concentration_;
            const double num = std::exp(k * (std::cos(theta - center_) - 1.0));
            const double i0s = bessel_i0_scaled(cxd{k, 0.0}).real();
            return num / (2.0 * pi * i0s);
        }
        case SpectrumKind::custom:
            return custom_(theta) / custom_norm_;
    }
    return 0.0;
}

double AngularSpectrum::sample(Rng& rng) const {
    switch (kind_) {
        case SpectrumKind::uniform:
            return rng.uniform(-pi, pi);
        case SpectrumKind::von_mises: {
            const double k = concentration_;
            if (k == 0.0) return rng.uniform(-pi, pi);
            // Best-Fisher rejection sampler.
            const double tau = 1.0 + std::sqrt(1.0 + 4.0 * k * k);
            const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * k);
            const double r = (1.0 + rho * rho) / (2.0 * rho);
            for (;;) {
                const double u1 = rng.uniform();
                const double u2 = rng.uniform();
                const double z = std::cos(pi * u1);
                const double f = (1.0 + r * z) / (r + z);
                const double c = k * (r - f);
                if (c * (2.0 - c) - u2 > 0.0 ||
                    (u2 > 0.0 && std::log(c / u2) + 1.0 - c >= 0.0)) {
                    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
                    double theta = center_ + sign * std::acos(f);
                    theta = std::remainder(theta, 2.0 * pi);
                    return theta;
                }
            }
        }
        case SpectrumKind::custom: {
            const auto& cdf = *cdf_grid_;
            const double u = rng.uniform();
            auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
            std::size_t hi = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
            if (hi == 0) hi = 1;
            const std::size_t lo = hi - 1;
            const double h = 2.0 * pi / (cdf.size() - 1);
            const double span = cdf[hi] - cdf[lo];
            const double frac = span > 0.0 ? (u - cdf[lo]) / span : 0.5;
            return -pi + (lo + frac) * h;
        }
    }
    return 0.0;
}

}  // namespace agingmimo
