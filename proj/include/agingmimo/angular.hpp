#pragma once

#include <functional>
#include <memory>

#include "agingmimo/rng.hpp"
#include "agingmimo/types.hpp"

namespace agingmimo {

enum class SpectrumKind { uniform, von_mises, custom };

/// Angular power spectrum on [-pi, pi).  `uniform` ignores the parameters;
/// `von_mises` uses (center_rad, concentration); `custom` wraps a caller
/// density (normalized internally).
class AngularSpectrum {
  public:
    static AngularSpectrum make_uniform();
    static AngularSpectrum make_von_mises(double center_rad, double concentration);
    static AngularSpectrum make_custom(std::function<double(double)> unnormalized_pdf);

    SpectrumKind kind() const { return kind_; }
    double center() const { return center_; }
    double concentration() const { return concentration_; }

    /// Normalized density at theta (theta need not be wrapped).
    double pdf(double theta) const;
    /// Draw one angle in [-pi, pi).
    double sample(Rng& rng) const;

  private:
    SpectrumKind kind_ = SpectrumKind::uniform;
    double center_ = 0.0;
    double concentration_ = 0.0;
    std::function<double(double)> custom_;
    double custom_norm_ = 1.0;
    // Inverse-CDF table for custom densities (built once at construction).
    std::shared_ptr<const std::vector<double>> cdf_grid_;
};

}  // namespace agingmimo
