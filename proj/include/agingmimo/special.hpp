#pragma once

#include "agingmimo/types.hpp"

namespace agingmimo {

/// Bessel J0 for real argument.
double bessel_j0(double x);

/// Exponentially scaled modified Bessel of order zero: I0(z) * exp(-Re z).
/// Power series below |z| = 20, exponentially convergent midpoint rule on the
/// integral representation above it; accurate to ~1e-14 relative either way
/// and overflow-free for any argument.
cxd bessel_i0_scaled(cxd z);

/// I0(z) / I0(kappa) for kappa >= 0, evaluated without forming either I0.
/// Safe for large kappa as long as Re z <= kappa + O(700), which holds for all
/// arguments produced by the angular correlation closed forms (Re z <= kappa).
cxd bessel_i0_ratio(cxd z, double kappa);

}  // namespace agingmimo
