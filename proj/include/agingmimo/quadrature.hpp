#pragma once

#include <functional>

#include "agingmimo/types.hpp"

namespace agingmimo {

struct QuadratureResult {
    cxd value{0.0, 0.0};
    double error_estimate = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Adaptive Gauss-Kronrod (G7/K15) on [a, b] for a complex-valued integrand.
/// Splits the worst interval until the summed error estimate drops below
/// `abs_tol` or `max_evals` integrand evaluations have been spent.
QuadratureResult integrate(const std::function<cxd(double)>& f, double a, double b,
                           double abs_tol = 1e-10, int max_evals = 1 << 14);

}  // namespace agingmimo
