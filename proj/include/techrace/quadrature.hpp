#pragma once

#include <functional>

namespace techrace {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Adaptive Gauss-Kronrod (7/15) quadrature of a smooth integrand on [a, b].
// Throws ComputationFault if the integrand is non-finite or the error
// estimate exceeds abs_tol.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol);

}  // namespace techrace
