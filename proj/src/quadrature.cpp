#include "techrace/quadrature.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "techrace/error.hpp"

namespace techrace {
namespace {

constexpr unsigned kMaxDepth = 20;
// Relative termination target handed to the Kronrod driver; the absolute
// tolerance is enforced on the returned error estimate.
constexpr double kRelativeTarget = 1e-13;

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol) {
  if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ComputationFault("integration bounds must be finite with a <= b");
  }
  if (a == b) return {};

  auto guarded = [&f](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
      throw ComputationFault("non-finite integrand at t = " +
                             std::to_string(x));
    }
    return y;
  };

  // Boost's recursion reports error estimates in [-1, 1] units without the
  // interval half-width, so integrate the rescaled integrand on [-1, 1].
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto unit = [&](double x) { return half * guarded(mid + half * x); };

  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      unit, -1.0, 1.0, kMaxDepth, kRelativeTarget, &error, &l1);
  if (!std::isfinite(value) || error > abs_tol) {
    throw ComputationFault("quadrature did not reach tolerance on [" +
                           std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  return {value, error};
}

}  // namespace techrace
