#pragma once

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "coulomb/errors.hpp"

namespace coulomb {

inline constexpr double kQuadratureAbsTol = 1e-10;
inline constexpr double kQuadratureRelTol = 1e-12;

/// Adaptive 61-point Gauss-Kronrod integral of f over [a, b]. Throws
/// NumericalError if the error estimate exceeds max(abs_tol, rel_tol ||f||_1).
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = kQuadratureAbsTol,
                 double rel_tol = kQuadratureRelTol) {
  if (a == b) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 15, 1e-13, &error, &l1);
  const double allowed = std::max(abs_tol, rel_tol * l1);
  if (!(error <= allowed) || !std::isfinite(value)) {
    throw NumericalError("quadrature did not converge", error);
  }
  return value;
}

}  // namespace coulomb
