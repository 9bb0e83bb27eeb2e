#include "coulomb/kernel.hpp"

#include <cmath>
#include <numbers>

#include "coulomb/errors.hpp"

namespace coulomb {

namespace {

// Gamma(d/2) for integer d >= 1 via Gamma(x+1) = x Gamma(x).
double half_integer_gamma(int d) {
  double g = (d % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
  for (int twice_x = (d % 2 == 0) ? 2 : 1; twice_x < d; twice_x += 2) {
    g *= 0.5 * twice_x;
  }
  return g;
}

void require_positive(double r) {
  if (!(r > 0.0)) throw DomainError("Coulomb kernel evaluated at r <= 0");
}

}  // namespace

double omega(Dimension d) {
  const int n = d.value();
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / half_integer_gamma(n);
}

double ipow(double r, int k) {
  if (k < 0) return 1.0 / ipow(r, -k);
  double out = 1.0;
  double base = r;
  while (k > 0) {
    if (k & 1) out *= base;
    base *= base;
    k >>= 1;
  }
  return out;
}

double CoulombKernel::phi(double r) const {
  require_positive(r);
  const int d = d_.value();
  if (d == 2) return -std::log(r);
  return 1.0 / ((d - 2) * ipow(r, d - 2));
}

KernelDerivatives CoulombKernel::derivatives(double r) const {
  require_positive(r);
  const int d = d_.value();
  return {-ipow(r, 1 - d), (d - 1) * ipow(r, -d), d * (1.0 - d) * ipow(r, -d - 1)};
}

}  // namespace coulomb
