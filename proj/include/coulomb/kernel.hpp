#pragma once

#include <stdexcept>

namespace coulomb {

/// Spatial dimension d >= 1. d = 2 selects the logarithmic kernel.
class Dimension {
 public:
  explicit Dimension(int d) : d_(d) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  }

  int value() const noexcept { return d_; }
  bool logarithmic() const noexcept { return d_ == 2; }

  friend bool operator==(Dimension, Dimension) = default;

 private:
  int d_;
};

/// Surface area of the unit sphere S^{d-1}: 2 pi^{d/2} / Gamma(d/2).
/// Gamma is evaluated by the exact recursion from Gamma(1/2) and Gamma(1).
double omega(Dimension d);

/// Integer power r^k, k may be negative.
double ipow(double r, int k);

struct KernelDerivatives {
  double first;
  double second;
  double third;
};

/// Radial Coulomb kernel phi_d(r): 1/((d-2) r^{d-2}) for d != 2, -log r for d = 2.
class CoulombKernel {
 public:
  explicit CoulombKernel(Dimension d) : d_(d), omega_(omega(d)) {}

  Dimension dimension() const noexcept { return d_; }
  double omega_d() const noexcept { return omega_; }

  /// Throws DomainError for r <= 0.
  double phi(double r) const;
  /// (phi', phi'', phi''') at r; throws DomainError for r <= 0.
  KernelDerivatives derivatives(double r) const;

 private:
  Dimension d_;
  double omega_;
};

}  // namespace coulomb
