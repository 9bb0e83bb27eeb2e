#pragma once

#include "coulomb/kernel.hpp"
#include "coulomb/potential.hpp"

namespace coulomb {

/// Unique root of r^{d-1} v'(r) = 1: the edge of the unconstrained support.
/// Brackets by doubling/halving from r = 1 within [1e-9, 1e9], then bisects
/// and polishes with Newton. Throws UnsolvableError if no bracket exists.
double critical_radius(const RadialPotential& pot, Dimension d);

/// Equilibrium measure of the gas confined to the ball of radius R, in radial
/// form: a bulk density m(r) = (r^{d-1} v'(r))' on (0, edge], edge = min(R, R*),
/// plus an atom of weight 1 - R^{d-1} v'(R) on the sphere |x| = R when R < R*.
struct ConstrainedMeasure {
  RadialPotential pot;
  Dimension d{1};
  double R = 0.0;
  double r_star = 0.0;
  double surface_weight = 0.0;

  double edge() const { return R < r_star ? R : r_star; }
  bool pushed() const { return R < r_star; }
  /// Radial mass density (angular part integrated out); zero outside (0, edge].
  double bulk_density(double r) const;
  /// Mass of the bulk part, edge^{d-1} v'(edge).
  double bulk_mass() const;
};

/// Throws DomainError for R <= 0.
ConstrainedMeasure constrained_measure(const RadialPotential& pot, Dimension d, double R);
/// Same, reusing a precomputed critical radius.
ConstrainedMeasure constrained_measure(const RadialPotential& pot, Dimension d, double R,
                                       double r_star);

/// Mass inside radius r, atom included once r >= R. The bulk part uses the
/// closed form r^{d-1} v'(r).
double radial_cdf(const ConstrainedMeasure& measure, double r);

/// Total energy density eps_d(x, R) at |x| = x_radius for the given measure,
/// via the shell formula and radial quadrature. At x = 0 the term
/// phi_d(0) * 0 is dropped (its limit).
double energy_density(const ConstrainedMeasure& measure, double x_radius);
/// Requires R <= R* (pushed or critical).
double energy_density(const RadialPotential& pot, Dimension d, double R, double x_radius);

struct EquilibriumCertificate {
  double level = 0.0;  // C_R = phi_d(R) + v(R)
  double max_dev_inside = 0.0;
  /// +inf when no exterior probe applies (wall active: the ball is the support).
  double min_margin_outside = 0.0;
  int probe_count = 0;
  int exterior_probe_count = 0;
  double tolerance = 0.0;

  bool passed() const {
    return max_dev_inside <= tolerance && min_margin_outside >= -tolerance;
  }
};

/// Probes eps_d at `probes` radii in [0, R] against C_R. When the wall is
/// inactive (R = R*) another `probes` radii in (R, 3R*] check eps_d >= C_R.
/// Outside a pushing wall no particle may sit, so no exterior condition
/// applies there.
EquilibriumCertificate certify_equilibrium(const ConstrainedMeasure& measure, int probes,
                                           double tol);
EquilibriumCertificate certify_equilibrium(const RadialPotential& pot, Dimension d, double R,
                                           int probes, double tol);

/// Minimum mean-field energy E_d[rho_R] = phi_d(R)/2 + v(R) - 1/2 int_0^R r^{d-1} v'^2.
/// For R >= R* the wall is inactive and the unconstrained minimum is returned.
double mean_field_energy(const RadialPotential& pot, Dimension d, double R);

}  // namespace coulomb
