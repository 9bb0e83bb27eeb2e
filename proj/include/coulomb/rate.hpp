#pragma once

#include <optional>
#include <span>
#include <vector>

#include "coulomb/kernel.hpp"
#include "coulomb/potential.hpp"

namespace coulomb {

/// Excess free energy F_d(R) = 1/2 int_{min(R,R*)}^{R*} (r^{d-1} v'^2 - 2 v' - phi_d') dr
/// by adaptive quadrature; exactly 0 for R >= R*. R = 0 is accepted for d = 1
/// only (the d >= 2 integrand diverges at the origin).
double excess_free_energy(const RadialPotential& pot, Dimension d, double R);
double excess_free_energy(const RadialPotential& pot, Dimension d, double R, double r_star);

/// Closed form of F_d for v = r^2/2 (R* = 1); d = 2 is its own logarithmic branch.
double quadratic_closed_form(Dimension d, double R);

struct RateDerivatives {
  double first = 0.0;
  double second = 0.0;
  double third = 0.0;
  /// Set at R = R*, where the triple is the left limit and F''' jumps.
  bool third_discontinuous = false;
};

/// Analytic F', F'', F''' for R < R*, zeros for R > R*, left limits at R*.
RateDerivatives free_energy_derivatives(const RadialPotential& pot, Dimension d, double R);
RateDerivatives free_energy_derivatives(const RadialPotential& pot, Dimension d, double R,
                                        double r_star);

/// lim_{R -> R*^-} F'''(R), using v'(R*) = R*^{1-d}. Negative under the
/// standing assumptions.
double third_derivative_left_limit(const RadialPotential& pot, Dimension d);

/// Right tail H_d(R) = int_{R*}^{max(R,R*)} (phi_d' + v') dr.
double right_tail(const RadialPotential& pot, Dimension d, double R);

/// Finite-difference diagnostics at one step size h.
struct ScanRow {
  double h = 0.0;
  double cubic_ratio = 0.0;  // F(R* - h) / h^3
  double left_d1 = 0.0;      // backward differences anchored at R*
  double left_d2 = 0.0;
  double left_d3 = 0.0;
  double right_d1 = 0.0;     // forward differences anchored at R*
  double right_d2 = 0.0;
  double right_d3 = 0.0;
};

struct RateFunctionReport {
  int d = 0;
  double r_star = 0.0;
  std::vector<double> grid;
  std::vector<double> F;
  std::vector<double> dF;
  std::vector<double> d2F;
  std::vector<double> d3F;
  double third_left_limit = 0.0;
  double third_jump = 0.0;  // right limit (0) minus left limit

  std::vector<ScanRow> scan;
  /// Polynomial (Richardson) extrapolation of left_d3 to h = 0; needs >= 2 rows.
  std::optional<double> extrapolated_left_third;
};

/// Tabulates F and its derivatives on an R grid.
RateFunctionReport rate_report(const RadialPotential& pot, Dimension d, std::span<const double> grid);

/// One-sided differences of F up to third order at R* +- k h (k = 0..3) for
/// each h. The stencils never straddle R*.
RateFunctionReport transition_scan(const RadialPotential& pot, Dimension d,
                                   std::span<const double> h_values);

/// Value at h = 0 of the polynomial through (h_i, values_i) (Neville).
double richardson_extrapolate(std::span<const double> h, std::span<const double> values);

}  // namespace coulomb
