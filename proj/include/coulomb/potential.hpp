#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coulomb/kernel.hpp"

namespace coulomb {

/// Radial confinement V(x) = v(|x|) with closed-form derivatives up to third
/// order.
struct RadialPotential {
  std::string label;
  std::function<double(double)> v;
  std::function<double(double)> dv;
  std::function<double(double)> d2v;
  std::function<double(double)> d3v;

  /// Field flux r^{d-1} v'(r); equals the bulk mass inside radius r.
  double flux(Dimension d, double r) const;
  /// (r^{d-1} v'(r))' = (d-1) r^{d-2} v'(r) + r^{d-1} v''(r).
  double flux_derivative(Dimension d, double r) const;
};

RadialPotential quadratic_potential();  // v = r^2/2
RadialPotential quartic_potential();    // v = r^4/4
RadialPotential linear_potential(double a);  // v = a r, a > 0

/// Built-in registry: "quadratic", "quartic", "linear-a" (a = 1) or
/// "linear-a:<a>". Throws std::invalid_argument for unknown ids.
RadialPotential potential_from_id(std::string_view id);

std::vector<std::string> builtin_potential_ids();

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  std::optional<double> first_violation;  // radius of the first failing probe
  std::string detail;
};

struct ValidationReport {
  AssumptionCheck increasing;        // v strictly increasing
  AssumptionCheck flux_increasing;   // r^{d-1} v' strictly increasing
  AssumptionCheck derivatives;       // closed forms agree with finite differences
  AssumptionCheck growth;            // V / |phi_d| large at r_max

  bool passed() const {
    return increasing.passed && flux_increasing.passed && derivatives.passed && growth.passed;
  }
  std::vector<const AssumptionCheck*> checks() const {
    return {&increasing, &flux_increasing, &derivatives, &growth};
  }
};

/// Growth-probe threshold for V(r_max)/|phi_d(r_max)| in d <= 2.
inline constexpr double kGrowthRatioThreshold = 10.0;

/// Probes the standing assumptions on a geometric grid of n_probe radii in
/// [1e-3 r_max, r_max]. Violations are reported, never thrown.
ValidationReport validate_assumptions(const RadialPotential& pot, Dimension d, double r_max,
                                      int n_probe);

}  // namespace coulomb
