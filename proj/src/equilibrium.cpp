#include "coulomb/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "coulomb/errors.hpp"
#include "coulomb/quadrature.hpp"

namespace coulomb {

namespace {

constexpr double kBracketMin = 1e-9;
constexpr double kBracketMax = 1e9;
constexpr double kRootTol = 1e-12;
// Relative slack for treating R as equal to R* from the pushed side.
constexpr double kCriticalSlack = 1e-9;

}  // namespace

double critical_radius(const RadialPotential& pot, Dimension d) {
  auto g = [&](double r) { return pot.flux(d, r) - 1.0; };

  double lo = 1.0;
  double hi = 1.0;
  const double g1 = g(1.0);
  if (g1 == 0.0) return 1.0;
  if (g1 < 0.0) {
    while (g(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > kBracketMax) throw UnsolvableError("no sign change of r^(d-1) v'(r) - 1 below 1e9");
    }
  } else {
    while (g(lo) > 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < kBracketMin) {
        throw UnsolvableError("no sign change of r^(d-1) v'(r) - 1 above 1e-9");
      }
    }
  }
  if (!std::isfinite(g(lo)) || !std::isfinite(g(hi))) {
    throw UnsolvableError("r^(d-1) v'(r) not finite on the bracket");
  }

  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    (gm < 0.0 ? lo : hi) = mid;
  }
  double root = std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
  for (int it = 0; it < 3; ++it) {
    const double slope = pot.flux_derivative(d, root);
    if (!(slope > 0.0)) break;
    const double next = root - g(root) / slope;
    if (!(next > lo && next < hi) || std::abs(g(next)) >= std::abs(g(root))) break;
    root = next;
  }
  if (!(std::abs(g(root)) <= kRootTol)) {
    std::ostringstream msg;
    msg << "critical radius residual " << g(root) << " exceeds " << kRootTol;
    throw UnsolvableError(msg.str());
  }
  return root;
}

double ConstrainedMeasure::bulk_density(double r) const {
  if (!(r > 0.0) || r > edge()) return 0.0;
  return pot.flux_derivative(d, r);
}

double ConstrainedMeasure::bulk_mass() const { return pot.flux(d, edge()); }

ConstrainedMeasure constrained_measure(const RadialPotential& pot, Dimension d, double R,
                                       double r_star) {
  if (!(R > 0.0)) throw DomainError("wall radius must be positive");
  ConstrainedMeasure m{pot, d, R, r_star, 0.0};
  if (R < r_star) m.surface_weight = std::max(0.0, 1.0 - pot.flux(d, R));
  return m;
}

ConstrainedMeasure constrained_measure(const RadialPotential& pot, Dimension d, double R) {
  if (!(R > 0.0)) throw DomainError("wall radius must be positive");
  return constrained_measure(pot, d, R, critical_radius(pot, d));
}

double radial_cdf(const ConstrainedMeasure& measure, double r) {
  if (!(r > 0.0)) return 0.0;
  const double edge = measure.edge();
  if (r >= edge) {
    return measure.bulk_mass() + (r >= measure.R ? measure.surface_weight : 0.0);
  }
  return measure.pot.flux(measure.d, r);
}

double energy_density(const ConstrainedMeasure& measure, double x_radius) {
  if (x_radius < 0.0) throw DomainError("radius must be non-negative");
  const CoulombKernel kernel(measure.d);
  const double edge = measure.edge();
  const double x = x_radius;

  double eps = measure.pot.v(x);
  if (x > 0.0) eps += kernel.phi(x) * measure.pot.flux(measure.d, std::min(x, edge));
  if (x < edge) {
    eps += integrate(
        [&](double r) { return kernel.phi(r) * measure.pot.flux_derivative(measure.d, r); }, x,
        edge);
  }
  if (measure.surface_weight > 0.0) {
    eps += measure.surface_weight * kernel.phi(std::max(x, measure.R));
  }
  return eps;
}

double energy_density(const RadialPotential& pot, Dimension d, double R, double x_radius) {
  const double r_star = critical_radius(pot, d);
  if (R > r_star * (1.0 + kCriticalSlack)) {
    throw DomainError("energy_density requires R <= R* (pushed or critical phase)");
  }
  return energy_density(constrained_measure(pot, d, std::min(R, r_star), r_star), x_radius);
}

EquilibriumCertificate certify_equilibrium(const ConstrainedMeasure& measure, int probes,
                                           double tol) {
  if (probes < 8) throw std::invalid_argument("certify_equilibrium needs probes >= 8");
  const CoulombKernel kernel(measure.d);
  const double R = measure.edge();

  EquilibriumCertificate cert;
  cert.tolerance = tol;
  cert.level = kernel.phi(R) + measure.pot.v(R);
  cert.min_margin_outside = std::numeric_limits<double>::infinity();

  for (int i = 0; i < probes; ++i) {
    const double x = R * static_cast<double>(i) / (probes - 1);
    cert.max_dev_inside = std::max(cert.max_dev_inside, std::abs(energy_density(measure, x) - cert.level));
  }
  cert.probe_count = probes;

  if (!measure.pushed()) {
    const double outer = 3.0 * measure.r_star;
    for (int i = 1; i <= probes; ++i) {
      const double x = R + (outer - R) * static_cast<double>(i) / probes;
      cert.min_margin_outside =
          std::min(cert.min_margin_outside, energy_density(measure, x) - cert.level);
    }
    cert.exterior_probe_count = probes;
    cert.probe_count += probes;
  }
  return cert;
}

EquilibriumCertificate certify_equilibrium(const RadialPotential& pot, Dimension d, double R,
                                           int probes, double tol) {
  const double r_star = critical_radius(pot, d);
  if (!(R > 0.0)) throw DomainError("wall radius must be positive");
  if (R > r_star * (1.0 + kCriticalSlack)) {
    throw DomainError("certify_equilibrium requires R <= R*");
  }
  return certify_equilibrium(constrained_measure(pot, d, std::min(R, r_star), r_star), probes, tol);
}

double mean_field_energy(const RadialPotential& pot, Dimension d, double R) {
  if (!(R > 0.0)) throw DomainError("wall radius must be positive");
  const double edge = std::min(R, critical_radius(pot, d));
  const CoulombKernel kernel(d);
  const int n = d.value();
  const double field = integrate(
      [&](double r) {
        const double dv = pot.dv(r);
        return ipow(r, n - 1) * dv * dv;
      },
      0.0, edge);
  return 0.5 * kernel.phi(edge) + pot.v(edge) - 0.5 * field;
}

}  // namespace coulomb
