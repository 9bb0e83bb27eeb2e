#include "coulomb/potential.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace coulomb {

double RadialPotential::flux(Dimension d, double r) const {
  return ipow(r, d.value() - 1) * dv(r);
}

double RadialPotential::flux_derivative(Dimension d, double r) const {
  const int n = d.value();
  const double tail = ipow(r, n - 1) * d2v(r);
  if (n == 1) return tail;
  return (n - 1) * ipow(r, n - 2) * dv(r) + tail;
}

RadialPotential quadratic_potential() {
  return {"quadratic",
          [](double r) { return 0.5 * r * r; },
          [](double r) { return r; },
          [](double) { return 1.0; },
          [](double) { return 0.0; }};
}

RadialPotential quartic_potential() {
  return {"quartic",
          [](double r) { return 0.25 * r * r * r * r; },
          [](double r) { return r * r * r; },
          [](double r) { return 3.0 * r * r; },
          [](double r) { return 6.0 * r; }};
}

RadialPotential linear_potential(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("linear-a potential needs a > 0");
  std::ostringstream label;
  label << "linear-a:" << a;
  return {label.str(),
          [a](double r) { return a * r; },
          [a](double) { return a; },
          [](double) { return 0.0; },
          [](double) { return 0.0; }};
}

RadialPotential potential_from_id(std::string_view id) {
  if (id == "quadratic") return quadratic_potential();
  if (id == "quartic") return quartic_potential();
  if (id == "linear-a") return linear_potential(1.0);
  constexpr std::string_view prefix = "linear-a:";
  if (id.starts_with(prefix)) {
    const std::string arg(id.substr(prefix.size()));
    std::size_t used = 0;
    double a = 0.0;
    try {
      a = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) {
      throw std::invalid_argument("bad parameter in potential id '" + std::string(id) + "'");
    }
    return linear_potential(a);
  }
  throw std::invalid_argument("unknown potential '" + std::string(id) + "'");
}

std::vector<std::string> builtin_potential_ids() {
  return {"quadratic", "quartic", "linear-a[:a]"};
}

namespace {

// Agreement of a closed-form derivative with the central difference of the
// next-lower derivative. The scale guards against exact zeros.
bool derivative_matches(const std::function<double(double)>& lower,
                        const std::function<double(double)>& exact, double r) {
  const double h = 1e-5 * r;
  const double fd = (lower(r + h) - lower(r - h)) / (2.0 * h);
  const double ex = exact(r);
  const double scale = std::max({std::abs(ex), std::abs(fd), std::abs(lower(r)) / r, 1e-300});
  return std::abs(fd - ex) <= 1e-5 * scale + 1e-12;
}

}  // namespace

ValidationReport validate_assumptions(const RadialPotential& pot, Dimension d, double r_max,
                                      int n_probe) {
  if (!(r_max > 0.0) || n_probe < 2) {
    throw std::invalid_argument("validate_assumptions needs r_max > 0 and n_probe >= 2");
  }
  ValidationReport rep;
  rep.increasing.name = "v strictly increasing";
  rep.flux_increasing.name = "r^(d-1) v' strictly increasing";
  rep.derivatives.name = "derivative consistency";
  rep.growth.name = "growth at r_max";

  const double r_min = 1e-3 * r_max;
  std::vector<double> grid(n_probe);
  for (int i = 0; i < n_probe; ++i) {
    grid[i] = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (n_probe - 1));
  }

  auto mark = [](AssumptionCheck& c, double r, std::string detail) {
    if (!c.passed) return;
    c.passed = false;
    c.first_violation = r;
    c.detail = std::move(detail);
  };

  for (int i = 0; i + 1 < n_probe; ++i) {
    const double a = grid[i];
    const double b = grid[i + 1];
    if (!(pot.v(b) > pot.v(a))) mark(rep.increasing, a, "v(r) does not increase");
    if (!(pot.flux(d, b) > pot.flux(d, a))) {
      mark(rep.flux_increasing, a, "r^(d-1) v'(r) does not increase");
    }
  }
  for (double r : grid) {
    if (!derivative_matches(pot.v, pot.dv, r)) mark(rep.derivatives, r, "dv inconsistent with v");
    if (!derivative_matches(pot.dv, pot.d2v, r)) mark(rep.derivatives, r, "d2v inconsistent with dv");
    if (!derivative_matches(pot.d2v, pot.d3v, r)) {
      mark(rep.derivatives, r, "d3v inconsistent with d2v");
    }
  }

  // For d >= 3 phi_d -> 0, so an increasing unbounded v dominates it.
  if (d.value() <= 2) {
    const double kernel = std::abs(CoulombKernel(d).phi(r_max));
    const double ratio = kernel > 0.0 ? pot.v(r_max) / kernel : INFINITY;
    if (!(ratio > kGrowthRatioThreshold)) {
      std::ostringstream msg;
      msg << "V/|phi| = " << ratio << " at r_max (threshold " << kGrowthRatioThreshold << ")";
      mark(rep.growth, r_max, msg.str());
    }
  }
  return rep;
}

}  // namespace coulomb
