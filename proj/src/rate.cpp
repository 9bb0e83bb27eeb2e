#include "coulomb/rate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coulomb/equilibrium.hpp"
#include "coulomb/errors.hpp"
#include "coulomb/quadrature.hpp"

namespace coulomb {

double excess_free_energy(const RadialPotential& pot, Dimension d, double R, double r_star) {
  if (R < 0.0 || std::isnan(R)) throw DomainError("wall radius must be non-negative");
  if (R >= r_star) return 0.0;
  const int n = d.value();
  if (R == 0.0 && n >= 2) throw DomainError("F_d(0) diverges for d >= 2");
  const double integral = integrate(
      [&](double r) {
        // r^{d-1} v'^2 - 2 v' + r^{1-d}, written without cancellation
        const double excess = pot.flux(d, r) - 1.0;
        return ipow(r, 1 - n) * excess * excess;
      },
      R, r_star);
  return 0.5 * integral;
}

double excess_free_energy(const RadialPotential& pot, Dimension d, double R) {
  return excess_free_energy(pot, d, R, critical_radius(pot, d));
}

double quadratic_closed_form(Dimension d, double R) {
  if (!(R > 0.0)) throw DomainError("wall radius must be positive");
  if (R >= 1.0) return 0.0;
  const int n = d.value();
  if (n == 2) {
    const double r2 = R * R;
    return (4.0 * r2 - r2 * r2 - 4.0 * std::log(R) - 3.0) / 8.0;
  }
  const double dm = n - 2.0;
  const double dp = n + 2.0;
  return ipow(R, 2 - n) / (2.0 * dm) - ipow(R, 2 + n) / (2.0 * dp) +
         (R * R * dm * dp - static_cast<double>(n) * n) / (2.0 * dm * dp);
}

namespace {

// Closed forms for F', F'', F''' given v' (passed separately so the left
// limit at R* can substitute v'(R*) = R*^{1-d}).
RateDerivatives pushed_derivatives(Dimension d, double R, double dv, double d2v, double d3v) {
  const int n = d.value();
  const auto phi = CoulombKernel(d).derivatives(R);
  const double p1 = ipow(R, n - 1);
  RateDerivatives out;
  out.first = 0.5 * phi.first + dv - 0.5 * p1 * dv * dv;
  out.second = 0.5 * phi.second + d2v - 0.5 * (n - 1) * ipow(R, n - 2) * dv * dv - p1 * dv * d2v;
  out.third = 0.5 * phi.third + d3v - 0.5 * (n - 1) * (n - 2) * ipow(R, n - 3) * dv * dv -
              2.0 * (n - 1) * ipow(R, n - 2) * dv * d2v - p1 * d2v * d2v - p1 * dv * d3v;
  return out;
}

}  // namespace

RateDerivatives free_energy_derivatives(const RadialPotential& pot, Dimension d, double R,
                                        double r_star) {
  if (!(R > 0.0)) throw DomainError("wall radius must be positive");
  if (R > r_star * (1.0 + 1e-12)) return {};
  auto out = pushed_derivatives(d, R, pot.dv(R), pot.d2v(R), pot.d3v(R));
  out.third_discontinuous = std::abs(R - r_star) <= 1e-12 * r_star;
  return out;
}

RateDerivatives free_energy_derivatives(const RadialPotential& pot, Dimension d, double R) {
  return free_energy_derivatives(pot, d, R, critical_radius(pot, d));
}

double third_derivative_left_limit(const RadialPotential& pot, Dimension d) {
  const double r_star = critical_radius(pot, d);
  const double dv = ipow(r_star, 1 - d.value());
  return pushed_derivatives(d, r_star, dv, pot.d2v(r_star), pot.d3v(r_star)).third;
}

double right_tail(const RadialPotential& pot, Dimension d, double R) {
  if (!(R > 0.0)) throw DomainError("radius must be positive");
  const double r_star = critical_radius(pot, d);
  if (R <= r_star) return 0.0;
  const CoulombKernel kernel(d);
  // Antiderivative of phi' + v' is phi + v.
  return (kernel.phi(R) + pot.v(R)) - (kernel.phi(r_star) + pot.v(r_star));
}

RateFunctionReport rate_report(const RadialPotential& pot, Dimension d,
                               std::span<const double> grid) {
  RateFunctionReport rep;
  rep.d = d.value();
  rep.r_star = critical_radius(pot, d);
  rep.third_left_limit = third_derivative_left_limit(pot, d);
  rep.third_jump = -rep.third_left_limit;
  for (double R : grid) {
    const auto der = free_energy_derivatives(pot, d, R, rep.r_star);
    rep.grid.push_back(R);
    rep.F.push_back(excess_free_energy(pot, d, R, rep.r_star));
    rep.dF.push_back(der.first);
    rep.d2F.push_back(der.second);
    rep.d3F.push_back(der.third);
  }
  return rep;
}

double richardson_extrapolate(std::span<const double> h, std::span<const double> values) {
  if (h.size() != values.size() || h.empty()) {
    throw std::invalid_argument("richardson_extrapolate needs matching non-empty inputs");
  }
  std::vector<double> p(values.begin(), values.end());
  const std::size_t n = p.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      const double hi = h[i - level];
      const double lo = h[i];
      p[i] = (hi * p[i] - lo * p[i - 1]) / (hi - lo);
      if (i == level) break;
    }
  }
  return p[n - 1];
}

RateFunctionReport transition_scan(const RadialPotential& pot, Dimension d,
                                   std::span<const double> h_values) {
  RateFunctionReport rep;
  rep.d = d.value();
  rep.r_star = critical_radius(pot, d);
  rep.third_left_limit = third_derivative_left_limit(pot, d);
  rep.third_jump = -rep.third_left_limit;

  auto record = [&](double R, double F) {
    const auto der = free_energy_derivatives(pot, d, R, rep.r_star);
    rep.grid.push_back(R);
    rep.F.push_back(F);
    rep.dF.push_back(der.first);
    rep.d2F.push_back(der.second);
    rep.d3F.push_back(der.third);
  };

  std::vector<double> hs;
  std::vector<double> thirds;
  for (double h : h_values) {
    if (!(h > 0.0)) throw std::invalid_argument("step sizes must be positive");
    if (!(3.0 * h < rep.r_star)) throw std::invalid_argument("step size too large for R*");
    double left[4];
    double right[4];
    for (int k = 0; k < 4; ++k) {
      left[k] = excess_free_energy(pot, d, rep.r_star - k * h, rep.r_star);
      right[k] = excess_free_energy(pot, d, rep.r_star + k * h, rep.r_star);
    }
    for (int k = 3; k >= 1; --k) record(rep.r_star - k * h, left[k]);
    for (int k = 1; k <= 3; ++k) record(rep.r_star + k * h, right[k]);

    ScanRow row;
    row.h = h;
    row.cubic_ratio = left[1] / (h * h * h);
    row.left_d1 = (left[0] - left[1]) / h;
    row.left_d2 = (left[0] - 2.0 * left[1] + left[2]) / (h * h);
    row.left_d3 = (left[0] - 3.0 * left[1] + 3.0 * left[2] - left[3]) / (h * h * h);
    row.right_d1 = (right[1] - right[0]) / h;
    row.right_d2 = (right[2] - 2.0 * right[1] + right[0]) / (h * h);
    row.right_d3 = (right[3] - 3.0 * right[2] + 3.0 * right[1] - right[0]) / (h * h * h);
    rep.scan.push_back(row);
    hs.push_back(h);
    thirds.push_back(row.left_d3);
  }
  record(rep.r_star, 0.0);
  std::vector<std::size_t> order(rep.grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rep.grid[a] < rep.grid[b]; });
  auto permute = [&](std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (auto i : order) out.push_back(v[i]);
    v = std::move(out);
  };
  for (auto* v : {&rep.grid, &rep.F, &rep.dF, &rep.d2F, &rep.d3F}) permute(*v);
  if (hs.size() >= 2) rep.extrapolated_left_third = richardson_extrapolate(hs, thirds);
  return rep;
}

}  // namespace coulomb
