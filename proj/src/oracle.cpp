#include "coulomb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "coulomb/equilibrium.hpp"
#include "coulomb/errors.hpp"

namespace coulomb {

RadialGrid RadialGrid::uniform(double R, int n) {
  if (!(R > 0.0)) throw DomainError("grid radius must be positive");
  if (n < 1) throw std::invalid_argument("grid needs at least one cell");
  RadialGrid g{R, n, std::vector<double>(n)};
  for (int i = 0; i < n; ++i) g.nodes[i] = (i + 0.5) * R / n;
  return g;
}

EnergyModel assemble_energy(const RadialPotential& pot, Dimension d, const RadialGrid& grid) {
  const CoulombKernel kernel(d);
  const int n = grid.n;
  EnergyModel m{Eigen::MatrixXd(n, n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    m.u(i) = pot.v(grid.nodes[i]);
    for (int j = 0; j < n; ++j) m.K(i, j) = kernel.phi(std::max(grid.nodes[i], grid.nodes[j]));
  }
  return m;
}

ShellOperator::ShellOperator(Dimension d, const RadialGrid& grid) : phi_(grid.nodes.size()) {
  const CoulombKernel kernel(d);
  for (std::size_t i = 0; i < phi_.size(); ++i) phi_[i] = kernel.phi(grid.nodes[i]);
}

void ShellOperator::apply(std::span<const double> w, std::span<double> out) const {
  const std::size_t n = phi_.size();
  double tail = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    out[k] = tail;
    tail += phi_[k] * w[k];
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mass += w[i];
    out[i] += phi_[i] * mass;
  }
}

double ShellOperator::quadratic_form(std::span<const double> w) const {
  std::vector<double> kw(w.size());
  apply(w, kw);
  return std::inner_product(w.begin(), w.end(), kw.begin(), 0.0);
}

void project_to_simplex(std::span<double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    cumulative += s[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (s[k] - t > 0.0) theta = t;
  }
  for (double& xi : x) xi = std::max(xi - theta, 0.0);
}

double simplex_kkt_residual(std::span<const double> w, std::span<const double> g) {
  double level = INFINITY;
  double support_max = -INFINITY;
  double global_min = INFINITY;
  for (std::size_t i = 0; i < w.size(); ++i) {
    global_min = std::min(global_min, g[i]);
    if (w[i] > 0.0) {
      level = std::min(level, g[i]);
      support_max = std::max(support_max, g[i]);
    }
  }
  return std::max(0.0, level - global_min) + (support_max - level);
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Only gradient differences matter on the simplex; shifting by the minimum
// keeps g . delta free of the C * sum(delta) rounding term.
void shift_to_min(std::vector<double>& g) {
  const double m = *std::min_element(g.begin(), g.end());
  for (double& x : g) x -= m;
}

double largest_eigenvalue(const ShellOperator& K) {
  const std::size_t n = K.size();
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    K.apply(x, y);
    const double norm = std::sqrt(dot(y, y));
    if (norm == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    if (std::abs(norm - lambda) <= 1e-10 * norm) {
      lambda = norm;
      break;
    }
    lambda = norm;
  }
  return lambda;
}

}  // namespace

OracleResult minimize(const RadialPotential& pot, Dimension d, double R, int n, int max_iter,
                      double tol, bool keep_trace) {
  if (n < 16) throw std::invalid_argument("oracle needs n >= 16 cells");
  if (!(R > 0.0)) throw DomainError("wall radius must be positive");
  if (max_iter < 0) throw std::invalid_argument("max_iter must be non-negative");

  const auto grid = RadialGrid::uniform(R, n);
  const ShellOperator K(d, grid);
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = pot.v(grid.nodes[i]);

  auto gradient = [&](std::span<const double> x, std::vector<double>& g) {
    K.apply(x, g);
    for (int i = 0; i < n; ++i) g[i] += u[i];
  };
  auto energy_of = [&](std::span<const double> x) { return 0.5 * K.quadratic_form(x) + dot(u, x); };

  std::vector<double> w(n, 1.0 / n);
  std::vector<double> y = w;
  std::vector<double> z(n), delta(n), k_delta(n), step(n), k_step(n);
  std::vector<double> gw(n), gy(n), g_true(n);
  gradient(w, gw);
  shift_to_min(gw);

  const double lipschitz = largest_eigenvalue(K);
  double momentum = 1.0;
  double energy = energy_of(w);

  OracleResult res;
  if (keep_trace) res.energy_trace.push_back(energy);

  int it = 0;
  int stalled = 0;
  gradient(w, g_true);
  res.kkt_residual = simplex_kkt_residual(w, g_true);
  res.converged = res.kkt_residual <= tol && max_iter > 0;

  for (; it < max_iter && !res.converged; ++it) {
    gradient(y, gy);
    shift_to_min(gy);

    double s = 1.0 / lipschitz;
    for (int halvings = 0;; ++halvings) {
      for (int i = 0; i < n; ++i) z[i] = y[i] - s * gy[i];
      project_to_simplex(z);
      for (int i = 0; i < n; ++i) delta[i] = z[i] - y[i];
      K.apply(delta, k_delta);
      if (dot(delta, k_delta) <= dot(delta, delta) / s * (1.0 + 1e-12) || halvings >= 60) break;
      s *= 0.5;
    }

    for (int i = 0; i < n; ++i) step[i] = z[i] - w[i];
    K.apply(step, k_step);
    const double change = dot(gw, step) + 0.5 * dot(step, k_step);
    const bool accept = change <= 0.0;
    const bool restart = !accept || dot(gy, step) > 0.0;

    const double next_momentum = restart ? 1.0 : 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    if (accept) {
      if (restart) {
        y = z;
      } else {
        for (int i = 0; i < n; ++i) {
          y[i] = z[i] + ((momentum - 1.0) / next_momentum) * step[i];
        }
      }
      w.swap(z);
      energy += change;
      if ((it + 1) % 100 == 0) {
        gradient(w, gw);
      } else {
        for (int i = 0; i < n; ++i) gw[i] += k_step[i];
      }
      shift_to_min(gw);
      if (keep_trace) res.energy_trace.push_back(energy);
      stalled = 0;
    } else {
      y = w;
      if (++stalled > 50) {
        ++it;
        break;
      }
    }
    momentum = next_momentum;
    res.kkt_residual = simplex_kkt_residual(w, gw);
    res.converged = res.kkt_residual <= tol;
  }

  gradient(w, g_true);
  res.kkt_residual = simplex_kkt_residual(w, g_true);
  res.converged = max_iter > 0 && res.kkt_residual <= tol;
  res.iterations = it;
  res.energy = energy_of(w);
  res.measure = DiscretizedMeasure{grid, std::move(w)};
  return res;
}

ComparisonReport compare_to_analytic(const OracleResult& result, const RadialPotential& pot,
                                     Dimension d, double R) {
  const auto measure = constrained_measure(pot, d, R);
  const auto& grid = result.measure.grid;
  const auto& w = result.measure.w;
  const double h = grid.cell_width();

  ComparisonReport rep;
  rep.analytic_energy = mean_field_energy(pot, d, R);
  rep.energy_gap = std::abs(result.energy - rep.analytic_energy);
  rep.analytic_surface = measure.surface_weight;
  rep.surface_gap = std::abs(w.back() - rep.analytic_surface);

  const int bulk_cells = measure.pushed() ? grid.n - 1 : grid.n;
  auto bulk_cdf = [&](double r) { return r >= measure.edge() ? measure.bulk_mass() : radial_cdf(measure, r); };
  for (int i = 0; i < bulk_cells; ++i) {
    const double expected = bulk_cdf((i + 1) * h) - bulk_cdf(i * h);
    rep.bulk_l1 += std::abs(w[i] - expected);
  }
  return rep;
}

}  // namespace coulomb
