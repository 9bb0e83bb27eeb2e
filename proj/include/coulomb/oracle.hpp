#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "coulomb/kernel.hpp"
#include "coulomb/potential.hpp"

namespace coulomb {

/// Uniform radial cells on [0, R] with mass carried at the centers
/// r_i = (i - 1/2) R / n, so no node sits on the kernel singularity.
struct RadialGrid {
  double R = 0.0;
  int n = 0;
  std::vector<double> nodes;

  static RadialGrid uniform(double R, int n);
  double cell_width() const { return R / n; }
};

struct DiscretizedMeasure {
  RadialGrid grid;
  std::vector<double> w;  // nonnegative, sums to one
};

/// Discrete functional E(w) = 1/2 w^T K w + u^T w with the exact shell-shell
/// interaction K_ij = phi_d(max(r_i, r_j)) (diagonal = shell self-energy).
struct EnergyModel {
  Eigen::MatrixXd K;
  Eigen::VectorXd u;
};

EnergyModel assemble_energy(const RadialPotential& pot, Dimension d, const RadialGrid& grid);

/// Matrix-free K: (K w)_i = phi_i sum_{j<=i} w_j + sum_{j>i} phi_j w_j, O(n).
class ShellOperator {
 public:
  ShellOperator(Dimension d, const RadialGrid& grid);

  void apply(std::span<const double> w, std::span<double> out) const;
  double quadratic_form(std::span<const double> w) const;
  std::size_t size() const { return phi_.size(); }

 private:
  std::vector<double> phi_;
};

/// Euclidean projection onto the probability simplex (sort-based, exact).
void project_to_simplex(std::span<double> x);

/// max_i (C - g_i)_+ + max_{w_i > 0} |g_i - C|, C = min_{w_i > 0} g_i.
double simplex_kkt_residual(std::span<const double> w, std::span<const double> g);

inline constexpr int kOracleMaxIter = 200000;
inline constexpr double kOracleTol = 1e-8;

struct OracleResult {
  DiscretizedMeasure measure;
  double energy = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
  /// Energy of every accepted iterate (index 0: the uniform start).
  std::vector<double> energy_trace;
};

/// Minimizes E over the simplex by projected gradient steps with Nesterov
/// momentum (monotone variant with adaptive restart). Steps start at 1/L,
/// L from the power method on K, and halve until the quadratic upper bound
/// holds. Stops when the KKT residual is <= tol or at max_iter.
OracleResult minimize(const RadialPotential& pot, Dimension d, double R, int n,
                      int max_iter = kOracleMaxIter, double tol = kOracleTol,
                      bool keep_trace = false);

struct ComparisonReport {
  double analytic_energy = 0.0;
  double energy_gap = 0.0;        // |E(w*) - E_d[rho_min(R,R*)]|
  double bulk_l1 = 0.0;           // sum over bulk cells of |w_i - int_cell m|
  double analytic_surface = 0.0;  // 1 - R^{d-1} v'(R), or 0 when pulled
  double surface_gap = 0.0;       // |w_n - analytic_surface|
};

/// Compares a converged oracle result with the analytic constrained measure.
/// In the pushed phase the last cell holds the atom and is excluded from
/// bulk_l1.
ComparisonReport compare_to_analytic(const OracleResult& result, const RadialPotential& pot,
                                     Dimension d, double R);

}  // namespace coulomb
