#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "coulomb/equilibrium.hpp"
#include "coulomb/oracle.hpp"
#include "coulomb/rate.hpp"

using namespace coulomb;

namespace {

// Projection onto the simplex by bisection on the shift tau solving
// sum max(x_i - tau, 0) = 1.
std::vector<double> project_by_bisection(const std::vector<double>& x) {
  double lo = *std::min_element(x.begin(), x.end()) - 1.0;
  double hi = *std::max_element(x.begin(), x.end());
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double s = 0.0;
    for (double v : x) s += std::max(v - mid, 0.0);
    (s > 1.0 ? lo : hi) = mid;
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::max(x[i] - 0.5 * (lo + hi), 0.0);
  return out;
}

std::vector<double> random_simplex_point(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> e;
  std::vector<double> w(n);
  for (double& x : w) x = e(rng);
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= s;
  return w;
}

double energy(const EnergyModel& m, const std::vector<double>& w) {
  Eigen::Map<const Eigen::VectorXd> v(w.data(), static_cast<Eigen::Index>(w.size()));
  return 0.5 * v.dot(m.K * v) + m.u.dot(v);
}

}  // namespace

TEST_CASE("grid nodes") {
  auto g = RadialGrid::uniform(2.0, 4);
  REQUIRE(g.nodes.size() == 4);
  CHECK(g.nodes[0] == doctest::Approx(0.25));
  CHECK(g.nodes[3] == doctest::Approx(1.75));
  CHECK(g.cell_width() == 0.5);
  CHECK(std::is_sorted(g.nodes.begin(), g.nodes.end()));
  CHECK(g.nodes.front() > 0.0);
  CHECK(g.nodes.back() < 2.0);
}

TEST_CASE("assembled energy examples") {
  auto m3 = assemble_energy(quadratic_potential(), Dimension(3), RadialGrid::uniform(1.0, 2));
  CHECK(m3.K(0, 0) == doctest::Approx(4.0));
  CHECK(m3.K(0, 1) == doctest::Approx(4.0 / 3.0));
  CHECK(m3.K(1, 0) == doctest::Approx(4.0 / 3.0));
  CHECK(m3.K(1, 1) == doctest::Approx(4.0 / 3.0));

  auto g2 = RadialGrid::uniform(1.0, 10);
  auto m2 = assemble_energy(quadratic_potential(), Dimension(2), g2);
  CHECK(m2.K(0, 0) == doctest::Approx(-std::log(g2.nodes[0])));
  CHECK((m2.K - m2.K.transpose()).norm() == 0.0);

  auto m1 = assemble_energy(quadratic_potential(), Dimension(1), RadialGrid::uniform(1.0, 1));
  CHECK(m1.K(0, 0) == doctest::Approx(-0.5));
  CHECK(m1.u(0) == doctest::Approx(0.125));
}

TEST_CASE("shell operator matches the dense matrix") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int d : {1, 2, 3, 5}) {
    const auto grid = RadialGrid::uniform(0.8, 37);
    const auto dense = assemble_energy(quadratic_potential(), Dimension(d), grid);
    const ShellOperator op(Dimension(d), grid);
    std::vector<double> w(37), out(37);
    for (double& x : w) x = gauss(rng);
    op.apply(w, out);
    Eigen::Map<const Eigen::VectorXd> wv(w.data(), 37);
    const Eigen::VectorXd ref = dense.K * wv;
    for (int i = 0; i < 37; ++i) CHECK(out[i] == doctest::Approx(ref(i)).epsilon(1e-12));
    CHECK(op.quadratic_form(w) == doctest::Approx(wv.dot(ref)).epsilon(1e-12));
  }
}

TEST_CASE("simplex projection") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(1 + trial % 17);
    for (double& v : x) v = gauss(rng);
    const auto ref = project_by_bisection(x);
    project_to_simplex(x);
    CHECK(std::accumulate(x.begin(), x.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(x[i] >= 0.0);
      CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-10));
    }
    auto again = x;
    project_to_simplex(again);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(again[i] == doctest::Approx(x[i]).epsilon(1e-14));
  }
}

TEST_CASE("kkt residual") {
  const std::vector<double> w{0.5, 0.5, 0.0};
  CHECK(simplex_kkt_residual(w, std::vector<double>{1.0, 1.0, 2.0}) == 0.0);
  // A cheaper empty cell is a violation.
  CHECK(simplex_kkt_residual(w, std::vector<double>{1.0, 1.0, 0.25}) == doctest::Approx(0.75));
  // Unequal gradients on the support.
  CHECK(simplex_kkt_residual(w, std::vector<double>{1.0, 1.5, 2.0}) == doctest::Approx(0.5));
}

TEST_CASE("energy is strictly convex along random simplex chords") {
  std::mt19937_64 rng(2024);
  for (int d : {1, 2, 3}) {
    const auto m = assemble_energy(quadratic_potential(), Dimension(d), RadialGrid::uniform(0.7, 60));
    for (int trial = 0; trial < 100; ++trial) {
      const auto a = random_simplex_point(rng, 60);
      const auto b = random_simplex_point(rng, 60);
      std::vector<double> mid(60);
      for (int i = 0; i < 60; ++i) mid[i] = 0.5 * (a[i] + b[i]);
      CHECK(energy(m, mid) < 0.5 * energy(m, a) + 0.5 * energy(m, b) + 1e-14);
    }
  }
}

TEST_CASE("the log kernel matrix on the tangent space") {
  // Quadratic form on sum-zero vectors is what matters for convexity on the
  // simplex; the full matrix may still have a negative eigenvalue.
  const int n = 40;
  const auto m = assemble_energy(quadratic_potential(), Dimension(2), RadialGrid::uniform(2.0, n));
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tangent(P * m.K * P);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(m.K);
  MESSAGE("d=2, R=2: smallest eigenvalue of K = " << full.eigenvalues()(0));
  // One eigenvalue of P K P is the zero from the constant direction.
  CHECK(tangent.eigenvalues()(1) > 0.0);
}

TEST_CASE("zero iterations returns the uniform start") {
  auto res = minimize(quadratic_potential(), Dimension(2), 0.5, 16, 0);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 0);
  for (double w : res.measure.w) CHECK(w == doctest::Approx(1.0 / 16));
  CHECK(res.kkt_residual > 0.0);
  CHECK_THROWS(minimize(quadratic_potential(), Dimension(2), 0.5, 8));
}

TEST_CASE("pushed d = 2 gas on 2000 cells") {
  const auto q = quadratic_potential();
  auto res = minimize(q, Dimension(2), 0.5, 2000, kOracleMaxIter, kOracleTol, true);
  CHECK(res.converged);
  CHECK(res.kkt_residual <= kOracleTol);
  CHECK(std::accumulate(res.measure.w.begin(), res.measure.w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  const double analytic = mean_field_energy(q, Dimension(2), 0.5);
  CHECK(analytic == doctest::Approx(0.375 + quadratic_closed_form(Dimension(2), 0.5)).epsilon(1e-12));
  CHECK(std::abs(res.energy - analytic) <= 1e-3);
  CHECK(res.energy >= analytic - 1e-6);
  CHECK(std::abs(res.measure.w.back() - 0.75) <= 0.01);
  for (std::size_t i = 1; i < res.energy_trace.size(); ++i) {
    CHECK(res.energy_trace[i] <= res.energy_trace[i - 1]);
  }
}

TEST_CASE("pulled d = 1 gas leaves the outer cells empty") {
  auto res = minimize(quadratic_potential(), Dimension(1), 2.0, 2000);
  CHECK(res.converged);
  double outside = 0.0;
  for (int i = 0; i < 2000; ++i) {
    if (res.measure.grid.nodes[i] > 1.0) outside += res.measure.w[i];
  }
  CHECK(outside <= 0.01);
}

TEST_CASE("comparison with the analytic measure") {
  const auto q = quadratic_potential();
  {
    auto res = minimize(q, Dimension(3), 0.5, 2000);
    auto cmp = compare_to_analytic(res, q, Dimension(3), 0.5);
    CHECK(cmp.energy_gap <= 2e-3);
    CHECK(cmp.surface_gap <= 1e-2);
    CHECK(cmp.analytic_surface == doctest::Approx(0.875));
  }
  {
    auto res = minimize(q, Dimension(2), 1.0, 2000);
    auto cmp = compare_to_analytic(res, q, Dimension(2), 1.0);
    CHECK(cmp.analytic_surface == 0.0);
    CHECK(cmp.surface_gap <= 1e-2);
  }
  {
    auto res = minimize(q, Dimension(1), 0.3, 4000);
    auto cmp = compare_to_analytic(res, q, Dimension(1), 0.3);
    CHECK(cmp.bulk_l1 <= 5e-3);
  }
}

TEST_CASE("refinement shrinks the energy gap") {
  const auto q = quadratic_potential();
  const double coarse = compare_to_analytic(minimize(q, Dimension(2), 0.5, 1000), q, Dimension(2), 0.5).energy_gap;
  const double fine = compare_to_analytic(minimize(q, Dimension(2), 0.5, 2000), q, Dimension(2), 0.5).energy_gap;
  MESSAGE("energy gap n=1000: " << coarse << ", n=2000: " << fine);
  CHECK(coarse >= 1.5 * fine);
}
