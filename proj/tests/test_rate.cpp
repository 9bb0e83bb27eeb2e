#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "coulomb/equilibrium.hpp"
#include "coulomb/errors.hpp"
#include "coulomb/rate.hpp"

using namespace coulomb;

TEST_CASE("excess free energy examples") {
  const auto q = quadratic_potential();
  CHECK(excess_free_energy(q, Dimension(1), 0.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(excess_free_energy(q, Dimension(2), 0.5) == doctest::Approx(0.0887611).epsilon(1e-6));
  CHECK(excess_free_energy(q, Dimension(7), 1.5) == 0.0);
  CHECK(excess_free_energy(q, Dimension(3), 1.0) == 0.0);
  CHECK_THROWS_AS(excess_free_energy(q, Dimension(2), 0.0), DomainError);
  CHECK_THROWS_AS(excess_free_energy(q, Dimension(1), -0.1), DomainError);
}

TEST_CASE("quadratic closed form examples") {
  // 1/(2R) - R^5/10 + (5R^2 - 9)/10 at R = 1/2 is 1 - 1/320 - 31/40.
  CHECK(quadratic_closed_form(Dimension(3), 0.5) == doctest::Approx(0.221875).epsilon(1e-14));
  CHECK(quadratic_closed_form(Dimension(1), 0.5) == doctest::Approx(0.125 / 6).epsilon(1e-14));
  CHECK(quadratic_closed_form(Dimension(2), 1.0) == 0.0);
  CHECK(quadratic_closed_form(Dimension(4), 1.3) == 0.0);
  for (int d = 1; d <= 15; ++d) CHECK(std::abs(quadratic_closed_form(Dimension(d), 1.0)) <= 1e-14);
}

TEST_CASE("closed form agrees with quadrature") {
  const auto q = quadratic_potential();
  for (int d : {1, 2, 3, 4, 5}) {
    for (double R : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.2}) {
      const double F = excess_free_energy(q, Dimension(d), R);
      CHECK(std::abs(F - quadratic_closed_form(Dimension(d), R)) <= 1e-9 * std::max(1.0, F));
    }
  }
}

TEST_CASE("d = 1 quadratic is exactly cubic") {
  const auto q = quadratic_potential();
  for (double R = 0.0; R <= 1.0; R += 0.05) {
    CHECK(std::abs(excess_free_energy(q, Dimension(1), R) - std::pow(1 - R, 3) / 6) <= 1e-14);
  }
}

TEST_CASE("GinUE rate at beta = 2") {
  const auto q = quadratic_potential();
  for (double R : {0.01, 0.1, 0.25, 0.5, 0.75, 0.99, 1.0}) {
    const double ginue = 0.25 * (4 * R * R - std::pow(R, 4) - 4 * std::log(R) - 3);
    CHECK(std::abs(2 * excess_free_energy(q, Dimension(2), R) - ginue) <= 1e-12);
  }
}

TEST_CASE("derivative examples") {
  const auto q = quadratic_potential();
  auto at_star = free_energy_derivatives(q, Dimension(2), 1.0);
  CHECK(std::abs(at_star.first) <= 1e-14);
  CHECK(std::abs(at_star.second) <= 1e-14);
  CHECK(at_star.third == doctest::Approx(-4.0));
  CHECK(at_star.third_discontinuous);

  auto d1 = free_energy_derivatives(q, Dimension(1), 0.5);
  CHECK(d1.first == doctest::Approx(-0.125));
  CHECK(d1.second == doctest::Approx(0.5));
  CHECK(d1.third == doctest::Approx(-1.0));
  CHECK_FALSE(d1.third_discontinuous);

  for (int d : {1, 2, 3}) {
    auto pulled = free_energy_derivatives(quartic_potential(), Dimension(d), 2.0);
    CHECK(pulled.first == 0.0);
    CHECK(pulled.second == 0.0);
    CHECK(pulled.third == 0.0);
  }
}

TEST_CASE("analytic derivatives match finite differences of F") {
  for (const auto& pot : {quadratic_potential(), quartic_potential(), linear_potential(0.8)}) {
    for (int d : {1, 2, 3, 5}) {
      if (d == 1 && pot.label.starts_with("linear")) continue;
      const Dimension dim(d);
      const double R = 0.7 * critical_radius(pot, dim);
      const double h = 1e-4 * R;
      auto F = [&](double r) { return excess_free_energy(pot, dim, r); };
      const auto at = free_energy_derivatives(pot, dim, R);
      const auto up = free_energy_derivatives(pot, dim, R + h);
      const auto dn = free_energy_derivatives(pot, dim, R - h);
      CAPTURE(pot.label);
      CAPTURE(d);
      CHECK(std::abs((F(R + h) - F(R - h)) / (2 * h) - at.first) <= 1e-5 * std::abs(at.first));
      CHECK(std::abs((up.first - dn.first) / (2 * h) - at.second) <= 1e-5 * std::abs(at.second));
      CHECK(std::abs((up.second - dn.second) / (2 * h) - at.third) <= 1e-5 * std::abs(at.third));
    }
  }
}

TEST_CASE("F is C2 at the critical radius") {
  for (const auto& pot : {quadratic_potential(), quartic_potential(), linear_potential(0.8)}) {
    for (int d : {1, 2, 3, 5}) {
      if (d == 1 && pot.label.starts_with("linear")) continue;
      const auto left = free_energy_derivatives(pot, Dimension(d), critical_radius(pot, Dimension(d)));
      CHECK(std::abs(left.first) <= 1e-10);
      CHECK(std::abs(left.second) <= 1e-10);
    }
  }
}

TEST_CASE("third derivative left limit") {
  for (int d = 1; d <= 15; ++d) {
    CHECK(third_derivative_left_limit(quadratic_potential(), Dimension(d)) ==
          doctest::Approx(-static_cast<double>(d * d)).epsilon(1e-12));
  }
  // v = r^4/4: F'(R) = -(R^3 - 1)^2 / (2 R^{d-1}) near R* = 1 gives -(d + 2)^2.
  CHECK(third_derivative_left_limit(quartic_potential(), Dimension(1)) == doctest::Approx(-9.0));
  CHECK(third_derivative_left_limit(quartic_potential(), Dimension(2)) == doctest::Approx(-16.0));
  CHECK(third_derivative_left_limit(quartic_potential(), Dimension(3)) == doctest::Approx(-25.0));
  CHECK(third_derivative_left_limit(linear_potential(0.8), Dimension(3)) < 0.0);
}

TEST_CASE("quartic left limit by finite differences of quadrature F") {
  const auto pot = quartic_potential();
  const Dimension dim(1);
  // Backward third difference anchored at R*, two step sizes, linear extrapolation.
  auto third = [&](double h) {
    auto F = [&](double r) { return excess_free_energy(pot, dim, r); };
    return (F(1.0) - 3 * F(1.0 - h) + 3 * F(1.0 - 2 * h) - F(1.0 - 3 * h)) / (h * h * h);
  };
  const double t1 = third(2e-3);
  const double t2 = third(1e-3);
  CHECK((2 * t2 - t1) == doctest::Approx(-9.0).epsilon(1e-3));
}

TEST_CASE("right tail") {
  const auto q = quadratic_potential();
  CHECK(right_tail(q, Dimension(3), 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(right_tail(q, Dimension(2), 2.0) == doctest::Approx(1.5 - std::log(2.0)).epsilon(1e-14));
  for (int d : {1, 2, 3}) {
    CHECK(right_tail(q, Dimension(d), 1.0) == 0.0);
    CHECK(right_tail(q, Dimension(d), 0.5) == 0.0);
  }
}

TEST_CASE("right tail against quadrature, and monotone") {
  using boost::math::quadrature::gauss;
  for (const auto& pot : {quadratic_potential(), quartic_potential()}) {
    for (int d : {1, 2, 3, 5}) {
      const Dimension dim(d);
      const CoulombKernel k(dim);
      const double rs = critical_radius(pot, dim);
      const double direct = gauss<double, 30>::integrate(
          [&](double r) { return k.derivatives(r).first + pot.dv(r); }, rs, 2.5 * rs);
      CHECK(right_tail(pot, dim, 2.5 * rs) == doctest::Approx(direct).epsilon(1e-12));
      double prev = -1.0;
      for (int i = 0; i < 100; ++i) {
        const double h = right_tail(pot, dim, rs * (1 + 2.0 * i / 99));
        CHECK(h >= prev);
        prev = h;
      }
    }
  }
}

TEST_CASE("transition scan on the quadratic potential") {
  const auto q = quadratic_potential();
  const std::vector<double> h2{1e-3};
  auto d2 = transition_scan(q, Dimension(2), h2);
  CHECK(d2.scan.front().cubic_ratio == doctest::Approx(4.0 / 6.0).epsilon(1e-2));

  const std::vector<double> h1{1e-2};
  auto d1 = transition_scan(q, Dimension(1), h1);
  CHECK(d1.scan.front().cubic_ratio == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  const std::vector<double> hs{1e-2, 1e-3, 1e-4};
  auto d3 = transition_scan(q, Dimension(3), hs);
  REQUIRE(d3.scan.size() == 3);
  for (const auto& row : d3.scan) {
    CHECK(row.right_d1 == 0.0);
    CHECK(row.right_d2 == 0.0);
    CHECK(row.right_d3 == 0.0);
    CHECK(std::abs(row.left_d3 + 9.0) <= 50.0 * row.h);
  }
  // First-order convergence: error shrinks roughly tenfold per decade.
  const double e1 = std::abs(d3.scan[0].left_d3 + 9.0);
  const double e2 = std::abs(d3.scan[1].left_d3 + 9.0);
  CHECK(e2 < 0.2 * e1);
  REQUIRE(d3.extrapolated_left_third.has_value());
  CHECK(*d3.extrapolated_left_third == doctest::Approx(-9.0).epsilon(1e-4));
  CHECK(d3.third_jump == doctest::Approx(9.0));
}

TEST_CASE("richardson extrapolation is exact on polynomials") {
  const std::vector<double> h{0.1, 0.05, 0.025};
  std::vector<double> v;
  for (double x : h) v.push_back(3.0 - 2.0 * x + 7.0 * x * x);
  CHECK(richardson_extrapolate(h, v) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("rate report invariants") {
  std::vector<double> grid;
  for (int i = 0; i < 60; ++i) grid.push_back(0.05 + 1.45 * i / 59);
  for (const auto& pot : {quadratic_potential(), quartic_potential()}) {
    for (int d : {1, 2, 3, 5}) {
      const auto rep = rate_report(pot, Dimension(d), grid);
      REQUIRE(rep.F.size() == grid.size());
      CHECK(rep.third_jump > 0.0);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(rep.F[i] >= 0.0);
        if (grid[i] >= rep.r_star) {
          CHECK(rep.F[i] == 0.0);
          CHECK(rep.dF[i] == 0.0);
        } else {
          CHECK(rep.dF[i] <= 0.0);
        }
      }
    }
  }
}
