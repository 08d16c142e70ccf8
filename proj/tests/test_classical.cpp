#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lel/classical.hpp"
#include "oracles.hpp"

using namespace lel::classical;

namespace {

PhaseGrid demo_grid() { return {128, 64, 2.0 * std::numbers::pi / 128, 0.05}; }

PhaseSpaceDensity gaussian(const PhaseGrid& g, double q0, double p0, double sq, double sp) {
  Eigen::MatrixXd v(g.np, g.nq);
  for (int j = 0; j < g.np; ++j)
    for (int i = 0; i < g.nq; ++i)
      v(j, i) = std::exp(-0.5 * std::pow((g.q(i) - q0) / sq, 2) -
                         0.5 * std::pow((g.p(j) - p0) / sp, 2));
  return PhaseSpaceDensity::normalized(g, v);
}

double max_diff(const BetaMarginal& a, const BetaMarginal& b) {
  return (a.density - b.density).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("phase grid and density validation") {
  const PhaseGrid g = demo_grid();
  CHECK(g.p(31) == doctest::Approx(-0.025));
  CHECK(g.p(32) == doctest::Approx(0.025));
  for (int j = 0; j < g.np; ++j) CHECK(std::abs(g.p(j)) >= g.p_min());
  CHECK_THROWS_AS((PhaseGrid{4, 3, 1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS(PhaseSpaceDensity(g, Eigen::MatrixXd::Zero(g.np, g.nq)), lel::InvariantError);
  Eigen::MatrixXd neg = Eigen::MatrixXd::Constant(g.np, g.nq, 1.0 / (g.np * g.nq * g.dq * g.dp));
  neg(0, 0) = -1e-3;
  CHECK_THROWS_AS(PhaseSpaceDensity(g, neg), lel::InvariantError);
}

TEST_CASE("free flow") {
  SUBCASE("t = 0 is the identity") {
    const auto rho = gaussian(demo_grid(), 3.0, 0.4, 0.5, 0.3);
    CHECK(classical_free_flow(rho, 0.0).values() == rho.values());
  }
  SUBCASE("a single cell moves to q0 + 2 p0 t on the same row") {
    const PhaseGrid g{200, 20, 0.05, 0.1};
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(g.np, g.nq);
    const int row = 12, col = 50;  // p0 = 0.25, q0 = 2.5
    v(row, col) = 1.0;
    const auto rho = PhaseSpaceDensity::normalized(g, v);
    const auto moved = classical_free_flow(rho, 1.0);
    CHECK(moved.values().row(row).sum() == doctest::Approx(rho.values().row(row).sum()));
    double centroid = 0.0;
    for (int i = 0; i < g.nq; ++i) centroid += g.q(i) * moved.values()(row, i);
    centroid /= moved.values().row(row).sum();
    CHECK(centroid == doctest::Approx(2.5 + 2 * 0.25 * 1.0).epsilon(1e-12));
    // Fractional shift splits between neighbours without moving the centroid.
    const auto frac = classical_free_flow(rho, 0.13);
    double c2 = 0.0;
    for (int i = 0; i < g.nq; ++i) c2 += g.q(i) * frac.values()(row, i);
    c2 /= frac.values().row(row).sum();
    CHECK(c2 == doctest::Approx(2.5 + 2 * 0.25 * 0.13).epsilon(1e-12));
  }
  SUBCASE("Gaussian: mass and p-marginal preserved") {
    const auto rho = gaussian(demo_grid(), 3.0, 0.2, 0.6, 0.4);
    const auto before = classical_reduce(rho);
    auto cur = rho;
    for (int k = 0; k < 10; ++k) {
      cur = classical_free_flow(cur, 0.5);
      CHECK(std::abs(cur.mass() - 1.0) <= 1e-6);
      CHECK(max_diff(classical_reduce(cur), before) <= 1e-8);
      CHECK(std::abs(classical_effective_entropy(classical_reduce(cur)) -
                     classical_effective_entropy(before)) <= 1e-6);
    }
  }
}

TEST_CASE("xi-beta chart translates under free flow") {
  auto [xi, beta] = xi_beta_coordinates(0.0, 1.0, 0.025);
  CHECK(xi == 0.0);
  CHECK(beta == 1.0);
  CHECK(xi_beta_coordinates(2.0, 1.0, 0.025).first == 1.0);
  CHECK(xi_beta_coordinates(8.0, 1.0, 0.025).first == 4.0);
  CHECK(xi_beta_coordinates(1.0, -0.5, 0.025) == std::pair<double, double>{-1.0, -0.5});
  CHECK_THROWS_AS(xi_beta_coordinates(1.0, 0.01, 0.025), std::domain_error);
  for (double q : {-2.0, 0.3, 5.5})
    for (double p : {-1.7, -0.1, 0.05, 0.9})
      for (double t : {0.0, 0.25, 3.0}) {
        const double moved = xi_beta_coordinates(q + 2 * p * t, p, 0.025).first;
        CHECK(std::abs(moved - (xi_beta_coordinates(q, p, 0.025).first + t)) <= 1e-12);
      }
}

TEST_CASE("classical reduction") {
  const PhaseGrid g = demo_grid();
  SUBCASE("product density reduces to its p factor") {
    Eigen::MatrixXd v(g.np, g.nq);
    Eigen::VectorXd gp(g.np);
    for (int j = 0; j < g.np; ++j) gp(j) = 1.0 + 0.5 * std::sin(j);
    for (int j = 0; j < g.np; ++j)
      for (int i = 0; i < g.nq; ++i) v(j, i) = (2.0 + std::cos(g.q(i))) * gp(j);
    const auto m = classical_reduce(PhaseSpaceDensity::normalized(g, v));
    const Eigen::VectorXd expect = gp / (gp.sum() * g.dp);
    CHECK((m.density - expect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.mass() == doctest::Approx(1.0));
  }
  SUBCASE("any q-spread on one row reduces to the same delta") {
    const auto flat = single_p_row(g, 0.525);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(g.np, g.nq);
    for (int i = 0; i < g.nq; ++i) v(g.row_of(0.525), i) = std::exp(std::sin(3 * g.q(i)));
    const auto spread = PhaseSpaceDensity::normalized(g, v);
    const auto a = classical_reduce(flat), b = classical_reduce(spread);
    CHECK(max_diff(a, b) < 1e-12);
    CHECK(a.support() == 1);
    CHECK(a.density(g.row_of(0.525)) == doctest::Approx(1.0 / g.dp));
  }
}

TEST_CASE("classical effective entropy") {
  SUBCASE("uniform marginal of width W") {
    BetaMarginal m;
    m.dp = 0.1;
    m.density = Eigen::VectorXd::Zero(40);
    m.density.segment(5, 20).setConstant(1.0 / 2.0);  // width 2
    CHECK(classical_effective_entropy(m) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  }
  SUBCASE("single cell gives ln dp") {
    const auto m = classical_reduce(single_p_row(demo_grid(), 0.525));
    CHECK(classical_effective_entropy(m) == doctest::Approx(std::log(0.05)).epsilon(1e-13));
  }
  SUBCASE("Gaussian marginal matches the closed form") {
    const PhaseGrid g{8, 300, 2.0 * std::numbers::pi / 8, 0.02};
    const auto m = classical_reduce(gaussian(g, 1.0, 0.0, 1.0, 0.5));
    CHECK(std::abs(classical_effective_entropy(m) - lel::oracle::gaussian_entropy(0.5)) <= 1e-3);
  }
}

TEST_CASE("kicks") {
  const PhaseGrid g = demo_grid();
  const auto start = single_p_row(g, 0.525);
  SUBCASE("zero strength is the identity") {
    CHECK(apply_kick(start, kick_shape_derivative("cos"), 0.0).values() == start.values());
  }
  SUBCASE("constant force shifts rigidly") {
    const auto rho = gaussian(g, 3.0, 0.0, 0.5, 0.15);
    // strength * V' = 2 dp: an exact two-cell shift.
    const auto kicked = apply_kick(rho, kick_shape_derivative("linear"), 2 * g.dp);
    const auto a = classical_reduce(rho), b = classical_reduce(kicked);
    CHECK((b.density.head(g.np - 2) - a.density.tail(g.np - 2)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::abs(classical_effective_entropy(a) - classical_effective_entropy(b)) < 1e-6);
    CHECK(std::abs(kicked.mass() - 1.0) <= 1e-6);
  }
  SUBCASE("flow then cos kick spreads the single-row marginal") {
    const auto flowed = classical_free_flow(start, 1.0);
    const auto kicked = apply_kick(flowed, kick_shape_derivative("cos"), 0.3);
    CHECK(std::abs(kicked.mass() - 1.0) <= 1e-6);
    const auto m = classical_reduce(kicked);
    CHECK(m.support() > 1);
    CHECK(classical_reduce(start).support() == 1);
    CHECK(classical_effective_entropy(m) > std::log(g.dp) + 1e-3);
  }
  CHECK_THROWS_AS(kick_shape_derivative("square"), std::invalid_argument);
}
