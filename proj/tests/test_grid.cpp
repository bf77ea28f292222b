#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "driftlab/grid.hpp"

using namespace driftlab;
using Catch::Approx;

TEST_CASE("interval grid places cell centers and exact weights") {
  const SpaceGrid g = build_grid(Domain::interval(0.0, 1.0), 4);
  REQUIRE(g.size() == 4);
  REQUIRE(g.hx == Approx(0.25));
  const double expect[4] = {0.125, 0.375, 0.625, 0.875};
  for (int j = 0; j < 4; ++j) {
    CHECK(g.nodes[j][0] == Approx(expect[j]));
    CHECK(g.weights[j] == Approx(0.25));
  }
  CHECK(g.volume() == Approx(1.0));
  CHECK(g.boundary_distance(0) == Approx(0.125));
  CHECK(g.boundary_distance(3) == Approx(0.125));
}

TEST_CASE("rectangle grid is row major with x fastest") {
  const SpaceGrid g = build_grid(Domain::rectangle({0.0, 0.0}, {2.0, 1.0}), 4);
  REQUIRE(g.size() == 16);
  CHECK(g.hx == Approx(0.5));
  CHECK(g.hy == Approx(0.25));
  CHECK(g.nodes[0][0] == Approx(0.25));
  CHECK(g.nodes[0][1] == Approx(0.125));
  CHECK(g.nodes[1][0] == Approx(0.75));   // x advances first
  CHECK(g.nodes[1][1] == Approx(0.125));
  CHECK(g.nodes[4][0] == Approx(0.25));   // then y
  CHECK(g.nodes[4][1] == Approx(0.375));
  CHECK(g.volume() == Approx(2.0));
}

TEST_CASE("ball grid weights sum to the exact ball volume") {
  // Shell volumes are exact, so the sum telescopes to |B| with no
  // discretization error at any resolution.
  for (int n : {2, 3, 5}) {
    const SpaceGrid g = build_grid(Domain::ball(n, 1.0), 7);
    const double vol = Domain::unit_sphere_area(n) / n;
    CHECK(g.volume() == Approx(vol).epsilon(1e-14));
  }
  const SpaceGrid g2 = build_grid(Domain::ball(2, 1.0), 16);
  CHECK(g2.volume() == Approx(std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("unit sphere areas match the classical values") {
  CHECK(Domain::unit_sphere_area(2) == Approx(2.0 * std::numbers::pi));
  CHECK(Domain::unit_sphere_area(3) == Approx(4.0 * std::numbers::pi));
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(Domain::unit_sphere_area(4) == Approx(2.0 * pi2));
}

TEST_CASE("refine halves the spacing and nests cells two to one") {
  const SpaceGrid g = build_grid(Domain::interval(0.0, 1.0), 8);
  const SpaceGrid f = refine(g);
  REQUIRE(f.size() == 16);
  CHECK(f.hx == Approx(0.5 * g.hx));
  // children 2j, 2j+1 average to the parent center
  for (std::size_t j = 0; j < g.size(); ++j)
    CHECK(0.5 * (f.nodes[2 * j][0] + f.nodes[2 * j + 1][0]) ==
          Approx(g.nodes[j][0]));
}

TEST_CASE("tiny resolutions are rejected") {
  CHECK_THROWS_AS(build_grid(Domain::interval(0.0, 1.0), 3), ConfigError);
  CHECK_THROWS_AS(Domain::interval(1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Domain::ball(1, 1.0), ConfigError);
  CHECK_THROWS_AS(Domain::ball(2, 0.0), ConfigError);
  CHECK_THROWS_AS(Domain::rectangle({0.0, 0.0}, {1.0, 0.0}), ConfigError);
}

TEST_CASE("midpoint quadrature is second order on the interval") {
  // integral of x^2 over (0,1) is 1/3; midpoint error is h^2/24 exactly
  auto err = [](int res) {
    const SpaceGrid g = build_grid(Domain::interval(0.0, 1.0), res);
    std::vector<double> v(g.size());
    for (std::size_t j = 0; j < g.size(); ++j)
      v[j] = g.nodes[j][0] * g.nodes[j][0];
    return std::abs(quadrature(g, v) - 1.0 / 3.0);
  };
  const double e1 = err(16), e2 = err(32);
  const double order = std::log2(e1 / e2);
  CHECK(order > 1.9);
  CHECK(order < 2.1);
}

TEST_CASE("quadrature rejects mismatched field sizes") {
  const SpaceGrid g = build_grid(Domain::interval(0.0, 1.0), 4);
  const std::vector<double> bad(5, 1.0);
  CHECK_THROWS_AS(quadrature(g, bad), ContractViolation);
}

TEST_CASE("time grid nodes and nearest node lookup") {
  const TimeGrid tg(1.0, 4);
  CHECK(tg.dt() == Approx(0.25));
  CHECK(tg.node(0) == Approx(0.0));
  CHECK(tg.node(4) == Approx(1.0));
  CHECK(tg.nodes() == 5);
  CHECK(tg.nearest_node(0.0) == 0);
  CHECK(tg.nearest_node(0.13) == 1);
  CHECK(tg.nearest_node(0.12) == 0);
  CHECK(tg.nearest_node(2.0) == 4);  // clamped to the horizon
  CHECK(tg.nearest_node(-1.0) == 0);
  CHECK_THROWS_AS(TimeGrid(0.0, 4), ConfigError);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), ConfigError);
}

TEST_CASE("subdomain selection keeps nodes clear of the boundary") {
  const SpaceGrid g = build_grid(Domain::interval(0.0, 1.0), 10);
  SubdomainSchedule sched;
  sched.eps = {0.3, 0.15};
  const auto coarse = subdomain_grid(g, sched, 0);
  const auto fine = subdomain_grid(g, sched, 1);
  for (std::size_t j : coarse) CHECK(g.boundary_distance(j) > 0.3);
  // finer margin admits at least as many nodes, and contains the coarse set
  CHECK(fine.size() >= coarse.size());
  for (std::size_t j : coarse)
    CHECK(std::find(fine.begin(), fine.end(), j) != fine.end());

  SubdomainSchedule bad;
  bad.eps = {0.1, 0.2};
  CHECK_THROWS_AS(subdomain_grid(g, bad, 0), ConfigError);
  SubdomainSchedule huge;
  huge.eps = {0.9};
  CHECK_THROWS_AS(subdomain_grid(g, huge, 0), ConfigError);
  CHECK_THROWS_AS(subdomain_grid(g, sched, 7), ContractViolation);
}
