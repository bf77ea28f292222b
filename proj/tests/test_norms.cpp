#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "driftlab/norms.hpp"

using namespace driftlab;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double u01(std::mt19937& rng) { return (rng() + 0.5) / 4294967296.0; }

}  // namespace

TEST_CASE("L1 of the constant one is the exact domain volume") {
  const SpaceGrid ball = build_grid(Domain::ball(2, 1.0), 50);
  const std::vector<double> one(ball.size(), 1.0);
  CHECK(lp_norm(ball, one, 1.0) == Approx(kPi).epsilon(1e-14));

  const SpaceGrid rect = build_grid(Domain::rectangle({0.0, 0.0}, {2.0, 3.0}), 8);
  const std::vector<double> one2(rect.size(), 1.0);
  CHECK(lp_norm(rect, one2, 1.0) == Approx(6.0).epsilon(1e-14));
}

TEST_CASE("L1 of log distance on the unit disc converges to pi/2") {
  // 2 pi * integral_0^1 r (-log r) dr = pi / 2
  const SpaceGrid g = build_grid(Domain::ball(2, 1.0), 400);
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j)
    v[j] = std::abs(std::log(g.nodes[j][0]));
  CHECK(lp_norm(g, v, 1.0) == Approx(0.5 * kPi).epsilon(1e-3));
}

TEST_CASE("constant fields have exact norms for every p") {
  const SpaceGrid g = build_grid(Domain::interval(0.0, 2.0), 10);
  const std::vector<double> v(g.size(), -3.0);
  CHECK(lp_norm(g, v, 1.0) == Approx(6.0));
  CHECK(lp_norm(g, v, 2.0) == Approx(3.0 * std::sqrt(2.0)));
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(lp_norm(g, v, inf) == Approx(3.0));
  CHECK(weak_lp_quasinorm(g, v, 2.0) == Approx(3.0 * std::sqrt(2.0)));
  const std::vector<double> zero(g.size(), 0.0);
  CHECK(lp_norm(g, zero, 1.0) == 0.0);
  CHECK(weak_lp_quasinorm(g, zero, 1.0) == 0.0);
}

TEST_CASE("weak-L2 captures the borderline singularity 1/|x| on the disc") {
  // |{1/|x| > s}| = pi/s^2, so s |{...}|^{1/2} = sqrt(pi) for every s >= 1;
  // the quasinorm of the sampled field approaches sqrt(pi) from below.
  const SpaceGrid g = build_grid(Domain::ball(2, 1.0), 400);
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = 1.0 / g.nodes[j][0];
  const double q = weak_lp_quasinorm(g, v, 2.0);
  CHECK(q == Approx(std::sqrt(kPi)).epsilon(2e-2));
  // the strong L2 norm diverges logarithmically, so it must dominate
  CHECK(lp_norm(g, v, 2.0) > 2.0 * q);
}

TEST_CASE("Chebyshev: weak quasinorm never exceeds the strong norm") {
  const SpaceGrid g = build_grid(Domain::interval(0.0, 1.0), 64);
  std::mt19937 rng(23);
  std::vector<double> v(g.size());
  for (double& x : v) x = 4.0 * u01(rng) - 2.0;
  for (double p : {1.0, 2.0, 3.5})
    CHECK(weak_lp_quasinorm(g, v, p) <= lp_norm(g, v, p) * (1.0 + 1e-12));
}

TEST_CASE("Hoelder inequality on random fields") {
  const SpaceGrid g = build_grid(Domain::interval(0.0, 1.0), 64);
  std::mt19937 rng(29);
  std::vector<double> v(g.size());
  for (double& x : v) x = 2.0 * u01(rng) - 1.0;
  const double vol = g.volume();
  CHECK(lp_norm(g, v, 1.0) <= lp_norm(g, v, 2.0) * std::sqrt(vol) + 1e-12);
  CHECK(lp_norm(g, v, 2.0) <=
        lp_norm(g, v, std::numeric_limits<double>::infinity()) *
        std::sqrt(vol) + 1e-12);
}

TEST_CASE("dual Sobolev norm of the unit source on (0,1) is 1/sqrt(12)") {
  // -phi'' = 1 with Dirichlet ends gives phi = x(1-x)/2 and
  // ||phi'||_2^2 = 1/12.
  const SpaceGrid g = build_grid(Domain::interval(0.0, 1.0), 400);
  const std::vector<double> one(g.size(), 1.0);
  CHECK(dual_sobolev_norm(g, one) ==
        Approx(1.0 / std::sqrt(12.0)).epsilon(1e-3));
}

TEST_CASE("dual Sobolev norm scales linearly and vanishes on zero") {
  const SpaceGrid g = build_grid(Domain::interval(0.0, 1.0), 50);
  std::mt19937 rng(31);
  std::vector<double> f(g.size()), f2(g.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    f[j] = u01(rng) - 0.5;
    f2[j] = 3.0 * f[j];
  }
  CHECK(dual_sobolev_norm(g, f2) == Approx(3.0 * dual_sobolev_norm(g, f)));
  const std::vector<double> zero(g.size(), 0.0);
  CHECK(dual_sobolev_norm(g, zero) == 0.0);
}

TEST_CASE("space time norm of a constant trajectory is |Q|^{1/p}") {
  const GridPtr g = make_grid(Domain::interval(0.0, 1.0), 8);
  const TimeGrid tg(2.0, 4);
  Trajectory u(g, tg);
  for (auto& f : u.frames) std::fill(f.begin(), f.end(), 5.0);
  CHECK(space_time_lp(u, 1.0) == Approx(10.0));            // 5 * (1 * 2)
  CHECK(space_time_lp(u, 2.0) == Approx(5.0 * std::sqrt(2.0)));
  const NormSeries s = norm_series(u, 2.0);
  REQUIRE(s.v.size() == 5);
  CHECK(s.v[2] == Approx(5.0));
}

TEST_CASE("level set statistics decrease in the level") {
  const GridPtr g = make_grid(Domain::interval(0.0, 1.0), 32);
  const TimeGrid tg(1.0, 8);
  Trajectory u(g, tg);
  for (int k = 0; k < tg.nodes(); ++k)
    for (std::size_t j = 0; j < g->size(); ++j)
      u.frames[k][j] = std::sin(kPi * g->nodes[j][0]) * std::exp(-tg.node(k));

  LevelSetReport prev = level_set_report(u, 0.0);
  CHECK(prev.measure == Approx(1.0).epsilon(0.2));  // most of the cylinder
  for (double level : {0.2, 0.4, 0.6, 0.8}) {
    const LevelSetReport rep = level_set_report(u, level);
    CHECK(rep.measure <= prev.measure + 1e-15);
    CHECK(rep.sup_energy <= prev.sup_energy + 1e-15);
    CHECK(rep.grad_energy <= prev.grad_energy + 1e-12);
    prev = rep;
  }
  const LevelSetReport top = level_set_report(u, 1.0);
  CHECK(top.measure == 0.0);
  CHECK(top.sup_energy == 0.0);
}

TEST_CASE("invalid exponents and sizes are rejected") {
  const SpaceGrid g = build_grid(Domain::interval(0.0, 1.0), 4);
  const std::vector<double> v(g.size(), 1.0);
  CHECK_THROWS_AS(lp_norm(g, v, 0.5), ConfigError);
  CHECK_THROWS_AS(weak_lp_quasinorm(g, v, 0.5), ConfigError);
  const std::vector<double> bad(3, 1.0);
  CHECK_THROWS_AS(lp_norm(g, bad, 2.0), ContractViolation);
  CHECK_THROWS_AS(dual_sobolev_norm(g, bad), ContractViolation);
}
