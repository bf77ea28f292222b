#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "driftlab/field.hpp"
#include "driftlab/norms.hpp"

using namespace driftlab;
using Catch::Approx;

namespace {

double u01(std::mt19937& rng) { return (rng() + 0.5) / 4294967296.0; }

}  // namespace

TEST_CASE("sample evaluates at cell centers") {
  const GridPtr g = make_grid(Domain::interval(0.0, 1.0), 4);
  const ScalarField u = sample(g, [](const std::array<double, 2>& x) {
    return 2.0 * x[0];
  });
  CHECK(u.v[0] == Approx(0.25));
  CHECK(u.v[3] == Approx(1.75));
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(3, 0.0)),
                  ContractViolation);
}

TEST_CASE("positive and negative parts split the field") {
  const GridPtr g = make_grid(Domain::interval(0.0, 1.0), 8);
  std::mt19937 rng(5);
  ScalarField u(g);
  for (double& x : u.v) x = 2.0 * u01(rng) - 1.0;
  const ScalarField up = positive_part(u);
  const ScalarField um = negative_part(u);
  for (std::size_t j = 0; j < u.size(); ++j) {
    CHECK(up.v[j] >= 0.0);
    CHECK(um.v[j] >= 0.0);
    CHECK(up.v[j] - um.v[j] == Approx(u.v[j]).margin(1e-15));
    CHECK(up.v[j] * um.v[j] == 0.0);
  }
}

TEST_CASE("truncation identity u T(u) = T(u)^2 + delta (u - delta)_+") {
  // Plancherel-type identity behind the truncation energy argument; it holds
  // pointwise for every real u >= 0 and every delta > 0.
  const GridPtr g = make_grid(Domain::interval(0.0, 1.0), 32);
  std::mt19937 rng(17);
  ScalarField u(g);
  for (double& x : u.v) x = 3.0 * u01(rng);
  const double delta = 1.0;
  const ScalarField t = truncate(u, delta);
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double lhs = u.v[j] * t.v[j];
    const double rhs = t.v[j] * t.v[j] + delta * std::max(u.v[j] - delta, 0.0);
    CHECK(lhs == Approx(rhs).margin(1e-14));
  }
  CHECK_THROWS_AS(truncate(u, 0.0), ConfigError);
}

TEST_CASE("truncation clamps into [0, delta]") {
  const GridPtr g = make_grid(Domain::interval(0.0, 1.0), 4);
  ScalarField u(g, {-1.0, 0.2, 0.7, 5.0});
  const ScalarField t = truncate(u, 0.5);
  CHECK(t.v[0] == 0.0);
  CHECK(t.v[1] == Approx(0.2));
  CHECK(t.v[2] == 0.5);
  CHECK(t.v[3] == 0.5);
}

TEST_CASE("steklov average is exact on fields constant or linear in time") {
  const GridPtr g = make_grid(Domain::interval(0.0, 1.0), 4);
  const TimeGrid tg(1.0, 10);
  Trajectory u(g, tg);
  for (int k = 0; k < tg.nodes(); ++k)
    for (std::size_t j = 0; j < g->size(); ++j)
      u.frames[k][j] = 3.0 + 2.0 * tg.node(k);  // linear in t

  const double h = 0.2;  // two steps
  const Trajectory a = steklov_average(u, h);
  CHECK(a.time.T == Approx(0.8));
  CHECK(a.time.steps == 8);
  // average of a linear function over [t, t+h] is its midpoint value
  for (int k = 0; k < a.time.nodes(); ++k)
    CHECK(a.frames[k][0] == Approx(3.0 + 2.0 * (tg.node(k) + 0.5 * h)));
}

TEST_CASE("centred difference of the average recovers the window quotient") {
  const GridPtr g = make_grid(Domain::interval(0.0, 1.0), 4);
  const TimeGrid tg(1.0, 200);
  Trajectory u(g, tg);
  for (int k = 0; k < tg.nodes(); ++k) {
    const double t = tg.node(k);
    for (std::size_t j = 0; j < g->size(); ++j)
      u.frames[k][j] = std::sin(3.0 * t);
  }
  const double h = 0.1;  // 20 steps
  const Trajectory a = steklov_average(u, h);
  const double dt = tg.dt();
  // d/dt of the Steklov average equals (u(t+h) - u(t))/h; compare a centred
  // quotient of the averaged field against that exact expression
  const int k = 50;
  const double t = a.time.node(k);
  const double lhs = (a.frames[k + 1][0] - a.frames[k - 1][0]) / (2.0 * dt);
  const double rhs = (std::sin(3.0 * (t + h)) - std::sin(3.0 * t)) / h;
  CHECK(lhs == Approx(rhs).margin(5.0 * dt * dt * 27.0));
}

TEST_CASE("steklov average rejects bad windows") {
  const GridPtr g = make_grid(Domain::interval(0.0, 1.0), 4);
  Trajectory u(g, TimeGrid(1.0, 10));
  CHECK_THROWS_AS(steklov_average(u, 0.05), ConfigError);   // half a step
  CHECK_THROWS_AS(steklov_average(u, 1.0), ConfigError);    // whole horizon
  CHECK_THROWS_AS(steklov_average(u, -0.1), ConfigError);
}

TEST_CASE("bochner norm handles constants, powers, and sup") {
  NormSeries s;
  s.time = TimeGrid(2.0, 8);
  s.v.assign(s.time.nodes(), 3.0);
  CHECK(bochner_norm(s, 1.0) == Approx(6.0));             // 3 * |[0,2]|
  CHECK(bochner_norm(s, 2.0) == Approx(3.0 * std::sqrt(2.0)));
  const double inf = std::numeric_limits<double>::infinity();
  s.v[4] = -7.0;
  CHECK(bochner_norm(s, inf) == Approx(7.0));
  s.v.pop_back();
  CHECK_THROWS_AS(bochner_norm(s, 2.0), ContractViolation);
}

TEST_CASE("trajectory frame access round trips") {
  const GridPtr g = make_grid(Domain::interval(0.0, 1.0), 4);
  Trajectory u(g, TimeGrid(1.0, 2));
  REQUIRE(u.frames.size() == 3);
  u.frames[1][2] = 5.0;
  const ScalarField f = u.at(1);
  CHECK(f.v[2] == 5.0);
  CHECK_THROWS_AS(u.at(9), std::out_of_range);
}
