#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "driftlab/errors.hpp"
#include "driftlab/grid.hpp"

namespace driftlab {

using GridPtr = std::shared_ptr<const SpaceGrid>;

inline GridPtr make_grid(const Domain& d, int resolution) {
  return std::make_shared<const SpaceGrid>(build_grid(d, resolution));
}

/// Nodal values over a SpaceGrid. Plain value type; the grid is shared and
/// immutable, so fields can be copied and read concurrently.
struct ScalarField {
  GridPtr grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(GridPtr g) : grid(std::move(g)), v(grid->size(), 0.0) {}
  ScalarField(GridPtr g, std::vector<double> values)
      : grid(std::move(g)), v(std::move(values)) {
    if (v.size() != grid->size())
      throw ContractViolation("field length does not match grid");
  }

  std::size_t size() const { return v.size(); }
};

inline ScalarField sample(const GridPtr& g,
                          const std::function<double(const std::array<double, 2>&)>& f) {
  ScalarField out(g);
  for (std::size_t j = 0; j < g->size(); ++j) out.v[j] = f(g->nodes[j]);
  return out;
}

inline ScalarField positive_part(const ScalarField& u) {
  ScalarField out = u;
  for (double& x : out.v) x = std::max(x, 0.0);
  return out;
}

inline ScalarField negative_part(const ScalarField& u) {
  ScalarField out = u;
  for (double& x : out.v) x = std::max(-x, 0.0);
  return out;
}

/// Two-sided clamp T_delta(s) = min(max(s, 0), delta), applied nodewise.
inline ScalarField truncate(const ScalarField& u, double delta) {
  if (!(delta > 0.0)) throw ConfigError("truncation level must be positive");
  ScalarField out = u;
  for (double& x : out.v) x = std::clamp(x, 0.0, delta);
  return out;
}

/// Nodal values at every node of a TimeGrid (steps+1 frames including t=0).
struct Trajectory {
  GridPtr grid;
  TimeGrid time;
  std::vector<std::vector<double>> frames;

  Trajectory() = default;
  Trajectory(GridPtr g, const TimeGrid& tg)
      : grid(std::move(g)), time(tg),
        frames(tg.nodes(), std::vector<double>(grid->size(), 0.0)) {}

  ScalarField at(int k) const { return ScalarField(grid, frames.at(k)); }
};

/// One scalar per time node (a norm history, an energy history, ...).
struct NormSeries {
  TimeGrid time;
  std::vector<double> v;
};

/**
 * Time average u_h(t) = (1/h) * integral of u over [t, t+h], with the window
 * h a whole number of time steps and the integral taken by the composite
 * trapezoid rule. The result lives on the shortened horizon T - h. Averaging
 * trades time regularity for a horizon: a centred difference of the output
 * reproduces the window quotient (u(t+h) - u(t))/h up to O(dt^2).
 */
inline Trajectory steklov_average(const Trajectory& u, double h) {
  const double dt = u.time.dt();
  const double ratio = h / dt;
  const int m = static_cast<int>(std::lround(ratio));
  if (m < 1 || std::abs(ratio - m) > 1e-9 * ratio)
    throw ConfigError("averaging window must be a positive multiple of dt");
  if (!(h < u.time.T))
    throw ConfigError("averaging window must be shorter than the horizon");

  Trajectory out(u.grid, TimeGrid(u.time.T - h, u.time.steps - m));
  const double w = dt / h;
  for (int k = 0; k + m < u.time.nodes(); ++k) {
    auto& acc = out.frames[k];
    for (std::size_t j = 0; j < acc.size(); ++j) {
      double s = 0.5 * (u.frames[k][j] + u.frames[k + m][j]);
      for (int l = 1; l < m; ++l) s += u.frames[k + l][j];
      acc[j] = w * s;
    }
  }
  return out;
}

/// Trapezoid-in-time reduction of a series: (integral |v|^p dt)^{1/p}, or the
/// max over nodes when p is infinite.
inline double bochner_norm(const NormSeries& s, double p) {
  if (s.v.size() != static_cast<std::size_t>(s.time.nodes()))
    throw ContractViolation("series length does not match time grid");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : s.v) m = std::max(m, std::abs(x));
    return m;
  }
  if (!(p >= 1.0)) throw ConfigError("bochner exponent must be >= 1 or inf");
  const double dt = s.time.dt();
  double acc = 0.0;
  for (int k = 0; k < s.time.nodes(); ++k) {
    const double wk = (k == 0 || k == s.time.steps) ? 0.5 * dt : dt;
    acc += wk * std::pow(std::abs(s.v[k]), p);
  }
  return std::pow(acc, 1.0 / p);
}

}  // namespace driftlab
