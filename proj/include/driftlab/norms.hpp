#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "driftlab/banded.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/field.hpp"
#include "driftlab/grid.hpp"
#include "driftlab/operators.hpp"

namespace driftlab {

/// Quadrature Lp norm, p in [1, inf].
inline double lp_norm(const SpaceGrid& g, std::span<const double> v, double p) {
  if (v.size() != g.size())
    throw ContractViolation("lp_norm: field length does not match grid");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (!(p >= 1.0)) throw ConfigError("lp_norm requires p >= 1");
  double acc = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    acc += g.weights[j] * std::pow(std::abs(v[j]), p);
  return std::pow(acc, 1.0 / p);
}

inline double lp_norm(const ScalarField& u, double p) {
  return lp_norm(*u.grid, u.v, p);
}

/**
 * Weak-Lp quasinorm sup_s s |{|b| > s}|^{1/p} of sampled data.
 *
 * The node values induce an atomic distribution function; the sup is probed
 * at every distinct value with the weight strictly above it, plus once at
 * the smallest value against the full measure (the exceedance limit from
 * below, which is what makes a constant field come out as |c| |Omega|^{1/p}).
 * Strictly-above weights keep an unresolved singular cell from inflating the
 * estimate through its own lumped weight.
 */
inline double weak_lp_quasinorm(const SpaceGrid& g, std::span<const double> v,
                                double p) {
  if (v.size() != g.size())
    throw ContractViolation("weak_lp_quasinorm: field length does not match grid");
  if (!(p >= 1.0)) throw ConfigError("weak_lp_quasinorm requires p >= 1");

  std::vector<std::pair<double, double>> pairs;  // (|value|, weight)
  pairs.reserve(v.size());
  for (std::size_t j = 0; j < v.size(); ++j)
    pairs.emplace_back(std::abs(v[j]), g.weights[j]);
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  double best = 0.0;
  double above = 0.0;  // weight strictly above the current value group
  std::size_t i = 0;
  double total = 0.0;
  for (const auto& pr : pairs) total += pr.second;
  while (i < pairs.size()) {
    const double val = pairs[i].first;
    double group = 0.0;
    while (i < pairs.size() && pairs[i].first == val) group += pairs[i++].second;
    if (val > 0.0) best = std::max(best, val * std::pow(above, 1.0 / p));
    above += group;
  }
  if (!pairs.empty() && pairs.back().first > 0.0)
    best = std::max(best, pairs.back().first * std::pow(total, 1.0 / p));
  return best;
}

inline double weak_lp_quasinorm(const ScalarField& u, double p) {
  return weak_lp_quasinorm(*u.grid, u.v, p);
}

/**
 * Negative-order Sobolev norm of a source term, realized through the same
 * discrete Laplacian the time stepper uses: solve the weighted Poisson
 * system A phi = W f and return sqrt(<f, phi>_W) = ||grad phi||. Sharing the
 * stencil keeps the energy-estimate bookkeeping free of hidden constants.
 */
inline double dual_sobolev_norm(const SpaceGrid& g, std::span<const double> f) {
  if (f.size() != g.size())
    throw ContractViolation("dual_sobolev_norm: field length does not match grid");
  BandedLU lu(assemble_diffusion_form(g));
  std::vector<double> phi(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) phi[j] = g.weights[j] * f[j];
  lu.solve(phi);
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += g.weights[j] * f[j] * phi[j];
  // acc = D(phi,phi) >= 0 up to roundoff
  return std::sqrt(std::max(acc, 0.0));
}

inline double dual_sobolev_norm(const ScalarField& f) {
  return dual_sobolev_norm(*f.grid, f.v);
}

/// Space-time Lp norm over the whole trajectory cylinder, trapezoid in time.
inline double space_time_lp(const Trajectory& u, double p) {
  if (!(p >= 1.0)) throw ConfigError("space_time_lp requires p >= 1");
  const double dt = u.time.dt();
  double acc = 0.0;
  for (int k = 0; k < u.time.nodes(); ++k) {
    const double wk = (k == 0 || k == u.time.steps) ? 0.5 * dt : dt;
    double s = 0.0;
    for (std::size_t j = 0; j < u.grid->size(); ++j)
      s += u.grid->weights[j] * std::pow(std::abs(u.frames[k][j]), p);
    acc += wk * s;
  }
  return std::pow(acc, 1.0 / p);
}

/// Spatial norm at every time node.
inline NormSeries norm_series(const Trajectory& u, double p) {
  NormSeries s;
  s.time = u.time;
  s.v.reserve(u.frames.size());
  for (const auto& frame : u.frames) s.v.push_back(lp_norm(*u.grid, frame, p));
  return s;
}

struct LevelSetReport {
  double level = 0.0;
  double measure = 0.0;      ///< space-time measure of {u > level}
  double sup_energy = 0.0;   ///< max_t ||(u - level)_+||_2^2
  double grad_energy = 0.0;  ///< integral of D((u - level)_+) over time
};

/// Superlevel-set statistics of a trajectory; all three outputs are
/// nonincreasing in the level, which the tests exercise as a property.
inline LevelSetReport level_set_report(const Trajectory& u, double level) {
  LevelSetReport rep;
  rep.level = level;
  const double dt = u.time.dt();
  std::vector<double> excess(u.grid->size());
  for (int k = 0; k < u.time.nodes(); ++k) {
    const double wk = (k == 0 || k == u.time.steps) ? 0.5 * dt : dt;
    double meas = 0.0, l2sq = 0.0;
    for (std::size_t j = 0; j < excess.size(); ++j) {
      const double e = u.frames[k][j] - level;
      excess[j] = e > 0.0 ? e : 0.0;
      if (e > 0.0) {
        meas += u.grid->weights[j];
        l2sq += u.grid->weights[j] * e * e;
      }
    }
    rep.measure += wk * meas;
    rep.sup_energy = std::max(rep.sup_energy, l2sq);
    rep.grad_energy += wk * dirichlet_form(*u.grid, excess, excess);
  }
  return rep;
}

}  // namespace driftlab
