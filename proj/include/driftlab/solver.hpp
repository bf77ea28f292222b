#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "driftlab/banded.hpp"
#include "driftlab/drift.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/field.hpp"
#include "driftlab/grid.hpp"
#include "driftlab/norms.hpp"
#include "driftlab/operators.hpp"

namespace driftlab {

/// Right-hand side f(x,t); default-constructed means identically zero.
struct SourceSpec {
  std::function<double(const std::array<double, 2>&, double)> fn;

  bool is_zero() const { return !fn; }
  double operator()(const std::array<double, 2>& x, double t) const {
    return fn ? fn(x, t) : 0.0;
  }
};

struct ProblemSpec {
  GridPtr grid;
  TimeGrid time;
  double nu = 1.0;
  DriftSpec drift;
  std::vector<double> u0;
  SourceSpec source;
  std::optional<double> certificate_tol;  ///< override for the divergence gate
};

struct SolverConfig {
  AdvectionScheme advection = AdvectionScheme::upwind;
  bool keep_frames = true;  ///< store the full trajectory, not just series
};

/// Per-step structure report. Row deficits below zero lose the maximum
/// principle, weighted column deficits below zero lose L1 contraction;
/// both are archived so experiments can show their slack.
struct StepDiagnostics {
  bool m_matrix = true;
  double min_row_deficit = 0.0;
  double min_col_deficit = 0.0;
};

struct SolveResult {
  Trajectory traj;
  NormSeries l1, l2, linf;
  NormSeries grad_energy;  ///< D(u^k, u^k), the squared discrete gradient norm
  std::vector<StepDiagnostics> steps;
};

struct StepMatrixReport {
  bool m_matrix = true;
  double min_row_deficit = 0.0;
  std::size_t worst_row = 0;
  double min_col_deficit = 0.0;
  std::size_t worst_col = 0;
};

namespace detail {

inline void validate_problem(const ProblemSpec& p) {
  if (!p.grid) throw ContractViolation("problem has no grid");
  if (p.u0.size() != p.grid->size())
    throw ContractViolation("initial data length does not match grid");
  if (!(p.nu > 0.0)) throw ConfigError("viscosity must be positive");
}

/// I + dt (nu W^{-1} A_diff + L_adv(t)), the matrix advancing one step with
/// the drift frozen at the implicit time level.
inline BandedMatrix assemble_step_matrix(const ProblemSpec& p,
                                         const SolverConfig& cfg,
                                         const BandedMatrix& diff_form,
                                         double t_implicit) {
  const SpaceGrid& g = *p.grid;
  const double dt = p.time.dt();
  const auto coef = advection_coefficients(p.drift, g, t_implicit);
  const auto adv = assemble_advection(g, coef, cfg.advection);

  BandedMatrix m(g.size(), diff_form.bandwidth());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t j0 = i > m.bandwidth() ? i - m.bandwidth() : 0;
    const std::size_t j1 = std::min(g.size() - 1, i + m.bandwidth());
    for (std::size_t j = j0; j <= j1; ++j) {
      double v = dt * (p.nu * diff_form.get(i, j) / g.weights[i] + adv.get(i, j));
      if (i == j) v += 1.0;
      if (v != 0.0) m.at(i, j) = v;
    }
  }
  return m;
}

inline StepDiagnostics diagnose(const BandedMatrix& m, const SpaceGrid& g) {
  StepDiagnostics d;
  d.min_row_deficit = std::numeric_limits<double>::infinity();
  d.min_col_deficit = std::numeric_limits<double>::infinity();
  const auto rows = row_sums(m);
  const auto cols = weighted_column_sums(m, g);
  for (std::size_t i = 0; i < m.size(); ++i) {
    d.min_row_deficit = std::min(d.min_row_deficit, rows[i] - 1.0);
    d.min_col_deficit = std::min(d.min_col_deficit, cols[i] - 1.0);
    const std::size_t j0 = i > m.bandwidth() ? i - m.bandwidth() : 0;
    const std::size_t j1 = std::min(m.size() - 1, i + m.bandwidth());
    for (std::size_t j = j0; j <= j1; ++j) {
      const double v = m.get(i, j);
      if ((i == j && v <= 0.0) || (i != j && v > 0.0)) d.m_matrix = false;
    }
  }
  return d;
}

}  // namespace detail

/// Implicit Euler for  du/dt - nu Lap u + b . grad u = f  with homogeneous
/// Dirichlet data. Each step solves (I + dt L(t_{k+1})) u^{k+1} = u^k + dt f^{k+1}
/// by direct banded elimination. With upwind advection the step matrix is an
/// M-matrix, which is what the inequality experiments lean on.
inline SolveResult solve_primal(const ProblemSpec& p, const SolverConfig& cfg = {}) {
  detail::validate_problem(p);
  const SpaceGrid& g = *p.grid;
  const TimeGrid& tg = p.time;
  const double dt = tg.dt();
  const auto diff_form = assemble_diffusion_form(g);

  SolveResult res;
  res.traj = Trajectory(p.grid, tg);
  res.l1.time = res.l2.time = res.linf.time = res.grad_energy.time = tg;

  std::vector<double> u = p.u0;
  auto record = [&](int k, const std::vector<double>& v) {
    if (cfg.keep_frames) res.traj.frames[k] = v;
    res.l1.v.push_back(lp_norm(g, v, 1.0));
    res.l2.v.push_back(lp_norm(g, v, 2.0));
    res.linf.v.push_back(lp_norm(g, v, std::numeric_limits<double>::infinity()));
    res.grad_energy.v.push_back(dirichlet_form(g, v, v));
  };
  record(0, u);

  std::unique_ptr<BandedLU> lu;
  for (int k = 0; k < tg.steps; ++k) {
    const double t_next = tg.node(k + 1);
    if (!lu || p.drift.time_dependent()) {
      auto m = detail::assemble_step_matrix(p, cfg, diff_form, t_next);
      res.steps.push_back(detail::diagnose(m, g));
      lu = std::make_unique<BandedLU>(std::move(m));
    } else {
      res.steps.push_back(res.steps.back());
    }
    if (!p.source.is_zero())
      for (std::size_t j = 0; j < g.size(); ++j)
        u[j] += dt * p.source(g.nodes[j], t_next);
    lu->solve(u);
    for (double x : u)
      if (!std::isfinite(x))
        throw NumericalError("solution diverged at step " + std::to_string(k + 1));
    record(k + 1, u);
  }
  if (!cfg.keep_frames) res.traj.frames.back() = u;
  return res;
}

/**
 * Backward-in-time companion problem
 *   -dw/dt - nu Lap w - div(b w) = s,   w(T) = w_T,
 * discretized as the exact weighted adjoint of the primal stepper: with
 * A_{k+1} the primal step matrix and W the quadrature weights, each sweep
 * solves A_{k+1}^T (W w^k) = W (w^{k+1} + dt s^{k+1}). That choice makes the
 * summed-by-parts pairing
 *   sum_k dt <u^{k+1}, s^{k+1}> = <u^0, w^0> + sum_k dt <f^{k+1}, w^k>
 * an identity up to roundoff, not up to discretization error.
 */
inline SolveResult solve_dual(const ProblemSpec& p, const SourceSpec& s,
                              const std::vector<double>& w_terminal,
                              const SolverConfig& cfg = {}) {
  detail::validate_problem(p);
  const SpaceGrid& g = *p.grid;
  const TimeGrid& tg = p.time;
  if (w_terminal.size() != g.size())
    throw ContractViolation("terminal data length does not match grid");
  const double dt = tg.dt();
  const auto diff_form = assemble_diffusion_form(g);

  SolveResult res;
  res.traj = Trajectory(p.grid, tg);
  res.l1.time = res.l2.time = res.linf.time = res.grad_energy.time = tg;
  res.l1.v.assign(tg.nodes(), 0.0);
  res.l2.v.assign(tg.nodes(), 0.0);
  res.linf.v.assign(tg.nodes(), 0.0);
  res.grad_energy.v.assign(tg.nodes(), 0.0);

  auto record = [&](int k, const std::vector<double>& v) {
    res.traj.frames[k] = v;
    res.l1.v[k] = lp_norm(g, v, 1.0);
    res.l2.v[k] = lp_norm(g, v, 2.0);
    res.linf.v[k] = lp_norm(g, v, std::numeric_limits<double>::infinity());
    res.grad_energy.v[k] = dirichlet_form(g, v, v);
  };

  std::vector<double> w = w_terminal;
  record(tg.steps, w);

  std::unique_ptr<BandedLU> lu;
  for (int k = tg.steps - 1; k >= 0; --k) {
    const double t_level = tg.node(k + 1);
    if (!lu || p.drift.time_dependent()) {
      auto m = detail::assemble_step_matrix(p, cfg, diff_form, t_level);
      res.steps.push_back(detail::diagnose(m, g));
      lu = std::make_unique<BandedLU>(std::move(m));
    } else {
      res.steps.push_back(res.steps.back());
    }
    if (!s.is_zero())
      for (std::size_t j = 0; j < g.size(); ++j) w[j] += dt * s(g.nodes[j], t_level);
    for (std::size_t j = 0; j < g.size(); ++j) w[j] *= g.weights[j];
    lu->solve_transposed(w);
    for (std::size_t j = 0; j < g.size(); ++j) w[j] /= g.weights[j];
    for (double x : w)
      if (!std::isfinite(x))
        throw NumericalError("dual solution diverged at step " + std::to_string(k));
    record(k, w);
  }
  return res;
}

/// Assembled one-step matrix for inspection; k is the implicit time node
/// (1..steps).
inline BandedMatrix step_matrix(const ProblemSpec& p, const SolverConfig& cfg,
                                int k) {
  detail::validate_problem(p);
  if (k < 1 || k > p.time.steps)
    throw ContractViolation("step index out of range");
  const auto diff_form = assemble_diffusion_form(*p.grid);
  return detail::assemble_step_matrix(p, cfg, diff_form, p.time.node(k));
}

/// The dual stepper's matrix is the primal one transposed, by construction;
/// exposed separately so tests can pin that contract bit for bit.
inline BandedMatrix dual_step_matrix(const ProblemSpec& p,
                                     const SolverConfig& cfg, int k) {
  return step_matrix(p, cfg, k).transposed();
}

inline StepMatrixReport step_matrix_report(const ProblemSpec& p,
                                           const SolverConfig& cfg, int k) {
  const auto m = step_matrix(p, cfg, k);
  const SpaceGrid& g = *p.grid;
  StepMatrixReport rep;
  rep.min_row_deficit = std::numeric_limits<double>::infinity();
  rep.min_col_deficit = std::numeric_limits<double>::infinity();
  const auto rows = row_sums(m);
  const auto cols = weighted_column_sums(m, g);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (rows[i] - 1.0 < rep.min_row_deficit) {
      rep.min_row_deficit = rows[i] - 1.0;
      rep.worst_row = i;
    }
    if (cols[i] - 1.0 < rep.min_col_deficit) {
      rep.min_col_deficit = cols[i] - 1.0;
      rep.worst_col = i;
    }
    const std::size_t j0 = i > m.bandwidth() ? i - m.bandwidth() : 0;
    const std::size_t j1 = std::min(m.size() - 1, i + m.bandwidth());
    for (std::size_t j = j0; j <= j1; ++j) {
      const double v = m.get(i, j);
      if ((i == j && v <= 0.0) || (i != j && v > 0.0)) rep.m_matrix = false;
    }
  }
  return rep;
}

}  // namespace driftlab
