#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "driftlab/drift.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/field.hpp"
#include "driftlab/grid.hpp"
#include "driftlab/mollify.hpp"
#include "driftlab/norms.hpp"
#include "driftlab/solver.hpp"

namespace driftlab {

enum class Verdict { pass, fail, hypothesis_violated };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::hypothesis_violated: return "hypothesis_violated";
  }
  return "?";
}

/// One verified inequality: `measured relation bound`.
struct CheckResult {
  std::string name;
  std::string relation;  ///< "<=" or ">="
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Named numeric columns for the plot-data CSV files.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  std::string name;
  Verdict verdict = Verdict::pass;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;
  std::vector<Table> tables;

  void metric(const std::string& key, double value) {
    metrics.emplace_back(key, value);
  }

  void require_le(const std::string& what, double measured, double bound) {
    checks.push_back({what, "<=", measured, bound, measured <= bound});
  }

  void require_ge(const std::string& what, double measured, double bound) {
    checks.push_back({what, ">=", measured, bound, measured >= bound});
  }

  /// pass <=> every recorded inequality holds (unless the hypothesis gate
  /// already put the report in the refused state).
  void finalize() {
    if (verdict == Verdict::hypothesis_violated) return;
    verdict = Verdict::pass;
    for (const auto& c : checks)
      if (!c.pass) verdict = Verdict::fail;
  }
};

/// Grid-independent problem statement; experiments instantiate it at one or
/// more resolutions (refinement studies scale the step count along with the
/// node count).
struct ProblemBlueprint {
  Domain domain = Domain::interval(0.0, 1.0);
  int resolution = 100;
  TimeGrid time{1.0, 100};
  double nu = 1.0;
  DriftSpec drift = DriftSpec::zero(1);
  std::function<double(std::array<double, 2>)> u0;
  std::function<double(std::array<double, 2>, double)> f;
  std::optional<double> certificate_tol;
};

inline ProblemSpec instantiate(const ProblemBlueprint& bp, int factor = 1) {
  if (factor > 1 && bp.drift.kind == DriftSpec::Kind::sampled)
    throw ContractViolation("sampled drifts cannot be refined");
  ProblemSpec p;
  p.grid = make_grid(bp.domain, bp.resolution * factor);
  p.time = TimeGrid(bp.time.T, bp.time.steps * factor);
  p.nu = bp.nu;
  p.drift = bp.drift;
  p.u0 = bp.u0 ? sample(p.grid, bp.u0).v : std::vector<double>(p.grid->size(), 0.0);
  if (bp.f) p.source.fn = bp.f;
  p.certificate_tol = bp.certificate_tol;
  return p;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Composite Simpson rule with `panels` panels (even count enforced).
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int panels) {
  if (panels < 2) panels = 2;
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Deterministic uniform variate; avoids distribution objects whose output
/// is implementation-defined.
inline double u01(std::mt19937& rng) {
  return (static_cast<double>(rng()) + 0.5) / 4294967296.0;
}

inline double weighted_inner(const SpaceGrid& g, std::span<const double> u,
                             std::span<const double> v) {
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) s += g.weights[j] * u[j] * v[j];
  return s;
}

/// Certificate gate shared by every estimate-asserting experiment: when the
/// drift fails div b <= tol, the report refuses to assert anything.
inline bool gate(ExperimentReport& rep, const ProblemSpec& p) {
  const auto cert = certify_divergence(p.drift, *p.grid, p.time, p.certificate_tol);
  rep.metric("certificate_max_divergence", cert.max_divergence);
  rep.metric("certificate_tol", cert.tol);
  if (!cert.pass) {
    rep.verdict = Verdict::hypothesis_violated;
    rep.notes.push_back("divergence certificate failed (max " +
                        fmt(cert.max_divergence) + " at node " +
                        std::to_string(cert.worst_node) +
                        "); refusing to assert the estimate");
  }
  return cert.pass;
}

inline void series_table(ExperimentReport& rep, const TimeGrid& tg,
                         const SolveResult& res) {
  Table t;
  t.name = "norms";
  t.columns = {"t", "l1", "l2", "linf", "grad_energy"};
  for (int k = 0; k <= tg.steps; ++k)
    t.rows.push_back({tg.node(k), res.l1.v[k], res.l2.v[k], res.linf.v[k],
                      res.grad_energy.v[k]});
  rep.tables.push_back(std::move(t));
}

inline double min_col_deficit(const SolveResult& res) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : res.steps) m = std::min(m, s.min_col_deficit);
  return m;
}

inline double min_row_deficit(const SolveResult& res) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : res.steps) m = std::min(m, s.min_row_deficit);
  return m;
}

/// sup_k ||u^k||_2 + sqrt(nu) (sum dt D(u^k))^{1/2}, the quantity the energy
/// estimate bounds.
inline double energy_functional(const ProblemSpec& p, const SolveResult& res) {
  double sup2 = 0.0, diss = 0.0;
  for (int k = 0; k <= p.time.steps; ++k) sup2 = std::max(sup2, res.l2.v[k]);
  for (int k = 1; k <= p.time.steps; ++k) diss += p.time.dt() * res.grad_energy.v[k];
  return sup2 + std::sqrt(p.nu * diss);
}

/// Discrete L2(0,T)-in-time norm of the negative-Sobolev spatial norm of f,
/// with f sampled at the implicit time levels.
inline double source_dual_norm(const ProblemSpec& p) {
  if (p.source.is_zero()) return 0.0;
  const SpaceGrid& g = *p.grid;
  double acc = 0.0;
  std::vector<double> fk(g.size());
  for (int k = 1; k <= p.time.steps; ++k) {
    for (std::size_t j = 0; j < g.size(); ++j)
      fk[j] = p.source(g.nodes[j], p.time.node(k));
    const double d = dual_sobolev_norm(g, fk);
    acc += p.time.dt() * d * d;
  }
  return std::sqrt(acc);
}

inline double source_lp_spacetime(const ProblemSpec& p, double q) {
  if (p.source.is_zero()) return 0.0;
  const SpaceGrid& g = *p.grid;
  Trajectory f(p.grid, p.time);
  for (int k = 0; k <= p.time.steps; ++k)
    for (std::size_t j = 0; j < g.size(); ++j)
      f.frames[k][j] = p.source(g.nodes[j], p.time.node(k));
  return space_time_lp(f, q);
}

/// Cell-average restriction from a once-refined grid back to the coarse one.
inline std::vector<double> restrict_field(const SpaceGrid& fine,
                                          const SpaceGrid& coarse,
                                          std::span<const double> v) {
  if (fine.nx != 2 * coarse.nx || v.size() != fine.size())
    throw ContractViolation("restrict_field needs a once-refined grid");
  std::vector<double> out(coarse.size(), 0.0);
  if (fine.domain.kind == DomainKind::rectangle) {
    const std::size_t cnx = static_cast<std::size_t>(coarse.nx);
    const std::size_t cny = static_cast<std::size_t>(coarse.ny);
    for (std::size_t cy = 0; cy < cny; ++cy)
      for (std::size_t cx = 0; cx < cnx; ++cx) {
        double mass = 0.0, vol = 0.0;
        for (std::size_t dy = 0; dy < 2; ++dy)
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t jf =
                (2 * cy + dy) * static_cast<std::size_t>(fine.nx) + 2 * cx + dx;
            mass += fine.weights[jf] * v[jf];
            vol += fine.weights[jf];
          }
        out[cy * cnx + cx] = mass / vol;
      }
    return out;
  }
  for (std::size_t c = 0; c < coarse.size(); ++c) {
    const std::size_t j = 2 * c;
    const double vol = fine.weights[j] + fine.weights[j + 1];
    out[c] = (fine.weights[j] * v[j] + fine.weights[j + 1] * v[j + 1]) / vol;
  }
  return out;
}

/// Smooth deterministic probe field, bounded by 1, vanishing on the
/// boundary; seed selects the Fourier coefficients.
inline std::function<double(std::array<double, 2>)> probe_field(
    const Domain& dom, unsigned seed) {
  std::mt19937 rng(seed);
  std::array<double, 4> c{};
  double total = 0.0;
  for (auto& x : c) {
    x = 2.0 * u01(rng) - 1.0;
    total += std::abs(x);
  }
  for (auto& x : c) x /= total;
  return [dom, c](std::array<double, 2> x) {
    double s = 0.0;
    if (dom.kind == DomainKind::radial_ball) {
      const double q = x[0] / dom.hi[0];
      for (int m = 0; m < 4; ++m)
        s += c[m] * std::sin((m + 1) * std::numbers::pi * q);
    } else {
      const double qx = (x[0] - dom.lo[0]) / (dom.hi[0] - dom.lo[0]);
      for (int m = 0; m < 4; ++m)
        s += c[m] * std::sin((m + 1) * std::numbers::pi * qx);
      if (dom.kind == DomainKind::rectangle) {
        const double qy = (x[1] - dom.lo[1]) / (dom.hi[1] - dom.lo[1]);
        s *= std::sin(std::numbers::pi * qy);
      }
    }
    return s;
  };
}

}  // namespace detail

// --------------------------------------------------------------------------
// energy: sup-L2 plus dissipation controlled by data
// --------------------------------------------------------------------------

inline ExperimentReport run_energy_experiment(const ProblemBlueprint& bp,
                                              const SolverConfig& cfg = {}) {
  ExperimentReport rep;
  rep.name = "energy";
  ProblemSpec p = instantiate(bp);
  if (!detail::gate(rep, p)) return rep;

  const SolveResult res = solve_primal(p, cfg);
  detail::series_table(rep, p.time, res);
  rep.metric("min_col_deficit", detail::min_col_deficit(res));

  const double u0_2 = res.l2.v[0];
  rep.metric("u0_l2", u0_2);
  rep.metric("sup_l2", *std::max_element(res.l2.v.begin(), res.l2.v.end()));

  if (p.source.is_zero()) {
    // ||u^k||_2^2 + 2 nu sum_{j<=k} dt D(u^j) <= ||u0||_2^2, slack per step
    double slack = -std::numeric_limits<double>::infinity();
    double diss = 0.0;
    for (int k = 1; k <= p.time.steps; ++k) {
      diss += 2.0 * p.nu * p.time.dt() * res.grad_energy.v[k];
      slack = std::max(slack, res.l2.v[k] * res.l2.v[k] + diss - u0_2 * u0_2);
    }
    rep.metric("dissipation_total", diss);
    rep.require_le("energy_balance_slack", slack, 1e-10 * u0_2 * u0_2);
    rep.metric("c_emp", u0_2 > 0.0 ? detail::energy_functional(p, res) / u0_2 : 0.0);
    rep.finalize();
    return rep;
  }

  // Sourced problem: the constant, not the inequality, is the testable
  // object. It must be stable under refinement and drift rescaling.
  auto c_emp = [&](const ProblemSpec& q, const SolveResult& r) {
    const double denom = lp_norm(*q.grid, q.u0, 2.0) + detail::source_dual_norm(q);
    if (denom <= 0.0) throw ContractViolation("sourced energy run has zero data");
    return detail::energy_functional(q, r) / denom;
  };
  const double c0 = c_emp(p, res);
  rep.metric("c_emp", c0);

  for (int factor : {2, 4}) {
    ProblemSpec pf = instantiate(bp, factor);
    const double cf = c_emp(pf, solve_primal(pf, cfg));
    rep.metric("c_emp_refine_x" + std::to_string(factor), cf);
    rep.require_le("c_emp_stability_refine_x" + std::to_string(factor),
                   std::abs(cf / c0 - 1.0), 0.2);
  }

  ProblemBlueprint bs = bp;
  bs.drift = scaled_drift(bp.drift, 4.0);
  ProblemSpec ps = instantiate(bs);
  if (!detail::gate(rep, ps)) return rep;
  const double cs = c_emp(ps, solve_primal(ps, cfg));
  rep.metric("c_emp_drift_x4", cs);
  rep.require_le("c_emp_stability_drift_x4", std::abs(cs / c0 - 1.0), 0.2);

  rep.finalize();
  return rep;
}

// --------------------------------------------------------------------------
// l1_decay: mass-norm monotonicity up to the source contribution
// --------------------------------------------------------------------------

inline ExperimentReport run_l1_decay_experiment(const ProblemBlueprint& bp,
                                                const SolverConfig& cfg = {},
                                                double t1 = 0.25,
                                                double t2 = 0.75) {
  if (!(t1 < t2)) throw ConfigError("sample times must satisfy t1 < t2");
  ExperimentReport rep;
  rep.name = "l1_decay";
  ProblemSpec p = instantiate(bp);
  if (!detail::gate(rep, p)) return rep;

  const SpaceGrid& g = *p.grid;
  const SolveResult res = solve_primal(p, cfg);
  detail::series_table(rep, p.time, res);
  rep.metric("min_col_deficit", detail::min_col_deficit(res));

  const double dt = p.time.dt();
  auto part_mass = [&](std::span<const double> v, double sign) {
    double m = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
      m += g.weights[j] * std::max(sign * v[j], 0.0);
    return m;
  };
  std::vector<double> f_l1(p.time.nodes(), 0.0), f_pos(p.time.nodes(), 0.0),
      f_neg(p.time.nodes(), 0.0);
  std::vector<double> fk(g.size());
  if (!p.source.is_zero())
    for (int k = 1; k <= p.time.steps; ++k) {
      for (std::size_t j = 0; j < g.size(); ++j)
        fk[j] = p.source(g.nodes[j], p.time.node(k));
      f_l1[k] = lp_norm(g, fk, 1.0);
      f_pos[k] = part_mass(fk, 1.0);
      f_neg[k] = part_mass(fk, -1.0);
    }

  double total_f = 0.0;
  for (int k = 1; k <= p.time.steps; ++k) total_f += dt * f_l1[k];
  const double scale = res.l1.v[0] + total_f;
  const double tol = 1e-12 * std::max(scale, 1e-30);

  double viol = -std::numeric_limits<double>::infinity();
  double viol_pos = viol, viol_neg = viol;
  std::vector<double> pos(p.time.nodes()), neg(p.time.nodes());
  for (int k = 0; k <= p.time.steps; ++k) {
    pos[k] = part_mass(res.traj.frames[k], 1.0);
    neg[k] = part_mass(res.traj.frames[k], -1.0);
  }
  for (int k = 0; k < p.time.steps; ++k) {
    viol = std::max(viol, res.l1.v[k + 1] - res.l1.v[k] - dt * f_l1[k + 1]);
    viol_pos = std::max(viol_pos, pos[k + 1] - pos[k] - dt * f_pos[k + 1]);
    viol_neg = std::max(viol_neg, neg[k + 1] - neg[k] - dt * f_neg[k + 1]);
  }
  rep.require_le("stepwise_l1", viol, tol);
  rep.require_le("stepwise_l1_positive_part", viol_pos, tol);
  rep.require_le("stepwise_l1_negative_part", viol_neg, tol);

  const int k1 = p.time.nearest_node(t1), k2 = p.time.nearest_node(t2);
  double window_f = 0.0;
  for (int k = k1 + 1; k <= k2; ++k) window_f += dt * f_l1[k];
  rep.metric("window_t1", p.time.node(k1));
  rep.metric("window_t2", p.time.node(k2));
  rep.require_le("window_l1", res.l1.v[k2] - res.l1.v[k1] - window_f, tol);

  rep.metric("l1_initial", res.l1.v[0]);
  rep.metric("l1_final", res.l1.v.back());
  rep.finalize();
  return rep;
}

// --------------------------------------------------------------------------
// max_principle: sup bound by data, with level-set occupation curves
// --------------------------------------------------------------------------

inline ExperimentReport run_max_principle_experiment(const ProblemBlueprint& bp,
                                                     const SolverConfig& cfg = {},
                                                     double s = 0.0) {
  const int n = bp.domain.dim;
  if (s == 0.0) s = n + 2.0;
  if (!(s > (n + 2) / 2.0))
    throw ConfigError("integrability exponent s = " + detail::fmt(s) +
                      " must exceed (n+2)/2 = " + detail::fmt((n + 2) / 2.0));
  ExperimentReport rep;
  rep.name = "max_principle";
  rep.metric("s", s);
  rep.metric("gamma", 2.0 / (n + 2) - 1.0 / s);
  rep.metric("q", 2.0 * (n + 2) / (n + 4));

  ProblemSpec p = instantiate(bp);
  if (!detail::gate(rep, p)) return rep;

  const SolveResult res = solve_primal(p, cfg);
  detail::series_table(rep, p.time, res);
  rep.metric("min_row_deficit", detail::min_row_deficit(res));

  const auto& u0 = p.u0;
  const double hi0 = std::max(0.0, *std::max_element(u0.begin(), u0.end()));
  const double lo0 = std::min(0.0, *std::min_element(u0.begin(), u0.end()));
  double hi = -std::numeric_limits<double>::infinity(), lo = -hi;
  for (const auto& frame : res.traj.frames)
    for (double v : frame) {
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
  rep.metric("sup_u", hi);
  rep.metric("inf_u", lo);

  if (p.source.is_zero()) {
    rep.require_le("upper_bound_slack", hi - hi0, 1e-12);
    rep.require_le("lower_bound_slack", lo0 - lo, 1e-12);
  } else {
    auto c_emp = [&](const ProblemSpec& q, const SolveResult& r) {
      const double fs = detail::source_lp_spacetime(q, s);
      if (!(fs > 0.0)) throw ContractViolation("sourced sup run has zero source");
      const double sup = *std::max_element(r.linf.v.begin(), r.linf.v.end());
      return std::max(0.0, sup - r.linf.v[0]) / fs;
    };
    const double c0 = c_emp(p, res);
    rep.metric("c_emp", c0);

    ProblemSpec pf = instantiate(bp, 2);
    const double cf = c_emp(pf, solve_primal(pf, cfg));
    rep.metric("c_emp_refine_x2", cf);
    rep.require_le("c_emp_stability_refine_x2", std::abs(cf / c0 - 1.0), 0.2);

    ProblemBlueprint bs = bp;
    bs.drift = scaled_drift(bp.drift, 4.0);
    ProblemSpec ps = instantiate(bs);
    if (!detail::gate(rep, ps)) return rep;
    const double cs = c_emp(ps, solve_primal(ps, cfg));
    rep.metric("c_emp_drift_x4", cs);
    rep.require_le("c_emp_stability_drift_x4", std::abs(cs / c0 - 1.0), 0.2);
  }

  Table levels;
  levels.name = "level_sets";
  levels.columns = {"level", "spacetime_measure", "sup_energy", "grad_energy"};
  const double top = std::max(hi, std::abs(lo));
  for (int j = 1; j <= 8; ++j) {
    const double level = top * j / 8.0;
    const auto ls = level_set_report(res.traj, level);
    levels.rows.push_back({ls.level, ls.measure, ls.sup_energy, ls.grad_energy});
  }
  rep.tables.push_back(std::move(levels));

  rep.finalize();
  return rep;
}

// --------------------------------------------------------------------------
// stability_sweep: solution distance controlled by drift distance
// --------------------------------------------------------------------------

inline ExperimentReport run_stability_sweep(const ProblemBlueprint& bp,
                                            const std::vector<double>& scales,
                                            const SolverConfig& cfg = {}) {
  if (scales.size() < 2) throw ConfigError("stability sweep needs at least two scales");
  for (std::size_t m = 1; m < scales.size(); ++m)
    if (!(scales[m] < scales[m - 1]))
      throw ConfigError("mollifier scales must decrease strictly");

  ExperimentReport rep;
  rep.name = "stability_sweep";
  ProblemSpec p = instantiate(bp);
  const SpaceGrid& g = *p.grid;

  DriftSpec base = p.drift.kind == DriftSpec::Kind::sampled
                       ? p.drift
                       : sample_drift(p.drift, g, p.time);
  p.drift = base;
  if (!detail::gate(rep, p)) return rep;

  const SolveResult ref = solve_primal(p, cfg);

  SubdomainSchedule sched;
  for (double e : scales) sched.eps.push_back(2.0 * e);

  Table t;
  t.name = "levels";
  t.columns = {"scale", "drift_distance", "solution_distance", "ratio",
               "certificate_max_div", "certificate_pass"};

  std::vector<double> dist, ddist;
  bool any_gate_failure = false;
  for (std::size_t m = 0; m < scales.size(); ++m) {
    const auto subset = subdomain_grid(g, sched, m);
    const DriftSpec bm = mollify(base, {scales[m]}, g, p.time);
    const auto cert = certify_divergence(bm, g, p.time, std::nullopt, &subset);
    if (!cert.pass) {
      any_gate_failure = true;
      rep.notes.push_back("level " + std::to_string(m) +
                          ": certificate failed on the interior subdomain (max " +
                          detail::fmt(cert.max_divergence) + "), level not asserted");
      t.rows.push_back({scales[m], 0.0, 0.0, 0.0, cert.max_divergence, 0.0});
      continue;
    }

    ProblemSpec pm = p;
    pm.drift = bm;
    const SolveResult rm = solve_primal(pm, cfg);
    double d = 0.0;
    std::vector<double> diff(g.size());
    for (int k = 0; k <= p.time.steps; ++k) {
      for (std::size_t j = 0; j < g.size(); ++j)
        diff[j] = rm.traj.frames[k][j] - ref.traj.frames[k][j];
      d = std::max(d, lp_norm(g, diff, 1.0));
    }
    const double dd = drift_l2_distance(bm, base, g, p.time);
    dist.push_back(d);
    ddist.push_back(dd);
    t.rows.push_back({scales[m], dd, d, dd > 0.0 ? d / dd : 0.0,
                      cert.max_divergence, 1.0});
  }
  rep.tables.push_back(std::move(t));

  if (dist.size() >= 2) {
    const double c_emp = ddist[0] > 0.0 ? dist[0] / ddist[0] : 0.0;
    rep.metric("c_emp", c_emp);
    for (std::size_t m = 1; m < dist.size(); ++m) {
      rep.require_le("drift_distance_decrease_" + std::to_string(m), ddist[m],
                     ddist[m - 1]);
      rep.require_le("solution_distance_decrease_" + std::to_string(m), dist[m],
                     dist[m - 1]);
      rep.require_le("stability_headroom_" + std::to_string(m), dist[m],
                     1.5 * c_emp * ddist[m]);
    }
  }

  if (any_gate_failure) {
    rep.verdict = Verdict::hypothesis_violated;
    return rep;
  }
  rep.finalize();
  return rep;
}

// --------------------------------------------------------------------------
// nonuniqueness: the explicit shell solution with zero initial data
// --------------------------------------------------------------------------

inline ExperimentReport verify_nonuniqueness_example(int n, int samples = 100,
                                                     unsigned seed = 20260813u) {
  if (n < 2) throw ConfigError("shell example needs ambient n >= 2");
  ExperimentReport rep;
  rep.name = "nonuniqueness";
  rep.metric("n", n);

  std::mt19937 rng(seed);
  std::vector<std::pair<double, double>> pts;
  pts.reserve(samples + 1);
  pts.emplace_back(0.5, 0.3);
  for (int i = 1; i < samples; ++i)
    pts.emplace_back(0.01 + 0.98 * detail::u01(rng),
                     0.05 + 0.95 * detail::u01(rng));

  using namespace shell;
  double id_resid = 0.0, pde_resid = 0.0, b0_lo = 1e300, b0_hi = -1e300;
  for (auto [r, t] : pts) {
    id_resid = std::max(id_resid,
                        std::abs(zeta_t(r, t) - zeta_rr(r, t) + (r / t) * zeta_r(r, t)));
    const double G = std::exp(-r * r / (4.0 * t));
    const double z = zeta(r, t);
    const double ut = (zeta_t(r, t) + z * r * r / (4.0 * t * t)) * G;
    const double ur = (zeta_r(r, t) - z * r / (2.0 * t)) * G;
    const double urr = (zeta_rr(r, t) - zeta_r(r, t) * r / t - z / (2.0 * t) +
                        z * r * r / (4.0 * t * t)) *
                       G;
    const double lap = urr + (n - 1) / r * ur;
    const double b = b0(n, r, t);
    pde_resid = std::max(pde_resid, std::abs(ut - lap + (b / r) * ur));
    b0_lo = std::min(b0_lo, b);
    b0_hi = std::max(b0_hi, b);
  }
  rep.require_le("profile_identity_residual", id_resid, 1e-12);
  rep.require_le("pde_residual", pde_resid, 1e-8);
  rep.require_ge("b0_lower", b0_lo, n - 1.0);
  rep.require_le("b0_upper", b0_hi, static_cast<double>(n));

  double boundary = 0.0;
  for (auto [r, t] : pts)
    boundary = std::max(boundary, std::abs(zeta(1.0, t) * std::exp(-1.0 / (4.0 * t))));
  rep.require_le("boundary_value", boundary, 0.0);

  const double omega = Domain::unit_sphere_area(n);
  auto l2sq = [&](double t) {
    return omega * detail::simpson(
                       [&](double r) {
                         const double z = zeta(r, t);
                         return z * z * std::exp(-r * r / (2.0 * t)) *
                                std::pow(r, n - 1);
                       },
                       0.0, 1.0, 40000);
  };
  Table decay;
  decay.name = "l2_decay";
  decay.columns = {"t", "l2_squared"};
  const std::array<double, 3> ts{1e-1, 1e-2, 1e-3};
  std::array<double, 3> vals{};
  for (std::size_t i = 0; i < ts.size(); ++i) {
    vals[i] = l2sq(ts[i]);
    decay.rows.push_back({ts[i], vals[i]});
  }
  rep.tables.push_back(std::move(decay));
  const double slope =
      (std::log(vals[0]) - std::log(vals[2])) / (std::log(ts[0]) - std::log(ts[2]));
  rep.metric("l2_decay_slope", slope);
  rep.require_ge("l2_decay_slope", slope, n / 2.0 - 0.1);

  // |du/dr|^2 <= 2 zeta_r^2 G^2 + zeta^2 r^2/(2t^2) G^2; the first term
  // integrates below c_a e^{-1/2t} t^{-2} because 2(r-1) - r^2/2 =
  // -(r-2)^2/2 <= -1/2 on (0,1], the second below c_b t^{n/2-1} via the
  // Gaussian moment integral.
  const double c_a = 2.0 * omega / n;
  const double c_b = omega / 4.0 * std::pow(2.0, (n + 2) / 2.0) *
                     std::tgamma((n + 2) / 2.0);
  rep.metric("grad_bound_c_a", c_a);
  rep.metric("grad_bound_c_b", c_b);
  double worst_ratio = 0.0;
  Table grad;
  grad.name = "gradient_energy";
  grad.columns = {"t", "grad_l2_squared", "bound"};
  for (double t : {0.05, 0.1, 0.2, 0.5, 1.0}) {
    const double val =
        omega * detail::simpson(
                    [&](double r) {
                      const double G = std::exp(-r * r / (4.0 * t));
                      const double ur =
                          (zeta_r(r, t) - zeta(r, t) * r / (2.0 * t)) * G;
                      return ur * ur * std::pow(r, n - 1);
                    },
                    0.0, 1.0, 20000);
    const double bound = c_a * std::exp(-1.0 / (2.0 * t)) / (t * t) +
                         c_b * std::pow(t, n / 2.0 - 1.0);
    grad.rows.push_back({t, val, bound});
    worst_ratio = std::max(worst_ratio, val / bound);
  }
  rep.tables.push_back(std::move(grad));
  rep.require_le("gradient_energy_bound_ratio", worst_ratio, 1.0 + 1e-6);
  rep.notes.push_back(
      "a monotone scheme from zero data returns zero; the second solution is "
      "certified analytically, not by simulation");

  rep.finalize();
  return rep;
}

// --------------------------------------------------------------------------
// heat_kernel: the growing-norm family on the whole space
// --------------------------------------------------------------------------

inline ExperimentReport verify_heat_kernel_family(int n, double alpha) {
  if (n < 2) throw ConfigError("heat kernel family needs n >= 2");
  if (!(alpha < n / 4.0))
    throw ConfigError("alpha = " + detail::fmt(alpha) +
                      " must be below n/4 = " + detail::fmt(n / 4.0) +
                      " for the family to stay in the energy class");
  ExperimentReport rep;
  rep.name = "heat_kernel";
  rep.metric("n", n);
  rep.metric("alpha", alpha);

  const double T = 0.5;
  const double R = 8.0 * std::sqrt(T);  // Gaussian tail below 1e-14 relative
  const double omega = Domain::unit_sphere_area(n);
  const std::array<double, 3> ts{0.125, 0.25, 0.5};

  auto l2sq = [&](double t) {
    return omega * std::pow(t, -2.0 * alpha) *
           detail::simpson(
               [&](double r) {
                 return std::exp(-r * r / (2.0 * t)) * std::pow(r, n - 1);
               },
               0.0, R, 20000);
  };
  auto gradsq = [&](double t) {
    return omega * std::pow(t, -2.0 * alpha) / (4.0 * t * t) *
           detail::simpson(
               [&](double r) {
                 return r * r * std::exp(-r * r / (2.0 * t)) * std::pow(r, n - 1);
               },
               0.0, R, 20000);
  };

  Table t;
  t.name = "norms";
  t.columns = {"t", "l2_squared", "closed_form", "grad_squared",
               "grad_closed_form"};
  std::array<double, 3> v2{}, vg{};
  double worst2 = 0.0, worstg = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    v2[i] = l2sq(ts[i]);
    vg[i] = gradsq(ts[i]);
    const double exact2 =
        std::pow(ts[i], -2.0 * alpha) * std::pow(2.0 * std::numbers::pi * ts[i], n / 2.0);
    const double exactg = n / 4.0 * std::pow(2.0 * std::numbers::pi, n / 2.0) *
                          std::pow(ts[i], n / 2.0 - 1.0 - 2.0 * alpha);
    worst2 = std::max(worst2, std::abs(v2[i] / exact2 - 1.0));
    worstg = std::max(worstg, std::abs(vg[i] / exactg - 1.0));
    t.rows.push_back({ts[i], v2[i], exact2, vg[i], exactg});
  }
  rep.tables.push_back(std::move(t));
  rep.require_le("l2_closed_form_relerr", worst2, 0.01);
  rep.require_le("grad_closed_form_relerr", worstg, 0.01);

  auto fit_slope = [&](const std::array<double, 3>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double xi = std::log(ts[i]), yi = std::log(y[i]);
      sx += xi; sy += yi; sxx += xi * xi; sxy += xi * yi;
    }
    return (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  };
  const double slope2 = fit_slope(v2), slopeg = fit_slope(vg);
  const double target2 = n / 2.0 - 2.0 * alpha;
  const double targetg = n / 2.0 - 1.0 - 2.0 * alpha;
  rep.metric("l2_slope", slope2);
  rep.metric("l2_slope_target", target2);
  rep.metric("grad_slope", slopeg);
  rep.metric("grad_slope_target", targetg);
  rep.require_le("l2_slope_error", std::abs(slope2 - target2),
                 0.02 * std::max(1.0, std::abs(target2)));
  rep.require_le("grad_slope_error", std::abs(slopeg - targetg),
                 0.02 * std::max(1.0, std::abs(targetg)));

  // The drift of the family stays in weak-L_n uniformly over resolution.
  double qmin = 1e300, qmax = 0.0;
  for (int N : {100, 200, 400}) {
    const auto g = build_grid(Domain::ball(n), N);
    std::vector<double> mag(g.size());
    for (std::size_t j = 0; j < g.size(); ++j)
      mag[j] = std::abs(n - 2.0 * alpha) / g.nodes[j][0];
    const double q = weak_lp_quasinorm(g, mag, static_cast<double>(n));
    rep.metric("drift_weak_ln_n" + std::to_string(N), q);
    qmin = std::min(qmin, q);
    qmax = std::max(qmax, q);
  }
  rep.require_le("drift_weak_ln_spread", qmax / qmin - 1.0, 0.1);

  rep.finalize();
  return rep;
}

// --------------------------------------------------------------------------
// instability: exponential growth from an arbitrarily small drift change
// --------------------------------------------------------------------------

/// Witness that a drift perturbation smaller than target_eps (in space-time
/// L2 up to the horizon) still amplifies the fixed log profile by at least
/// 1/target_eps in L1. Construction re-checks both inequalities.
struct InstabilityCertificate {
  double target_eps;
  double exponent_a;
  double delta;
  double horizon;
  double perturbation_norm;
  double growth;

  static double perturbation(double delta, double t) {
    // ||ln|x| x||_{L2(B^2)} = sqrt(pi)/4, time-constant field over (0,t)
    return delta * std::sqrt(std::numbers::pi * t) / 4.0;
  }
  static double amplification(double delta, double t) {
    // ||ln|x|||_{L1(B^2)} = pi/2
    return std::expm1(delta * t) * std::numbers::pi / 2.0;
  }

  InstabilityCertificate(double eps, double a, double d)
      : target_eps(eps),
        exponent_a(a),
        delta(d),
        horizon(std::pow(d, -a)),
        perturbation_norm(perturbation(d, horizon)),
        growth(amplification(d, horizon)) {
    if (!(perturbation_norm < target_eps) || !(growth >= 1.0 / target_eps))
      throw ContractViolation("instability certificate inequalities violated");
  }
};

inline InstabilityCertificate find_instability_certificate(double eps, double a) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("target eps must lie in (0,1)");
  if (!(a > 1.0 && a < 2.0)) throw ConfigError("horizon exponent a must lie in (1,2)");

  auto feasible = [&](double d) {
    const double t = std::pow(d, -a);
    return InstabilityCertificate::perturbation(d, t) < eps &&
           InstabilityCertificate::amplification(d, t) >= 1.0 / eps;
  };
  if (feasible(1.0)) return InstabilityCertificate(eps, a, 1.0);

  double lo = 1e-12, hi = 1.0;
  if (!feasible(lo)) {
    const double t = std::pow(lo, -a);
    const bool pert_binds = !(InstabilityCertificate::perturbation(lo, t) < eps);
    throw NumericalError(std::string("no feasible perturbation size in (1e-12, 1]; "
                                     "binding constraint: ") +
                         (pert_binds ? "perturbation norm" : "growth"));
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return InstabilityCertificate(eps, a, lo);
}

inline ExperimentReport run_instability_experiment(double eps, double a = 1.5) {
  ExperimentReport rep;
  rep.name = "instability";
  rep.metric("target_eps", eps);
  rep.metric("exponent_a", a);

  const auto cert = find_instability_certificate(eps, a);
  rep.metric("delta", cert.delta);
  rep.metric("horizon", cert.horizon);
  rep.metric("perturbation_norm", cert.perturbation_norm);
  rep.metric("growth", cert.growth);
  rep.require_le("perturbation_below_eps", cert.perturbation_norm, eps);
  rep.require_ge("growth_at_least_inverse_eps", cert.growth, 1.0 / eps);

  // e^{dt} ln|x| solves the equation with the perturbed drift exactly; the
  // residual is assembled term by term, not from the cancelled form, and is
  // measured relative to the size of those terms because the exponential
  // factor and the 1/r^2 pair grow far beyond any absolute tolerance.
  const int n = 2;
  double resid = 0.0;
  std::mt19937 rng(417u);
  for (int i = 0; i < 100; ++i) {
    const double r = 0.01 + 0.98 * detail::u01(rng);
    const double t = cert.horizon * detail::u01(rng);
    const double e = std::exp(cert.delta * t);
    const double ut = cert.delta * e * std::log(r);
    const double ur = e / r;
    const double urr = -e / (r * r);
    const double lap = urr + (n - 1) / r * ur;
    const double adv = ((n - 2) / r - cert.delta * r * std::log(r)) * ur;
    const double scale = std::abs(ut) + std::abs(urr) +
                         std::abs((n - 1) / r * ur) + std::abs(adv);
    resid = std::max(resid, std::abs(ut - lap + adv) / scale);
  }
  rep.require_le("pde_residual", resid, 1e-10);

  // Independent quadrature for the two closed-form constants.
  const double q_pert = 2.0 * std::numbers::pi *
                        detail::simpson(
                            [](double r) {
                              return r <= 0.0 ? 0.0
                                              : r * r * r * std::log(r) * std::log(r);
                            },
                            0.0, 1.0, 20000);
  const double q_grow = 2.0 * std::numbers::pi *
                        detail::simpson(
                            [](double r) { return r <= 0.0 ? 0.0 : -r * std::log(r); },
                            0.0, 1.0, 20000);
  rep.metric("quad_pert_sq", q_pert);
  rep.metric("quad_growth_l1", q_grow);
  rep.require_le("pert_constant_relerr",
                 std::abs(q_pert / (std::numbers::pi / 16.0) - 1.0), 1e-3);
  rep.require_le("growth_constant_relerr",
                 std::abs(q_grow / (std::numbers::pi / 2.0) - 1.0), 1e-3);

  const double pert_quad = cert.delta * std::sqrt(q_pert * cert.horizon);
  const double grow_quad = std::expm1(cert.delta * cert.horizon) * q_grow;
  rep.require_le("perturbation_quad_relerr",
                 std::abs(pert_quad / cert.perturbation_norm - 1.0), 1e-3);
  rep.require_le("growth_quad_relerr", std::abs(grow_quad / cert.growth - 1.0),
                 1e-3);

  rep.finalize();
  return rep;
}

// --------------------------------------------------------------------------
// duality: the adjoint identity and the L1 / sup transfer estimates
// --------------------------------------------------------------------------

inline ExperimentReport run_duality_check(const ProblemBlueprint& bp,
                                          const SolverConfig& cfg = {},
                                          int probes = 3) {
  ExperimentReport rep;
  rep.name = "duality";
  ProblemSpec p = instantiate(bp);
  if (!detail::gate(rep, p)) return rep;
  const SpaceGrid& g = *p.grid;
  const double dt = p.time.dt();

  auto l1_ratio = [&](const DriftSpec& b, SolveResult* keep) {
    ProblemSpec q = p;
    q.drift = b;
    const SolveResult r = solve_primal(q, cfg);
    const double num = bochner_norm(r.l1, 1.0);
    double fmass = 0.0;
    for (int k = 1; k <= p.time.steps; ++k) {
      std::vector<double> fk(g.size());
      for (std::size_t j = 0; j < g.size(); ++j)
        fk[j] = q.source(g.nodes[j], p.time.node(k));
      fmass += dt * lp_norm(g, fk, 1.0);
    }
    const double denom = r.l1.v[0] + fmass;
    if (keep) *keep = r;
    return denom > 0.0 ? num / denom : -1.0;
  };

  SolveResult primal;
  const double ratio_b = l1_ratio(p.drift, &primal);
  if (ratio_b < 0.0) {
    rep.notes.push_back("trivial instance (zero data); L1 ratio skipped");
  } else {
    const double ratio_0 = l1_ratio(DriftSpec::zero(bp.domain.dim), nullptr);
    const double ratio_4 = l1_ratio(scaled_drift(p.drift, 4.0), nullptr);
    rep.metric("l1_ratio", ratio_b);
    rep.metric("l1_ratio_zero_drift", ratio_0);
    rep.metric("l1_ratio_drift_x4", ratio_4);
    rep.require_le("l1_ratio_vs_zero_drift", ratio_b, 2.0 * ratio_0);
    rep.require_le("l1_ratio_drift_x4_vs_zero_drift", ratio_4, 2.0 * ratio_0);
  }

  const std::vector<double> w_terminal(g.size(), 0.0);
  ProblemSpec p4 = p;
  p4.drift = scaled_drift(p.drift, 4.0);
  for (int i = 0; i < probes; ++i) {
    const auto probe = detail::probe_field(bp.domain, 91u + static_cast<unsigned>(i));
    SourceSpec gsrc;
    gsrc.fn = [probe](const std::array<double, 2>& x, double) { return probe(x); };
    std::vector<double> gnodes(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) gnodes[j] = probe(g.nodes[j]);
    const double g_inf = lp_norm(g, gnodes, std::numeric_limits<double>::infinity());

    const SolveResult dual = solve_dual(p, gsrc, w_terminal, cfg);

    double lhs = 0.0, rhs = detail::weighted_inner(g, p.u0, dual.traj.frames[0]);
    std::vector<double> fk(g.size());
    for (int k = 1; k <= p.time.steps; ++k) {
      lhs += dt * detail::weighted_inner(g, primal.traj.frames[k], gnodes);
      if (!p.source.is_zero()) {
        for (std::size_t j = 0; j < g.size(); ++j)
          fk[j] = p.source(g.nodes[j], p.time.node(k));
        rhs += dt * detail::weighted_inner(g, fk, dual.traj.frames[k - 1]);
      }
    }
    const double resid =
        std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-12});
    rep.metric("duality_residual_probe" + std::to_string(i), resid);
    rep.require_le("duality_identity_probe" + std::to_string(i), resid, 1e-9);

    const double c_b =
        *std::max_element(dual.linf.v.begin(), dual.linf.v.end()) / g_inf;
    const SolveResult dual4 = solve_dual(p4, gsrc, w_terminal, cfg);
    const double c_4 =
        *std::max_element(dual4.linf.v.begin(), dual4.linf.v.end()) / g_inf;
    rep.metric("dual_sup_ratio_probe" + std::to_string(i), c_b);
    rep.metric("dual_sup_ratio_x4_probe" + std::to_string(i), c_4);
    rep.require_le("dual_sup_stability_probe" + std::to_string(i),
                   std::max(c_4 / c_b, c_b / c_4), 2.0);
  }

  rep.finalize();
  return rep;
}

// --------------------------------------------------------------------------
// uniqueness: one limit is approached, zero data stays zero, runs repeat
// --------------------------------------------------------------------------

inline ExperimentReport run_uniqueness_check(const ProblemBlueprint& bp,
                                             const SolverConfig& cfg = {}) {
  ExperimentReport rep;
  rep.name = "uniqueness";
  ProblemSpec p = instantiate(bp);
  if (!detail::gate(rep, p)) return rep;

  const SolveResult r1 = solve_primal(p, cfg);
  const SolveResult r1b = solve_primal(p, cfg);
  double repeat_diff = 0.0;
  for (int k = 0; k <= p.time.steps; ++k)
    for (std::size_t j = 0; j < p.grid->size(); ++j)
      repeat_diff = std::max(
          repeat_diff, std::abs(r1.traj.frames[k][j] - r1b.traj.frames[k][j]));
  rep.require_le("determinism", repeat_diff, 0.0);

  ProblemSpec p2 = instantiate(bp, 2);
  ProblemSpec p4 = instantiate(bp, 4);
  const SolveResult r2 = solve_primal(p2, cfg);
  const SolveResult r4 = solve_primal(p4, cfg);

  auto distance = [&](const ProblemSpec& fine, const SolveResult& rf,
                      const ProblemSpec& coarse, const SolveResult& rc,
                      int factor) {
    double d = 0.0;
    std::vector<double> diff(coarse.grid->size());
    for (int k = 0; k <= coarse.time.steps; ++k) {
      const auto down =
          detail::restrict_field(*fine.grid, *coarse.grid, rf.traj.frames[factor * k]);
      for (std::size_t j = 0; j < coarse.grid->size(); ++j)
        diff[j] = down[j] - rc.traj.frames[k][j];
      d = std::max(d, lp_norm(*coarse.grid, diff, 1.0));
    }
    return d;
  };
  const double d1 = distance(p2, r2, p, r1, 2);
  const double d2 = distance(p4, r4, p2, r2, 2);
  rep.metric("distance_coarse", d1);
  rep.metric("distance_fine", d2);
  rep.require_le("distances_decrease", d2, d1);
  const double order = std::log2(d1 / d2);
  rep.metric("observed_order", order);
  rep.require_ge("observed_order", order, 0.5);

  Table t;
  t.name = "refinement";
  t.columns = {"resolution", "distance_to_next"};
  t.rows.push_back({static_cast<double>(bp.resolution), d1});
  t.rows.push_back({static_cast<double>(bp.resolution * 2), d2});
  rep.tables.push_back(std::move(t));

  ProblemSpec pz = p;
  pz.u0.assign(p.grid->size(), 0.0);
  pz.source = SourceSpec{};
  const SolveResult rz = solve_primal(pz, cfg);
  double z = 0.0;
  for (const auto& frame : rz.traj.frames)
    for (double v : frame) z = std::max(z, std::abs(v));
  rep.require_le("zero_data_stays_zero", z, 1e-14);

  rep.finalize();
  return rep;
}

}  // namespace driftlab
