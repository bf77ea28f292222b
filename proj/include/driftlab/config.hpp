#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftlab/errors.hpp"
#include "driftlab/experiments.hpp"
#include "driftlab/report.hpp"

namespace driftlab {

/// Experiment names in the fixed order used by --list and the test suite.
inline const std::vector<std::pair<std::string, std::string>>& experiment_catalog() {
  static const std::vector<std::pair<std::string, std::string>> catalog = {
      {"energy", "sup-L2 norm plus dissipation bounded by the data"},
      {"l1_decay", "mass norm nonincreasing up to the source contribution"},
      {"max_principle", "sup norm bounded by initial data and source integrability"},
      {"stability_sweep", "solution distance controlled by drift distance under smoothing"},
      {"nonuniqueness", "zero-data shell solution certified analytically"},
      {"heat_kernel", "self-similar family with growing norms, fitted exponents"},
      {"instability", "small drift perturbation forcing large solution growth"},
      {"duality", "adjoint identity and L1 / sup transfer estimates"},
      {"uniqueness", "single refinement limit, zero data stays zero, reruns repeat"},
  };
  return catalog;
}

struct RunConfig {
  std::string experiment;
  ProblemBlueprint blueprint;
  AdvectionScheme scheme = AdvectionScheme::upwind;
  bool has_problem = false;  ///< domain/time/physics blocks were given

  // experiment-specific parameters (defaults echoed into `resolved`)
  int n = 2;
  double alpha = 0.0;
  double eps = 0.5;
  double a = 1.5;
  double s = 0.0;  // 0 = use n + 2
  double t1 = 0.25, t2 = 0.75;
  std::vector<double> scales{0.2, 0.1, 0.05, 0.025};
  int probes = 3;
  int samples = 100;
  unsigned seed = 20260813u;

  ordered_json resolved;  ///< full config with defaults filled, for the report
};

namespace detail {

inline void reject_unknown(const ordered_json& obj,
                           std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known)
      throw ConfigError("unknown key '" + it.key() + "' in " + where + " block");
  }
}

inline double number_at(const ordered_json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw ConfigError(std::string("key '") + key + "' must be a number");
  return obj[key].get<double>();
}

/// Smooth bump on (0,1), 1 at the midpoint, 0 at the ends.
inline double unit_bump(double q) {
  const double w = 4.0 * q * (1.0 - q);
  if (!(w > 0.0)) return 0.0;
  return std::exp(1.0 - 1.0 / w);
}

/// Bump supported on (c - 0.2, c + 0.2).
inline double local_bump(double q, double c) {
  const double e = (q - c) / 0.2;
  if (!(std::abs(e) < 1.0)) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - e * e));
}

inline std::function<double(std::array<double, 2>)> field_preset(
    const std::string& name, const Domain& dom, const std::string& where) {
  auto qx = [dom](const std::array<double, 2>& x) {
    return (x[0] - dom.lo[0]) / (dom.hi[0] - dom.lo[0]);
  };
  auto qy = [dom](const std::array<double, 2>& x) {
    return (x[1] - dom.lo[1]) / (dom.hi[1] - dom.lo[1]);
  };
  const bool ball = dom.kind == DomainKind::radial_ball;
  const bool rect = dom.kind == DomainKind::rectangle;
  const double radius = dom.hi[0];

  if (name == "zero") return nullptr;
  if (name == "bump") {
    if (ball)
      return [radius](std::array<double, 2> x) {
        const double w = 1.0 - (x[0] / radius) * (x[0] / radius);
        return w > 0.0 ? std::exp(1.0 - 1.0 / w) : 0.0;
      };
    if (rect)
      return [qx, qy](std::array<double, 2> x) {
        return unit_bump(qx(x)) * unit_bump(qy(x));
      };
    return [qx](std::array<double, 2> x) { return unit_bump(qx(x)); };
  }
  if (name == "sine") {
    if (ball)
      return [radius](std::array<double, 2> x) {
        return std::cos(std::numbers::pi * x[0] / (2.0 * radius));
      };
    if (rect)
      return [qx, qy](std::array<double, 2> x) {
        return std::sin(std::numbers::pi * qx(x)) * std::sin(std::numbers::pi * qy(x));
      };
    return [qx](std::array<double, 2> x) { return std::sin(std::numbers::pi * qx(x)); };
  }
  if (name == "signed_bumps") {
    if (ball)
      return [radius](std::array<double, 2> x) {
        const double rho = x[0] / radius;
        return (1.0 - rho * rho) * (1.0 - 2.0 * rho);
      };
    if (rect)
      return [qx, qy](std::array<double, 2> x) {
        return (local_bump(qx(x), 0.25) - local_bump(qx(x), 0.75)) * unit_bump(qy(x));
      };
    return [qx](std::array<double, 2> x) {
      return local_bump(qx(x), 0.25) - local_bump(qx(x), 0.75);
    };
  }
  if (name == "parabolic") {
    if (ball)
      return [radius](std::array<double, 2> x) {
        const double rho = x[0] / radius;
        return 1.0 - rho * rho;
      };
    if (rect)
      return [qx, qy](std::array<double, 2> x) {
        return 16.0 * qx(x) * (1.0 - qx(x)) * qy(x) * (1.0 - qy(x));
      };
    return [qx](std::array<double, 2> x) { return 4.0 * qx(x) * (1.0 - qx(x)); };
  }
  if (name == "one")
    return [](std::array<double, 2>) { return 1.0; };
  throw ConfigError("unknown " + where + " preset '" + name +
                    "'; available: zero, bump, sine, signed_bumps, parabolic, one");
}

inline DriftSpec parse_drift(const ordered_json& obj, const Domain& dom,
                             const GridPtr& grid, const TimeGrid& time) {
  if (!obj.is_object() || !obj.contains("kind"))
    throw ConfigError("physics.drift must be an object with a 'kind'");
  const std::string kind = obj["kind"].get<std::string>();
  const int n = dom.dim;

  if (kind == "zero") {
    reject_unknown(obj, {"kind"}, "physics.drift");
    return DriftSpec::zero(n);
  }
  if (kind == "constant") {
    reject_unknown(obj, {"kind", "value"}, "physics.drift");
    if (!obj.contains("value") || !obj["value"].is_array())
      throw ConfigError("constant drift needs a 'value' array");
    const auto& v = obj["value"];
    if (static_cast<int>(v.size()) != (dom.kind == DomainKind::rectangle ? 2 : 1))
      throw ConfigError("constant drift 'value' has wrong length for the domain");
    std::array<double, 2> c{v[0].get<double>(),
                            v.size() > 1 ? v[1].get<double>() : 0.0};
    return DriftSpec::constant(n, c);
  }
  if (kind == "linear") {
    reject_unknown(obj, {"kind", "coef"}, "physics.drift");
    if (!obj.contains("coef")) throw ConfigError("linear drift needs 'coef'");
    return DriftSpec::linear(n, obj["coef"].get<double>());
  }
  if (kind == "radial_power") {
    reject_unknown(obj, {"kind", "alpha"}, "physics.drift");
    if (!obj.contains("alpha")) throw ConfigError("radial_power drift needs 'alpha'");
    return DriftSpec::radial_power(n, obj["alpha"].get<double>());
  }
  if (kind == "nonuniqueness") {
    reject_unknown(obj, {"kind"}, "physics.drift");
    return DriftSpec::nonuniqueness(n);
  }
  if (kind == "instability") {
    reject_unknown(obj, {"kind", "delta"}, "physics.drift");
    if (n != 2) throw ConfigError("instability drift is two-dimensional");
    return DriftSpec::instability(number_at(obj, "delta", 1.0));
  }
  if (kind == "sampled") {
    reject_unknown(obj, {"kind", "file"}, "physics.drift");
    if (!obj.contains("file")) throw ConfigError("sampled drift needs 'file'");
    const std::string file = obj["file"].get<std::string>();
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open sampled drift file " + file);
    auto d = std::make_shared<SampledDrift>(
        read_sampled_drift_csv(in, grid, time));
    return DriftSpec::sampled(std::move(d));
  }
  throw ConfigError("unknown drift kind '" + kind +
                    "'; catalog: zero, constant, linear, radial_power, "
                    "nonuniqueness, instability, sampled");
}

}  // namespace detail

inline RunConfig parse_config_json(const ordered_json& root,
                                   const std::string& origin) {
  if (!root.is_object())
    throw ConfigError(origin + ": top level must be a JSON object");
  detail::reject_unknown(
      root, {"experiment", "domain", "time", "physics", "parameters", "tolerances"},
      "top-level");

  RunConfig cfg;
  if (!root.contains("experiment"))
    throw ConfigError(origin + ": missing 'experiment'");
  cfg.experiment = root["experiment"].get<std::string>();
  bool known = false;
  std::string names;
  for (const auto& [name, desc] : experiment_catalog()) {
    if (cfg.experiment == name) known = true;
    names += (names.empty() ? "" : ", ") + name;
  }
  if (!known)
    throw ConfigError("unknown experiment '" + cfg.experiment + "'; one of: " + names);

  const bool needs_problem = cfg.experiment != "nonuniqueness" &&
                             cfg.experiment != "heat_kernel" &&
                             cfg.experiment != "instability";

  ProblemBlueprint& bp = cfg.blueprint;
  std::string u0_preset = "zero", f_preset = "zero", scheme = "upwind";
  ordered_json drift_json{{"kind", "zero"}};

  if (root.contains("domain")) {
    const auto& d = root["domain"];
    detail::reject_unknown(d, {"kind", "bounds", "n", "radius", "resolution"},
                           "domain");
    if (!d.contains("kind")) throw ConfigError("domain needs 'kind'");
    const std::string kind = d["kind"].get<std::string>();
    if (kind == "interval") {
      if (!d.contains("bounds") || d["bounds"].size() != 2)
        throw ConfigError("interval domain needs bounds:[a,b]");
      bp.domain = Domain::interval(d["bounds"][0].get<double>(),
                                   d["bounds"][1].get<double>());
    } else if (kind == "rectangle") {
      if (!d.contains("bounds") || d["bounds"].size() != 4)
        throw ConfigError("rectangle domain needs bounds:[x0,x1,y0,y1]");
      bp.domain = Domain::rectangle(
          {d["bounds"][0].get<double>(), d["bounds"][2].get<double>()},
          {d["bounds"][1].get<double>(), d["bounds"][3].get<double>()});
    } else if (kind == "ball") {
      const int n = static_cast<int>(detail::number_at(d, "n", 2));
      bp.domain = Domain::ball(n, detail::number_at(d, "radius", 1.0));
    } else {
      throw ConfigError("unknown domain kind '" + kind +
                        "'; one of: interval, rectangle, ball");
    }
    if (!d.contains("resolution")) throw ConfigError("domain needs 'resolution'");
    bp.resolution = d["resolution"].get<int>();
    cfg.has_problem = true;
  } else if (needs_problem) {
    throw ConfigError("experiment '" + cfg.experiment + "' needs a domain block");
  }

  if (root.contains("time")) {
    const auto& t = root["time"];
    detail::reject_unknown(t, {"T", "steps"}, "time");
    bp.time = TimeGrid(detail::number_at(t, "T", 1.0),
                       static_cast<int>(detail::number_at(t, "steps", 100)));
  } else if (needs_problem) {
    throw ConfigError("experiment '" + cfg.experiment + "' needs a time block");
  }

  if (root.contains("physics")) {
    const auto& ph = root["physics"];
    detail::reject_unknown(ph, {"nu", "drift", "u0", "f", "advection"}, "physics");
    bp.nu = detail::number_at(ph, "nu", 1.0);
    if (!(bp.nu > 0.0)) throw ConfigError("viscosity nu must be positive");
    if (ph.contains("u0")) u0_preset = ph["u0"].get<std::string>();
    if (ph.contains("f")) f_preset = ph["f"].get<std::string>();
    if (ph.contains("advection")) scheme = ph["advection"].get<std::string>();
    if (scheme == "upwind")
      cfg.scheme = AdvectionScheme::upwind;
    else if (scheme == "centered")
      cfg.scheme = AdvectionScheme::centered;
    else
      throw ConfigError("unknown advection scheme '" + scheme +
                        "'; one of: upwind, centered");
    if (ph.contains("drift")) {
      drift_json = ph["drift"];
      const GridPtr grid = make_grid(bp.domain, bp.resolution);
      bp.drift = detail::parse_drift(ph["drift"], bp.domain, grid, bp.time);
    } else {
      bp.drift = DriftSpec::zero(bp.domain.dim);
    }
    const auto u0_fn = detail::field_preset(u0_preset, bp.domain, "u0");
    if (u0_fn) bp.u0 = u0_fn;
    const auto f_fn = detail::field_preset(f_preset, bp.domain, "f");
    if (f_fn) bp.f = [f_fn](std::array<double, 2> x, double) { return f_fn(x); };
  } else if (needs_problem) {
    throw ConfigError("experiment '" + cfg.experiment + "' needs a physics block");
  } else {
    bp.drift = DriftSpec::zero(bp.domain.dim);
  }

  if (root.contains("parameters")) {
    const auto& pr = root["parameters"];
    detail::reject_unknown(
        pr, {"n", "alpha", "eps", "a", "s", "t1", "t2", "scales", "probes",
             "samples", "seed"},
        "parameters");
    cfg.n = static_cast<int>(detail::number_at(pr, "n", cfg.n));
    cfg.alpha = detail::number_at(pr, "alpha", cfg.alpha);
    cfg.eps = detail::number_at(pr, "eps", cfg.eps);
    cfg.a = detail::number_at(pr, "a", cfg.a);
    cfg.s = detail::number_at(pr, "s", cfg.s);
    cfg.t1 = detail::number_at(pr, "t1", cfg.t1);
    cfg.t2 = detail::number_at(pr, "t2", cfg.t2);
    cfg.probes = static_cast<int>(detail::number_at(pr, "probes", cfg.probes));
    cfg.samples = static_cast<int>(detail::number_at(pr, "samples", cfg.samples));
    cfg.seed = static_cast<unsigned>(detail::number_at(pr, "seed", cfg.seed));
    if (pr.contains("scales")) {
      if (!pr["scales"].is_array()) throw ConfigError("parameters.scales must be an array");
      cfg.scales.clear();
      for (const auto& v : pr["scales"]) cfg.scales.push_back(v.get<double>());
    }
  }

  if (root.contains("tolerances")) {
    const auto& tl = root["tolerances"];
    detail::reject_unknown(tl, {"certificate"}, "tolerances");
    if (tl.contains("certificate")) {
      const double tol = tl["certificate"].get<double>();
      if (!(tol > 0.0)) throw ConfigError("tolerances.certificate must be positive");
      bp.certificate_tol = tol;
    }
  }

  // Reject hypothesis violations that are knowable at parse time, with the
  // violated condition spelled out.
  if (cfg.experiment == "max_principle") {
    const int n = bp.domain.dim;
    const double s = cfg.s == 0.0 ? n + 2.0 : cfg.s;
    if (!(s > (n + 2) / 2.0))
      throw ConfigError("integrability exponent s = " + detail::fmt(s) +
                        " violates the hypothesis s > (n+2)/2 = " +
                        detail::fmt((n + 2) / 2.0));
  }
  if (cfg.experiment == "heat_kernel" && !(cfg.alpha < cfg.n / 4.0))
    throw ConfigError("alpha = " + detail::fmt(cfg.alpha) +
                      " violates the hypothesis alpha < n/4 = " +
                      detail::fmt(cfg.n / 4.0));
  if (cfg.experiment == "instability") {
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0))
      throw ConfigError("target eps must lie in (0,1)");
    if (!(cfg.a > 1.0 && cfg.a < 2.0))
      throw ConfigError("horizon exponent a must lie in (1,2)");
  }
  if (cfg.experiment == "nonuniqueness" && cfg.n < 2)
    throw ConfigError("shell example needs n >= 2");

  // Echo the fully resolved configuration (defaults included).
  ordered_json r;
  r["experiment"] = cfg.experiment;
  if (cfg.has_problem) {
    ordered_json dom;
    switch (bp.domain.kind) {
      case DomainKind::interval:
        dom["kind"] = "interval";
        dom["bounds"] = {bp.domain.lo[0], bp.domain.hi[0]};
        break;
      case DomainKind::rectangle:
        dom["kind"] = "rectangle";
        dom["bounds"] = {bp.domain.lo[0], bp.domain.hi[0], bp.domain.lo[1],
                         bp.domain.hi[1]};
        break;
      case DomainKind::radial_ball:
        dom["kind"] = "ball";
        dom["n"] = bp.domain.dim;
        dom["radius"] = bp.domain.hi[0];
        break;
    }
    dom["resolution"] = bp.resolution;
    r["domain"] = std::move(dom);
    r["time"] = {{"T", bp.time.T}, {"steps", bp.time.steps}};
    ordered_json ph;
    ph["nu"] = bp.nu;
    ph["drift"] = drift_json;
    ph["u0"] = u0_preset;
    ph["f"] = f_preset;
    ph["advection"] = scheme;
    r["physics"] = std::move(ph);
  }
  ordered_json pr;
  pr["n"] = cfg.n;
  pr["alpha"] = cfg.alpha;
  pr["eps"] = cfg.eps;
  pr["a"] = cfg.a;
  pr["s"] = cfg.s;
  pr["t1"] = cfg.t1;
  pr["t2"] = cfg.t2;
  pr["scales"] = cfg.scales;
  pr["probes"] = cfg.probes;
  pr["samples"] = cfg.samples;
  pr["seed"] = cfg.seed;
  r["parameters"] = std::move(pr);
  if (bp.certificate_tol) r["tolerances"] = {{"certificate", *bp.certificate_tol}};
  cfg.resolved = std::move(r);
  return cfg;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  ordered_json root;
  try {
    root = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config_json(root, path);
}

/// Dispatch one parsed config through the harness. A failed feasibility
/// search is an experiment failure, not a crash.
inline ExperimentReport run_config(const RunConfig& cfg) {
  SolverConfig sc;
  sc.advection = cfg.scheme;
  try {
    if (cfg.experiment == "energy") return run_energy_experiment(cfg.blueprint, sc);
    if (cfg.experiment == "l1_decay")
      return run_l1_decay_experiment(cfg.blueprint, sc, cfg.t1, cfg.t2);
    if (cfg.experiment == "max_principle")
      return run_max_principle_experiment(cfg.blueprint, sc, cfg.s);
    if (cfg.experiment == "stability_sweep")
      return run_stability_sweep(cfg.blueprint, cfg.scales, sc);
    if (cfg.experiment == "nonuniqueness")
      return verify_nonuniqueness_example(cfg.n, cfg.samples, cfg.seed);
    if (cfg.experiment == "heat_kernel")
      return verify_heat_kernel_family(cfg.n, cfg.alpha);
    if (cfg.experiment == "instability")
      return run_instability_experiment(cfg.eps, cfg.a);
    if (cfg.experiment == "duality")
      return run_duality_check(cfg.blueprint, sc, cfg.probes);
    if (cfg.experiment == "uniqueness")
      return run_uniqueness_check(cfg.blueprint, sc);
  } catch (const NumericalError& e) {
    ExperimentReport rep;
    rep.name = cfg.experiment;
    rep.verdict = Verdict::fail;
    rep.notes.push_back(std::string("numerical failure: ") + e.what());
    return rep;
  }
  throw ContractViolation("unhandled experiment " + cfg.experiment);
}

}  // namespace driftlab
