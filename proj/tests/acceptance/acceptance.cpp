// Acceptance gate: one numbered criterion per invocation, one printed
// pass/fail line, exit 0 on pass and 1 on fail. Each criterion asserts a
// guarantee the library claims, at fixed sizes and pinned tolerances, and
// enforces the stated wall-clock budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <sys/wait.h>

#include "driftlab/config.hpp"
#include "driftlab/experiments.hpp"

using namespace driftlab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
  std::string label;
  bool ok = true;
  std::string detail;

  Criterion() = default;
  explicit Criterion(std::string l) : label(std::move(l)) {}

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
  void require_report(const ExperimentReport& rep, const std::string& what) {
    if (rep.verdict == Verdict::pass) return;
    for (const auto& c : rep.checks)
      if (!c.pass) {
        require(false, what + ": " + c.name + " measured " +
                           std::to_string(c.measured) + " vs bound " +
                           std::to_string(c.bound));
        return;
      }
    require(false, what + ": verdict " + to_string(rep.verdict));
  }
};

double metric(const ExperimentReport& rep, const std::string& key) {
  for (const auto& [k, v] : rep.metrics)
    if (k == key) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

ProblemBlueprint desk_blueprint(int resolution, int steps) {
  ProblemBlueprint bp;
  bp.domain = Domain::interval(0.0, 1.0);
  bp.resolution = resolution;
  bp.time = TimeGrid(1.0, steps);
  bp.nu = 1.0;
  bp.drift = DriftSpec::linear(1, -0.25);
  bp.u0 = [](std::array<double, 2> x) {
    return std::sin(2.0 * kPi * x[0]);
  };
  return bp;
}

// 1. closed-form second solution: residual, profile identity, decay slope
Criterion criterion_nonuniqueness() {
  Criterion c("non-uniqueness residuals and decay slope (n = 2, 3)");
  for (int n : {2, 3}) {
    const ExperimentReport rep = verify_nonuniqueness_example(n, 100);
    c.require_report(rep, "n = " + std::to_string(n));
  }
  return c;
}

// 2. instability certificates for three targets plus the pinned spot value
Criterion criterion_instability() {
  Criterion c("instability certificates at eps in {0.5, 0.25, 0.1}");
  for (double eps : {0.5, 0.25, 0.1}) {
    const auto cert = find_instability_certificate(eps, 1.5);
    c.require(cert.perturbation_norm < eps, "perturbation below eps");
    c.require(cert.growth >= 1.0 / eps, "growth above 1/eps");
    c.require_report(run_instability_experiment(eps, 1.5),
                     "eps = " + std::to_string(eps));
  }
  const InstabilityCertificate spot(0.5, 1.5, 0.5);
  c.require(std::abs(spot.horizon - 2.828) <= 5e-3, "spot horizon 2.828");
  c.require(std::abs(spot.perturbation_norm - 0.3725) <= 1e-3,
            "spot perturbation 0.3725");
  c.require(std::abs(spot.growth - 4.89) <= 1e-2, "spot growth 4.89");
  return c;
}

// 3. stepwise L1 decay at N = 200, K = 400, with and without a source
Criterion criterion_l1_decay() {
  Criterion c("stepwise L1 decay, N = 200, K = 400, f = 0 and f != 0");
  ProblemBlueprint bp = desk_blueprint(200, 400);
  c.require_report(run_l1_decay_experiment(bp, {}, 0.25, 0.75), "f = 0");
  bp.f = [](std::array<double, 2> x, double t) {
    return std::sin(3.0 * x[0] + t);
  };
  c.require_report(run_l1_decay_experiment(bp, {}, 0.25, 0.75), "f != 0");
  return c;
}

// 4. maximum principle at N = 200, K = 400, plus constant stability for f = 1
Criterion criterion_max_principle() {
  Criterion c("maximum principle and empirical constant stability");
  ProblemBlueprint bp = desk_blueprint(200, 400);
  c.require_report(run_max_principle_experiment(bp), "f = 0");
  ProblemBlueprint sourced = desk_blueprint(200, 400);
  sourced.u0 = nullptr;
  sourced.f = [](std::array<double, 2>, double) { return 1.0; };
  const ExperimentReport rep = run_max_principle_experiment(sourced);
  c.require_report(rep, "f = 1");
  c.require(std::isfinite(metric(rep, "c_emp")), "finite empirical constant");
  return c;
}

// 5. energy inequality at N = 200, K = 400, plus sourced constant stability
Criterion criterion_energy() {
  Criterion c("energy inequality and sourced constant stability");
  ProblemBlueprint bp = desk_blueprint(200, 400);
  c.require_report(run_energy_experiment(bp), "f = 0");
  ProblemBlueprint sourced = desk_blueprint(200, 400);
  sourced.u0 = nullptr;
  sourced.f = [](std::array<double, 2>, double) { return 1.0; };
  c.require_report(run_energy_experiment(sourced), "f = 1");
  return c;
}

// 6. four halving mollifier scales: monotone distances and linear headroom
Criterion criterion_stability_sweep() {
  Criterion c("stability sweep over four halving mollifier scales");
  ProblemBlueprint bp;
  bp.domain = Domain::interval(0.0, 2.0);
  bp.resolution = 160;
  bp.time = TimeGrid(0.25, 32);
  bp.nu = 1.0;
  bp.u0 = [](std::array<double, 2> x) {
    return std::sin(kPi * x[0] / 2.0);
  };
  const GridPtr g = make_grid(bp.domain, bp.resolution);
  auto d = std::make_shared<SampledDrift>();
  d->grid = g;
  d->time = bp.time;
  d->components = 1;
  std::vector<double> cvec(g->size());
  for (std::size_t j = 0; j < g->size(); ++j) {
    const double x = g->nodes[j][0];
    // base slope -1 dominates the tent flank, so the profile stays
    // nonincreasing and the divergence certificate holds after smoothing
    cvec[j] = -x - 0.25 * std::max(0.0, 1.0 - 4.0 * std::abs(x - 1.0));
  }
  d->values.assign(bp.time.nodes(), cvec);
  bp.drift = DriftSpec::sampled(std::move(d));
  c.require_report(run_stability_sweep(bp, {0.2, 0.1, 0.05, 0.025}),
                   "sweep");
  return c;
}

// 7. heat-kernel norm family: fitted slopes and the t = 0.5 value pi
Criterion criterion_heat_kernel() {
  Criterion c("heat-kernel norm growth exponents, n = 2");
  for (double alpha : {0.0, 0.2})
    c.require_report(verify_heat_kernel_family(2, alpha),
                     "alpha = " + std::to_string(alpha));
  const ExperimentReport rep = verify_heat_kernel_family(2, 0.0);
  bool found = false;
  for (const auto& row : rep.tables.front().rows)
    if (std::abs(row[0] - 0.5) < 1e-12) {
      found = true;
      c.require(std::abs(row[1] / kPi - 1.0) <= 0.01,
                "squared L2 norm at t = 0.5 equals pi within 1%");
    }
  c.require(found, "t = 0.5 sampled in the norm table");
  return c;
}

// 8. duality identity and two-sided estimate stability under drift rescaling
Criterion criterion_duality() {
  Criterion c("discrete duality identity and estimate stability");
  ProblemBlueprint bp = desk_blueprint(96, 128);
  bp.f = [](std::array<double, 2> x, double t) {
    return std::cos(2.0 * x[0] + t);
  };
  c.require_report(run_duality_check(bp, {}, 3), "3 probes");
  return c;
}

// 9. hypothesis gating through the command line: expanding drifts exit 2
Criterion criterion_gating(const std::string& cli) {
  Criterion c("violated divergence hypothesis gates the pipeline with exit 2");
  if (cli.empty()) {
    c.require(false, "needs --cli <path to driftlab binary>");
    return c;
  }
  const fs::path dir = fs::temp_directory_path() / "driftlab_acceptance";
  fs::create_directories(dir);

  const std::string expanding = R"({
    "experiment": "l1_decay",
    "domain": {"kind": "interval", "bounds": [0.0, 1.0], "resolution": 32},
    "time": {"T": 0.25, "steps": 16},
    "physics": {"drift": {"kind": "linear", "coef": 1.0}, "u0": "bump"},
    "parameters": {"t1": 0.05, "t2": 0.2}
  })";
  const std::string unstable = R"({
    "experiment": "energy",
    "domain": {"kind": "ball", "n": 2, "radius": 1.0, "resolution": 48},
    "time": {"T": 0.25, "steps": 16},
    "physics": {"drift": {"kind": "instability", "delta": 1.0}, "u0": "bump"}
  })";

  int idx = 0;
  for (const std::string& body : {expanding, unstable}) {
    const fs::path cfg = dir / ("gate" + std::to_string(idx) + ".json");
    const fs::path out = dir / ("gate_out" + std::to_string(idx));
    std::ofstream(cfg, std::ios::trunc) << body;
    const std::string cmd = cli + " -c " + cfg.string() + " -o " +
                            out.string() + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    c.require(rc != -1 && WEXITSTATUS(rc) == 2,
              "config " + std::to_string(idx) + " must exit with code 2");
    ++idx;
  }
  return c;
}

// 10. quadrature oracles at N = 400, 1e-3 relative
Criterion criterion_oracles() {
  Criterion c("quadrature oracles at resolution 400");
  const GridPtr ball = make_grid(Domain::ball(2, 1.0), 400);

  double area = 0.0;
  for (double w : ball->weights) area += w;
  c.require(std::abs(area / kPi - 1.0) <= 1e-3, "|B^2| = pi");

  std::vector<double> lnr(ball->size());
  for (std::size_t j = 0; j < ball->size(); ++j)
    lnr[j] = std::abs(std::log(ball->nodes[j][0]));
  c.require(std::abs(lp_norm(*ball, lnr, 1.0) / (kPi / 2.0) - 1.0) <= 1e-3,
            "L1 norm of ln|x| over the disc = pi/2");

  std::vector<double> inv(ball->size());
  for (std::size_t j = 0; j < ball->size(); ++j)
    inv[j] = 1.0 / ball->nodes[j][0];
  const double wk = weak_lp_quasinorm(*ball, inv, 2.0);
  c.require(std::abs(wk / std::sqrt(kPi) - 1.0) <= 1e-3,
            "weak L2 quasinorm of x/|x|^2 = sqrt(pi), measured " +
                std::to_string(wk / std::sqrt(kPi) - 1.0) + " relative error");

  const GridPtr line = make_grid(Domain::interval(0.0, 1.0), 400);
  const std::vector<double> one(line->size(), 1.0);
  c.require(std::abs(dual_sobolev_norm(*line, one) * std::sqrt(12.0) - 1.0) <=
                1e-3,
            "dual Sobolev norm of 1 on (0,1) = 1/sqrt(12)");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  int which = 0;
  std::string cli;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc)
      which = std::atoi(argv[++i]);
    else if (arg == "--cli" && i + 1 < argc)
      cli = argv[++i];
  }
  if (which < 1 || which > 10) {
    std::fprintf(stderr, "usage: acceptance --criterion <1..10> [--cli <path>]\n");
    return 2;
  }

  const double budgets[10] = {1.0, 1.0, 5.0, 10.0, 10.0, 60.0, 1.0, 30.0, 30.0, 10.0};
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  try {
    switch (which) {
      case 1: c = criterion_nonuniqueness(); break;
      case 2: c = criterion_instability(); break;
      case 3: c = criterion_l1_decay(); break;
      case 4: c = criterion_max_principle(); break;
      case 5: c = criterion_energy(); break;
      case 6: c = criterion_stability_sweep(); break;
      case 7: c = criterion_heat_kernel(); break;
      case 8: c = criterion_duality(); break;
      case 9: c = criterion_gating(cli); break;
      case 10: c = criterion_oracles(); break;
    }
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (elapsed > budgets[which - 1]) {
    c.ok = false;
    c.detail = "runtime " + std::to_string(elapsed) + "s exceeds budget " +
               std::to_string(budgets[which - 1]) + "s";
  }

  std::printf("criterion %2d [%s] %.2fs %s%s%s\n", which,
              c.ok ? "PASS" : "FAIL", elapsed, c.label.c_str(),
              c.detail.empty() ? "" : " | ", c.detail.c_str());
  return c.ok ? 0 : 1;
}
