// driftlab: run verification experiments for a drift-diffusion solver and
// write machine-readable reports.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 a hypothesis needed
// by the estimate does not hold, 3 bad configuration, 4 I/O or internal
// error.

#include <algorithm>
#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "driftlab/config.hpp"
#include "driftlab/report.hpp"

namespace {

namespace fs = std::filesystem;
using namespace driftlab;

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::pass: return 0;
    case Verdict::fail: return 1;
    case Verdict::hypothesis_violated: return 2;
  }
  return 4;
}

struct JobOutcome {
  std::string label;
  std::string line;
  int code = 4;
};

JobOutcome run_one(const std::string& config_path, const std::string& out_dir) {
  JobOutcome out;
  out.label = fs::path(config_path).stem().string();
  try {
    const RunConfig cfg = parse_config(config_path);
    ExperimentReport rep = run_config(cfg);
    write_report(out_dir, rep, cfg.resolved);
    int failed = 0;
    for (const auto& c : rep.checks) failed += c.pass ? 0 : 1;
    out.line = rep.name + ": " + to_string(rep.verdict) + " (" +
               std::to_string(rep.checks.size()) + " checks, " +
               std::to_string(failed) + " failed) -> " + out_dir;
    for (const auto& note : rep.notes) out.line += "\n  note: " + note;
    out.code = verdict_code(rep.verdict);
  } catch (const ConfigError& e) {
    out.line = std::string("config error: ") + e.what();
    out.code = 3;
  } catch (const IoError& e) {
    out.line = std::string("io error: ") + e.what();
    out.code = 4;
  } catch (const std::exception& e) {
    out.line = std::string("internal error: ") + e.what();
    out.code = 4;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for drift-diffusion estimates"};
  app.set_version_flag("--version", "driftlab 1.0.0");

  std::string config_path;
  std::string out_dir = "out";
  bool suite = false;
  bool list = false;
  bool quiet = false;
  app.add_option("-c,--config", config_path,
                 "config file (or directory with --suite)");
  app.add_option("-o,--out", out_dir, "output directory (default: out)");
  app.add_flag("--suite", suite, "run every *.json config in a directory");
  app.add_flag("--list", list, "list available experiments and exit");
  app.add_flag("-q,--quiet", quiet, "suppress per-run summary lines");

  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& [name, desc] : experiment_catalog())
      std::cout << name << "  " << desc << "\n";
    return 0;
  }
  if (config_path.empty()) {
    std::cerr << "config error: no --config given (try --list)\n";
    return 3;
  }

  if (!suite) {
    const JobOutcome out = run_one(config_path, out_dir);
    if (out.code == 3 || out.code == 4)
      std::cerr << out.line << "\n";
    else if (!quiet)
      std::cout << out.line << "\n";
    return out.code;
  }

  // Suite mode: every *.json under the directory, concurrently, each into
  // its own subdirectory of out_dir.
  std::error_code ec;
  if (!fs::is_directory(config_path, ec)) {
    std::cerr << "config error: --suite needs a directory, got " << config_path
              << "\n";
    return 3;
  }
  std::vector<std::string> configs;
  for (const auto& entry : fs::directory_iterator(config_path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      configs.push_back(entry.path().string());
  }
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) {
    std::cerr << "config error: no *.json configs in " << config_path << "\n";
    return 3;
  }

  std::vector<std::future<JobOutcome>> jobs;
  jobs.reserve(configs.size());
  for (const auto& c : configs) {
    const std::string sub =
        (fs::path(out_dir) / fs::path(c).stem()).string();
    jobs.push_back(std::async(std::launch::async, run_one, c, sub));
  }
  int worst = 0;
  for (auto& j : jobs) {
    const JobOutcome out = j.get();
    worst = std::max(worst, out.code);
    if (out.code == 3 || out.code == 4)
      std::cerr << out.label << " " << out.line << "\n";
    else if (!quiet)
      std::cout << out.label << " " << out.line << "\n";
  }
  return worst;
}
