#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftlab/drift.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/experiments.hpp"

namespace driftlab {

using ordered_json = nlohmann::ordered_json;

namespace detail {

/// Round-trip float formatting shared by every CSV writer, so identical
/// inputs produce identical bytes.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Stable-key-order JSON body: verdict, checks, metrics, notes, and the
/// fully resolved configuration the run used. No timestamps; identical
/// configs give identical bytes.
inline ordered_json report_json(const ExperimentReport& rep,
                                const ordered_json& resolved_config) {
  ordered_json j;
  j["experiment"] = rep.name;
  j["verdict"] = to_string(rep.verdict);
  ordered_json checks = ordered_json::array();
  for (const auto& c : rep.checks) {
    ordered_json e;
    e["name"] = c.name;
    e["relation"] = c.relation;
    e["measured"] = c.measured;
    e["bound"] = c.bound;
    e["pass"] = c.pass;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  ordered_json metrics;
  for (const auto& [k, v] : rep.metrics) metrics[k] = v;
  j["metrics"] = std::move(metrics);
  j["notes"] = rep.notes;
  ordered_json tables = ordered_json::array();
  for (const auto& t : rep.tables) tables.push_back(t.name);
  j["tables"] = std::move(tables);
  j["config"] = resolved_config;
  return j;
}

inline std::string table_csv(const Table& t) {
  std::ostringstream out;
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    out << (c ? "," : "") << t.columns[c];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << detail::g17(row[c]);
    out << "\n";
  }
  return out.str();
}

inline std::string ledger_line(const ExperimentReport& rep) {
  int failed = 0;
  for (const auto& c : rep.checks) failed += c.pass ? 0 : 1;
  std::ostringstream out;
  out << rep.name << "," << to_string(rep.verdict) << "," << rep.checks.size()
      << "," << failed << "\n";
  return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << body;
  if (!out) throw IoError("write failed for " + path.string());
}

inline void append_text(const std::filesystem::path& path, const std::string& body,
                        const std::string& header) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open " + path.string() + " for appending");
  if (fresh) out << header;
  out << body;
  if (!out) throw IoError("append failed for " + path.string());
}

/// Write the full artifact set for one run: report.json, series.csv (the
/// norm history, when the experiment produced one), one CSV per additional
/// table, and an appended ledger row.
inline void write_report(const std::filesystem::path& dir,
                         const ExperimentReport& rep,
                         const ordered_json& resolved_config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  write_text(dir / "report.json", report_json(rep, resolved_config).dump(2) + "\n");
  for (const auto& t : rep.tables) {
    const std::string file = t.name == "norms" ? "series.csv" : t.name + ".csv";
    write_text(dir / file, table_csv(t));
  }
  append_text(dir / "ledger.csv", ledger_line(rep),
              "experiment,verdict,checks,failed\n");
}

/// Sampled-drift exchange format: time index, node index, one column per
/// component.
inline std::string sampled_drift_csv(const SampledDrift& d) {
  std::ostringstream out;
  out << "time_index,node_index";
  for (int c = 0; c < d.components; ++c) out << ",c" << c;
  out << "\n";
  const std::size_t nodes = d.grid->size();
  for (std::size_t k = 0; k < d.values.size(); ++k)
    for (std::size_t j = 0; j < nodes; ++j) {
      out << k << "," << j;
      for (int c = 0; c < d.components; ++c)
        out << "," << detail::g17(d.values[k][static_cast<std::size_t>(c) * nodes + j]);
      out << "\n";
    }
  return out.str();
}

inline SampledDrift read_sampled_drift_csv(std::istream& in, GridPtr grid,
                                           const TimeGrid& time) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("sampled drift CSV is empty");
  int components = 0;
  {
    std::stringstream header(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(header, col, ',')) cols.push_back(col);
    if (cols.size() < 3 || cols[0] != "time_index" || cols[1] != "node_index")
      throw ConfigError("sampled drift CSV must start with time_index,node_index");
    components = static_cast<int>(cols.size()) - 2;
  }
  SampledDrift d;
  d.grid = std::move(grid);
  d.time = time;
  d.components = components;
  const std::size_t nodes = d.grid->size();
  d.values.assign(time.nodes(),
                  std::vector<double>(static_cast<std::size_t>(components) * nodes, 0.0));
  std::vector<bool> seen(static_cast<std::size_t>(time.nodes()) * nodes, false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != static_cast<std::size_t>(components) + 2)
      throw ConfigError("sampled drift CSV row has wrong column count: " + line);
    const std::size_t k = std::stoul(cells[0]);
    const std::size_t j = std::stoul(cells[1]);
    if (k >= d.values.size() || j >= nodes)
      throw ConfigError("sampled drift CSV index out of range: " + line);
    for (int c = 0; c < components; ++c)
      d.values[k][static_cast<std::size_t>(c) * nodes + j] = std::stod(cells[2 + c]);
    seen[k * nodes + j] = true;
  }
  for (bool s : seen)
    if (!s) throw ConfigError("sampled drift CSV is missing node/time entries");
  return d;
}

}  // namespace driftlab
