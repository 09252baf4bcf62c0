#include "cdplan/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "json_io.hpp"

namespace cdplan {

namespace {

using io::json;

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

SuiteRow run_cell(const SuiteCell& cell, const std::filesystem::path& out_dir) {
  SuiteRow row;
  row.cell = cell.name;
  row.scenario = cell.scenario.filename().string();
  try {
    Scenario sc = load_scenario(cell.scenario);
    apply(sc, cell.overrides);
    row.mode = to_string(sc.planner.mode.kind);
    row.horizon = sc.planner.horizon;
    row.overlap_weight = sc.planner.weights.overlap;
    const RunReport report = run_pipeline(sc);
    row.total_displacement = report.metrics.total_displacement_magnitude;
    row.displaced_count = report.metrics.displaced_count;
    row.goal_reached = report.goal_reached;
    row.all_feasible = report.all_displacements_feasible();
    row.certificate_passed = report.certificate.passed();
    row.timings = report.timings;
    if (!out_dir.empty()) {
      const std::filesystem::path dir = out_dir / cell.name;
      std::filesystem::create_directories(dir);
      save_report(report, dir / "report.json");
      write_file(dir / "timings.json", timings_to_string(report.timings));
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

SuiteConfig load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const json j = io::parse(buf.str(), path.string());
  SuiteConfig cfg;
  cfg.name = io::string_or(j, "name", path.stem().string(), "suite");
  if (j.contains("threads")) cfg.threads = io::integer_at(j, "threads", "suite");
  const json& cells = io::field(j, "cells", "suite");
  if (!cells.is_array()) throw ValidationError("suite.cells: expected a list");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const json& c = cells[i];
    const std::string where = "suite.cells[" + std::to_string(i) + "]";
    SuiteCell cell;
    cell.name = io::string_or(c, "name", "cell" + std::to_string(i), where);
    const std::string sc = io::string_or(c, "scenario", "", where);
    if (sc.empty()) throw ValidationError(where + ".scenario: missing");
    cell.scenario = path.parent_path() / sc;
    if (c.contains("mode")) cell.overrides.mode = parse_mode(io::string_or(c, "mode", "", where));
    if (c.contains("horizon")) cell.overrides.horizon = io::integer_at(c, "horizon", where);
    if (c.contains("mi")) cell.overrides.overlap_weight = io::number_at(c, "mi", where);
    if (c.contains("seed_starts")) cell.overrides.seed_starts = io::integer_at(c, "seed_starts", where);
    cfg.cells.push_back(std::move(cell));
  }
  return cfg;
}

std::vector<SuiteRow> run_experiment_suite(const SuiteConfig& config,
                                           const std::filesystem::path& out_dir) {
  std::vector<SuiteRow> rows(config.cells.size());
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, rows.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) rows[i] = run_cell(config.cells[i], out_dir);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return rows;
}

std::string results_csv(const std::vector<SuiteRow>& rows) {
  std::string out =
      "cell,scenario,mode,horizon,mi,total_displacement,displaced_count,goal_reached,all_feasible,"
      "certificate_passed,error\n";
  for (const SuiteRow& r : rows) {
    out += csv_field(r.cell) + "," + csv_field(r.scenario) + "," + r.mode + "," +
           std::to_string(r.horizon) + "," + num(r.overlap_weight) + "," + num(r.total_displacement) +
           "," + std::to_string(r.displaced_count) + "," + (r.goal_reached ? "true" : "false") + "," +
           (r.all_feasible ? "true" : "false") + "," + (r.certificate_passed ? "true" : "false") + "," +
           csv_field(r.error) + "\n";
  }
  return out;
}

std::string results_json(const std::vector<SuiteRow>& rows) {
  json a = json::array();
  for (const SuiteRow& r : rows) {
    json e = {{"cell", r.cell},
              {"scenario", r.scenario},
              {"mode", r.mode},
              {"horizon", r.horizon},
              {"mi", r.overlap_weight},
              {"total_displacement", r.total_displacement},
              {"displaced_count", r.displaced_count},
              {"goal_reached", r.goal_reached},
              {"all_feasible", r.all_feasible},
              {"certificate_passed", r.certificate_passed}};
    if (!r.error.empty()) e["error"] = r.error;
    a.push_back(std::move(e));
  }
  return json{{"rows", a}}.dump(2) + "\n";
}

std::string timings_csv(const std::vector<SuiteRow>& rows) {
  std::string out = "cell,overlap_stage_seconds,displacement_stage_seconds\n";
  for (const SuiteRow& r : rows) {
    out += csv_field(r.cell) + "," + num(r.timings.overlap_stage_seconds) + "," +
           num(r.timings.displacement_stage_seconds) + "\n";
  }
  return out;
}

}  // namespace cdplan
