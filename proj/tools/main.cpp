#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cdplan/experiment.hpp"
#include "cdplan/pipeline.hpp"
#include "cdplan/render.hpp"
#include "cdplan/scenario.hpp"

namespace fs = std::filesystem;
using namespace cdplan;

namespace {

enum Exit : int { kOk = 0, kValidation = 2, kSolver = 3, kCertificate = 4 };

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

Scenario read_scenario(const std::string& path, bool strict) {
  std::vector<std::string> warnings;
  Scenario sc = load_scenario(path, LoadOptions{strict}, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  return sc;
}

int outcome(const RunReport& report) {
  std::cout << "goal reached: " << (report.goal_reached ? "yes" : "no") << "\n"
            << "displaced obstacles: " << report.metrics.displaced_count << "\n"
            << "total displacement: " << report.metrics.total_displacement_magnitude << " m\n"
            << "certificate: " << (report.certificate.passed() ? "pass" : "FAIL") << " ("
            << report.certificate.violations << " violations)\n";
  for (const ObstacleResolution& r : report.obstacles) {
    if (!r.error.empty()) std::cerr << "obstacle " << r.obstacle_id << ": " << r.error << "\n";
  }
  if (!report.certificate.passed()) return kCertificate;
  if (!report.goal_reached || !report.all_displacements_feasible()) return kSolver;
  return kOk;
}

int save_run(const RunReport& report, const fs::path& out) {
  fs::create_directories(out);
  save_report(report, out / "report.json");
  write_file(out / "trajectory.json", trajectory_to_string(report.trajectory));
  write_file(out / "timings.json", timings_to_string(report.timings));
  return outcome(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constraint displacement motion planning"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, mode, trajectory_path, report_path, svg_path, suite_path;
  std::optional<int> horizon, seed_starts;
  std::optional<double> mi;
  bool strict = false;

  auto* plan_cmd = app.add_subcommand("plan", "Run the overlap and displacement stages");
  plan_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  plan_cmd->add_option("--out", out_dir, "Output directory")->required();
  plan_cmd->add_option("--mode", mode, "mcd, mcr or shortest")
      ->check(CLI::IsMember({"mcd", "mcr", "shortest"}));
  plan_cmd->add_option("--horizon", horizon, "Receding horizon length")->check(CLI::PositiveNumber);
  plan_cmd->add_option("--mi", mi, "Base overlap weight")->check(CLI::NonNegativeNumber);
  plan_cmd->add_option("--seed-starts", seed_starts, "Displacement starts per obstacle")
      ->check(CLI::Range(1, 12));
  plan_cmd->add_flag("--strict", strict, "Reject clockwise polygons");

  auto* resolve_cmd = app.add_subcommand("resolve", "Displace obstacles along a given trajectory");
  resolve_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  resolve_cmd->add_option("--trajectory", trajectory_path, "Trajectory or report JSON")->required();
  resolve_cmd->add_option("--out", out_dir, "Output directory")->required();
  resolve_cmd->add_flag("--strict", strict, "Reject clockwise polygons");

  auto* check_cmd = app.add_subcommand("check", "Re-certify a report");
  check_cmd->add_option("--report", report_path, "Report JSON")->required();

  auto* render_cmd = app.add_subcommand("render", "Draw a report as SVG");
  render_cmd->add_option("--report", report_path, "Report JSON")->required();
  render_cmd->add_option("--svg", svg_path, "Output SVG")->required();

  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment suite");
  bench_cmd->add_option("--suite", suite_path, "Suite JSON")->required();
  bench_cmd->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*plan_cmd) {
      Scenario sc = read_scenario(scenario_path, strict);
      PlanOverrides o;
      if (!mode.empty()) o.mode = parse_mode(mode);
      o.horizon = horizon;
      o.overlap_weight = mi;
      o.seed_starts = seed_starts;
      apply(sc, o);
      validate(sc);
      return save_run(run_pipeline(sc), out_dir);
    }
    if (*resolve_cmd) {
      const Scenario sc = read_scenario(scenario_path, strict);
      return save_run(resolve_trajectory(sc, load_trajectory(trajectory_path)), out_dir);
    }
    if (*check_cmd) {
      const RunReport report = load_report(report_path);
      const CheckResult r = check_report(report);
      std::cout << "samples: " << r.certificate.samples << "\n"
                << "pairs checked: " << r.certificate.pairs_checked << "\n"
                << "violations: " << r.certificate.violations << "\n"
                << "metrics consistent: " << (r.metrics_consistent ? "yes" : "no") << "\n";
      if (!r.certificate.passed()) return kCertificate;
      return r.metrics_consistent ? kOk : kValidation;
    }
    if (*render_cmd) {
      render_svg(load_report(report_path), svg_path);
      return kOk;
    }
    if (*bench_cmd) {
      const SuiteConfig suite = load_suite(suite_path);
      const auto rows = run_experiment_suite(suite, out_dir);
      write_file(fs::path(out_dir) / "results.csv", results_csv(rows));
      write_file(fs::path(out_dir) / "results.json", results_json(rows));
      write_file(fs::path(out_dir) / "timings.csv", timings_csv(rows));
      std::cout << results_csv(rows);
      bool failed = false;
      for (const SuiteRow& r : rows) failed = failed || !r.error.empty();
      return failed ? kSolver : kOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolver;
  }
  return kOk;
}
