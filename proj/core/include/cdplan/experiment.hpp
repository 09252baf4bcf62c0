#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cdplan/pipeline.hpp"
#include "cdplan/scenario.hpp"

namespace cdplan {

struct SuiteCell {
  std::string name;
  std::filesystem::path scenario;
  PlanOverrides overrides;
};

struct SuiteConfig {
  std::string name;
  std::vector<SuiteCell> cells;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;
};

/// Scenario paths in the file are resolved relative to the file itself.
SuiteConfig load_suite(const std::filesystem::path& path);

struct SuiteRow {
  std::string cell;
  std::string scenario;
  std::string mode;
  int horizon = 0;
  double overlap_weight = 0.0;
  double total_displacement = 0.0;
  int displaced_count = 0;
  bool goal_reached = false;
  bool all_feasible = false;
  bool certificate_passed = false;
  std::string error;
  StageTimings timings;
};

/// Runs every cell (concurrently), writing each cell's report under
/// out_dir/<cell>/ when out_dir is non-empty. Failures are recorded per row.
std::vector<SuiteRow> run_experiment_suite(const SuiteConfig& config,
                                           const std::filesystem::path& out_dir = {});

/// Result tables without timings; reruns produce identical bytes.
std::string results_csv(const std::vector<SuiteRow>& rows);
std::string results_json(const std::vector<SuiteRow>& rows);
std::string timings_csv(const std::vector<SuiteRow>& rows);

}  // namespace cdplan
