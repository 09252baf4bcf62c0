#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdplan/displacement.hpp"
#include "cdplan/overlap_planner.hpp"
#include "cdplan/scenario.hpp"

namespace cdplan {

inline constexpr int kReportVersion = 1;

struct CertificateSummary {
  double step_fraction = 0.01;
  std::size_t samples = 0;
  std::size_t pairs_checked = 0;
  std::size_t violations = 0;
  /// Smallest separation over pairs whose bounding circles meet; empty if none do.
  std::optional<double> min_clearance;
  std::vector<int> violating_ids;

  bool passed() const { return violations == 0; }
};

struct Metrics {
  double total_displacement_magnitude = 0.0;
  int displaced_count = 0;
};

/// Wall-clock stage times. Kept out of the report file so reports stay reproducible.
struct StageTimings {
  double overlap_stage_seconds = 0.0;
  double displacement_stage_seconds = 0.0;
};

struct RunReport {
  Scenario scenario;
  Trajectory trajectory;
  OverlapReport overlap;
  bool goal_reached = false;
  int unconverged_horizons = 0;
  std::vector<ObstacleResolution> obstacles;
  Metrics metrics;
  CertificateSummary certificate;
  StageTimings timings;

  bool all_displacements_feasible() const;
};

/// Stage 1 then stage 2, followed by the exact certificate sweep.
RunReport run_pipeline(const Scenario& scenario);

/// Stage 2 and the certificate sweep for a given trajectory.
RunReport resolve_trajectory(const Scenario& scenario, const Trajectory& trajectory);

double metric_total_displacement(std::span<const DisplacementSolution> solutions);
double metric_total_displacement(std::span<const ObstacleResolution> resolutions);
Metrics compute_metrics(std::span<const ObstacleResolution> resolutions);

/// Obstacles in their final placement (displaced ones replaced).
std::vector<Obstacle> final_obstacles(const Scenario& scenario,
                                      std::span<const ObstacleResolution> resolutions);

/// Exact footprint-vs-obstacle sweep; touching counts as a violation.
CertificateSummary certify(const RobotBody& robot, const Trajectory& trajectory,
                           std::span<const Obstacle> obstacles, double step_fraction);

struct CheckResult {
  CertificateSummary certificate;
  bool metrics_consistent = true;
  bool ok() const { return certificate.passed() && metrics_consistent; }
};

/// Re-certifies a report from its own contents.
CheckResult check_report(const RunReport& report);

std::string report_to_string(const RunReport& report);
RunReport parse_report(const std::string& text, const std::string& source = "report");
RunReport load_report(const std::filesystem::path& path);
void save_report(const RunReport& report, const std::filesystem::path& path);

std::string trajectory_to_string(const Trajectory& trajectory);
/// Reads a trajectory file or the trajectory block of a report.
Trajectory load_trajectory(const std::filesystem::path& path);

std::string timings_to_string(const StageTimings& timings);

}  // namespace cdplan
