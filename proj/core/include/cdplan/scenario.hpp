#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdplan/displacement.hpp"
#include "cdplan/dynamics.hpp"
#include "cdplan/overlap_planner.hpp"
#include "cdplan/scene.hpp"

namespace cdplan {

inline constexpr int kScenarioVersion = 1;

struct RobotSpec {
  ModelKind model = ModelKind::PlanarVelocity;
  double dt = 0.1;
  Control lower{-1.0, -1.0, -1.0};
  Control upper{1.0, 1.0, 1.0};
  RobotBody body;
  RobotState start;
  RobotState goal;
};

struct Scenario {
  std::string name;
  Bounds domain;
  RobotSpec robot;
  std::vector<Obstacle> obstacles;
  PlannerConfig planner;
  ResolveSettings resolve;
};

struct LoadOptions {
  /// Reject clockwise polygons instead of reversing them.
  bool strict = false;
};

/// Parses and validates a scenario. Non-fatal fixes are appended to `warnings`.
Scenario load_scenario(const std::filesystem::path& path, const LoadOptions& options = {},
                       std::vector<std::string>* warnings = nullptr);
Scenario parse_scenario(const std::string& text, const LoadOptions& options = {},
                        std::vector<std::string>* warnings = nullptr);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
std::string scenario_to_string(const Scenario& scenario);

/// Throws ValidationError naming the field (and obstacle id) that is wrong.
void validate(const Scenario& scenario);

PlanningProblem to_planning_problem(const Scenario& scenario);

/// Command-line style overrides of the planner and displacement settings.
struct PlanOverrides {
  std::optional<OverlapCostKind> mode;
  std::optional<int> horizon;
  std::optional<double> overlap_weight;
  std::optional<int> seed_starts;
};

void apply(Scenario& scenario, const PlanOverrides& overrides);

OverlapCostKind parse_mode(const std::string& text);
std::string to_string(OverlapCostKind kind);

}  // namespace cdplan
