#pragma once

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "cdplan/dynamics.hpp"
#include "cdplan/nlp.hpp"
#include "cdplan/scene.hpp"

namespace cdplan {

/// Scalar weights of the quadratic (Mahalanobis) cost terms.
struct Weights {
  double state = 0.0;    // Mx
  double overlap = 0.5;  // Mi base value; each obstacle multiplies it by its difficulty weight
  double control = 0.1;  // Mu
  double goal = 10.0;    // Mg
};

enum class OverlapCostKind { MCD, MCR, Shortest };

struct OverlapCostMode {
  OverlapCostKind kind = OverlapCostKind::MCD;
  double eta0 = 100.0;
  double epsilon = 1e-3;

  /// h(L): identity for MCD, eta*L/(L+epsilon) for MCR.
  double h(double overlap, double eta) const;
  double dh(double overlap, double eta) const;
};

/// Reference the state term is measured from.
enum class StateReference { Zero, Goal };

struct PlannerConfig {
  int horizon = 21;
  int max_steps = 400;
  double goal_tolerance = 0.1;
  Weights weights;
  OverlapCostMode mode;
  StateReference state_reference = StateReference::Zero;
  /// Overlap weight for non-movable obstacles, independent of mode.
  double immovable_weight = 1e4;
  /// Clearance kept from the part of a rotate-only obstacle that no rotation can move.
  double core_margin = 0.05;
  /// Quadratic penalty on robot cover circles leaving the domain.
  double wall_weight = 1e4;
  /// Resolution of the exact overlap sweep that fills OverlapReport::overlapped_ids.
  double report_step_fraction = 0.01;
  nlp::NlpSettings solver = default_solver();

  static nlp::NlpSettings default_solver();
};

/// Obstacle as seen by the cost: its cover and effective overlap weight.
struct OverlapObstacle {
  int id = 0;
  CircleCover cover;
  double weight = 0.0;
  bool movable = true;
  // Region no admissible displacement can vacate, penalized like an immovable obstacle.
  std::optional<Circle> core;
  double core_weight = 0.0;
};

struct PlanningProblem {
  DynamicsModel model;
  RobotBody robot;
  RobotState start;
  RobotState goal;
  std::vector<Obstacle> obstacles;
  std::optional<Bounds> domain;
};

/// Stage, terminal and horizon costs for one planning problem.
class CostModel {
 public:
  CostModel(const PlanningProblem& problem, const PlannerConfig& config);

  std::span<const OverlapObstacle> obstacles() const { return obstacles_; }
  /// Initial per-obstacle eta (eta0 everywhere; used by MCR only).
  std::vector<double> initial_eta() const;

  /// Overlap L of every obstacle at state x, in obstacle order.
  std::vector<double> overlaps(const RobotState& x) const;

  double stage_cost(const RobotState& x, const Control& u, std::span<const double> eta) const;
  double terminal_cost(const RobotState& x) const;

  /// Total cost of applying `controls` (3L values) from x0, optionally
  /// with the gradient with respect to the controls.
  double horizon_cost(const RobotState& x0, std::span<const double> controls,
                      std::span<const double> eta, std::span<double> grad = {}) const;

 private:
  double stage_state_terms(const RobotState& x, std::span<const double> eta,
                           std::span<const int> active, double* gx) const;

  DynamicsModel model_;
  CircleCover robot_cover_;
  std::optional<Bounds> domain_;
  RobotState goal_;
  RobotState reference_;
  PlannerConfig config_;
  std::vector<OverlapObstacle> obstacles_;
  std::vector<Circle> obstacle_bounds_;
  double robot_reach_ = 0.0;  // body-frame cover extent
  double step_reach_ = 0.0;   // max translation per step
};

/// Mx*|x-ref|^2 + sum_i Mi_i*h(L_i)^2 + Mu*|u|^2 with L_i from the cover overlap.
double stage_cost(const RobotState& x, const Control& u, const CircleCover& robot_cover,
                  std::span<const OverlapObstacle> obstacles, const Weights& w,
                  const OverlapCostMode& mode, std::span<const double> eta,
                  const RobotState& reference = {});

/// Mg*|x-goal|^2 with the heading difference wrapped.
double terminal_cost(const RobotState& x, const RobotState& goal, double mg);

struct HorizonPlan {
  std::vector<Control> controls;
  nlp::NlpStatus status = nlp::NlpStatus::IterationLimit;
  double cost = 0.0;
};

/// Single-shooting solve over `config.horizon` controls. A non-converged
/// status is the solver-failure case; the best-effort controls are still returned.
HorizonPlan plan_horizon(const CostModel& cost, const PlanningProblem& problem,
                         const RobotState& x, const PlannerConfig& config,
                         std::span<const double> eta, std::span<const Control> warm_start = {});

struct OverlapReport {
  /// Column ids of `per_step`.
  std::vector<int> obstacle_ids;
  /// Cover overlap L per trajectory state (rows) and obstacle (columns).
  std::vector<std::vector<double>> per_step;
  /// Obstacles whose exact shape meets the swept exact robot footprint.
  std::set<int> overlapped_ids;
  /// Final MCR eta per obstacle column.
  std::vector<double> eta_state;
};

struct PlanResult {
  Trajectory trajectory;
  OverlapReport report;
  bool goal_reached = false;
  int unconverged_horizons = 0;
};

PlanResult plan(const PlanningProblem& problem, const PlannerConfig& config);

/// Ids of obstacles whose exact shape intersects the swept footprint.
std::set<int> exact_overlaps(const RobotBody& robot, const Trajectory& trajectory,
                             std::span<const Obstacle> obstacles, double step_fraction);

}  // namespace cdplan
