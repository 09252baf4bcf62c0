#pragma once

#include <array>
#include <span>
#include <vector>

#include "cdplan/geometry.hpp"

namespace cdplan {

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Point2 position() const { return {x, y}; }
  Rigid2 pose() const { return {theta, {x, y}}; }
  friend bool operator==(const RobotState&, const RobotState&) = default;
};

/// (u, v, omega) for the planar-velocity model, (down, cross, turn) for down-cross-turn.
using Control = std::array<double, 3>;

enum class ModelKind { PlanarVelocity, DownCrossTurn };

/// d(next)/d(state) and d(next)/d(control), row-major 3x3.
struct StepJacobians {
  std::array<double, 9> state{};
  std::array<double, 9> control{};
};

class DynamicsModel {
 public:
  DynamicsModel(ModelKind kind, double dt, Control lower, Control upper);

  ModelKind kind() const { return kind_; }
  /// Integration step for the planar-velocity model. Down-cross-turn is a
  /// discrete map and reports 1.0 here so trajectory timestamps are step indices.
  double dt() const { return kind_ == ModelKind::PlanarVelocity ? dt_ : 1.0; }
  const Control& lower() const { return lower_; }
  const Control& upper() const { return upper_; }

  bool within_bounds(const Control& u) const;
  Control clamp(const Control& u) const;

  /// Transition without the bounds check; used inside optimizers where
  /// iterates may sit slightly outside the box.
  RobotState propagate(const RobotState& x, const Control& u) const;
  StepJacobians jacobians(const RobotState& x, const Control& u) const;

 private:
  ModelKind kind_;
  double dt_;
  Control lower_;
  Control upper_;
};

/// One transition; throws ControlOutOfBounds when `u` leaves the box.
RobotState step(const DynamicsModel& model, const RobotState& x, const Control& u);

std::vector<RobotState> rollout(const DynamicsModel& model, const RobotState& x0,
                                std::span<const Control> controls);

/// Robot geometry in its body frame.
struct RobotBody {
  std::vector<ConvexPolygon> polygons;
  CircleCover cover;

  /// Exact footprint parts: the polygons, or the cover circles for a round robot.
  std::vector<Shape> parts() const;
};

struct Footprint {
  std::vector<ConvexPolygon> polygons;
  CircleCover cover;
};

Footprint footprint_at(const RobotState& x, std::span<const ConvexPolygon> base_polygons,
                       const CircleCover& base_cover);

/// World-frame exact footprint parts at `x`.
std::vector<Shape> footprint_parts(const RobotBody& body, const RobotState& x);

/// Interpolates position linearly and heading along the shorter arc.
RobotState interpolate(const RobotState& a, const RobotState& b, double f);

}  // namespace cdplan
