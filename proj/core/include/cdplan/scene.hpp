#pragma once

#include <vector>

#include "cdplan/dynamics.hpp"
#include "cdplan/geometry.hpp"

namespace cdplan {

enum class MotionRestriction { Free, TranslateOnly, RotateOnly };

struct Bounds {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;

  bool contains(Point2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
};

struct Obstacle {
  int id = 0;
  bool movable = true;
  Shape shape;
  /// Used by the overlap stage; the exact shape is used everywhere else.
  CircleCover cover;
  MotionRestriction motion = MotionRestriction::Free;
  /// Difficulty multiplier applied to the overlap weight.
  double weight = 1.0;
};

struct Trajectory {
  std::vector<RobotState> states;
  std::vector<Control> controls;
  double dt = 0.1;

  double timestamp(std::size_t k) const { return static_cast<double>(k) * dt; }
};

/// Footprint samples along a trajectory at `step_fraction` of a timestep.
/// Sample i sits at time index `index[i]` (fractional).
struct SweptFootprint {
  std::vector<double> index;
  std::vector<std::vector<Shape>> parts;
  std::vector<Circle> bounds;  // per-sample bounding circle of all parts
};

SweptFootprint sweep(const RobotBody& body, const Trajectory& trajectory, double step_fraction);

}  // namespace cdplan
