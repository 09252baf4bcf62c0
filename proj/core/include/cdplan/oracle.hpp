#pragma once

#include <optional>
#include <span>

#include "cdplan/geometry.hpp"
#include "cdplan/scene.hpp"

namespace cdplan {

struct GridDisplacement {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;  // about the vertex mean
  /// Shift of the reference point (circle center or vertex mean).
  double magnitude = 0.0;
  /// Sum of squared vertex shifts (squared center shift for circles).
  double objective = 0.0;
};

struct GridSearchOptions {
  double resolution = 0.02;
  double rotation_resolution = 0.02;
  MotionRestriction restriction = MotionRestriction::Free;
  /// Half-width of the translation window; defaults to 3x the obstacle circumdiameter.
  std::optional<double> window;
};

/// Exhaustive search over rotations k*rotation_resolution and translations on
/// the resolution lattice, returning the cheapest placement disjoint from
/// every witness. Throws NoFeasibleInWindow when nothing in the window works.
GridDisplacement oracle_grid_displacement(const Shape& obstacle, std::span<const Shape> witnesses,
                                          const GridSearchOptions& options = {});

}  // namespace cdplan
