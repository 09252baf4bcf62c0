#pragma once

#include <random>
#include <span>
#include <vector>

#include "cdplan/geometry.hpp"
#include "cdplan/scenario.hpp"

namespace cdplan::testing {

// Independent reference implementations. None of these call into the
// predicates they are used to check.

/// Smallest circle over all pair-diameter and triple-circumcircle candidates.
Circle brute_force_mec(std::span<const Point2> points);

/// Orientation-sign segment test with collinear overlap handling.
bool oracle_segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d);

/// Any edge crossing, or any vertex of one polygon inside (or on) the other.
bool oracle_polygons_intersect(std::span<const Point2> p, std::span<const Point2> q);

/// Samples the infinite line through a-b at `step` spacing around the circle.
bool oracle_line_hits_circle(Point2 a, Point2 b, Point2 center, double r, double step = 1e-3);

/// Exhaustive (dx, dy) lattice search for a circle obstacle that must clear
/// every witness circle; returns the smallest shift magnitude.
double oracle_circle_grid(const Circle& obstacle, std::span<const Circle> witnesses, double res,
                          double window);

/// Strictly convex CCW polygon: sorted random angles on a random ellipse.
ConvexPolygon random_convex_polygon(std::mt19937_64& rng, int n, Point2 center, double radius);

/// Small randomized pipeline scenario with at most `max_obstacles` obstacles.
Scenario random_scenario(std::mt19937_64& rng, int max_obstacles);

double uniform(std::mt19937_64& rng, double lo, double hi);

/// Relative distance between two gradients: |a - b| / max(1, |b|).
double relative_error(std::span<const double> a, std::span<const double> b);

}  // namespace cdplan::testing
