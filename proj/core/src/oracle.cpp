#include "cdplan/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cdplan/errors.hpp"

namespace cdplan {

namespace {

// A candidate placement in loop form so the lattice walk avoids re-validating polygons.
struct Candidate {
  std::vector<Point2> loop;  // empty for a circle
  Circle circle{{0.0, 0.0}, 1.0};
  Circle bound{{0.0, 0.0}, 1.0};
};

bool disjoint(const Candidate& c, const Shape& w, const Circle& wb) {
  if (norm(c.bound.center() - wb.center()) > c.bound.radius() + wb.radius()) return true;
  if (c.loop.empty()) {
    if (const auto* wc = std::get_if<Circle>(&w)) {
      return norm(c.circle.center() - wc->center()) > c.circle.radius() + wc->radius();
    }
    return signed_distance_to_convex(c.circle.center(), std::get<ConvexPolygon>(w).vertices()) >
           c.circle.radius();
  }
  if (const auto* wc = std::get_if<Circle>(&w)) {
    return signed_distance_to_convex(wc->center(), c.loop) > wc->radius();
  }
  return signed_separation(c.loop, std::get<ConvexPolygon>(w).vertices()) > 0.0;
}

}  // namespace

GridDisplacement oracle_grid_displacement(const Shape& obstacle, std::span<const Shape> witnesses,
                                          const GridSearchOptions& options) {
  if (!(options.resolution > 0.0) || !(options.rotation_resolution > 0.0)) {
    throw std::invalid_argument("oracle: resolutions must be positive");
  }
  const bool circle = std::holds_alternative<Circle>(obstacle);
  const Circle bound = bounding_circle(obstacle);
  const double window = options.window.value_or(3.0 * 2.0 * bound.radius());
  const long reach = static_cast<long>(std::floor(window / options.resolution + 1e-9));
  const bool rotate = !circle && options.restriction != MotionRestriction::TranslateOnly;
  const bool translate = options.restriction != MotionRestriction::RotateOnly;

  std::vector<Circle> witness_bounds;
  for (const Shape& w : witnesses) witness_bounds.push_back(bounding_circle(w));

  const Point2 mean = reference_point(obstacle);
  std::vector<Point2> offsets;  // vertices relative to the mean
  double spread = 0.0;
  if (!circle) {
    for (Point2 v : std::get<ConvexPolygon>(obstacle).vertices()) {
      offsets.push_back(v - mean);
      spread += squared_norm(v - mean);
    }
  }
  const double n = circle ? 1.0 : static_cast<double>(offsets.size());
  const double bound_offset = norm(bound.center() - mean);

  std::vector<long> angle_steps{0};
  if (rotate) {
    const long max_step = static_cast<long>(std::floor(std::numbers::pi / options.rotation_resolution + 1e-9));
    for (long j = 1; j <= max_step; ++j) {
      angle_steps.push_back(j);
      if (j * options.rotation_resolution < std::numbers::pi - 1e-12) angle_steps.push_back(-j);
    }
  }

  bool found = false;
  GridDisplacement best;
  best.objective = std::numeric_limits<double>::infinity();
  Candidate cand;
  std::vector<Point2> rotated(offsets.size());

  for (long js : angle_steps) {
    const double theta = static_cast<double>(js) * options.rotation_resolution;
    const double rot_cost = 2.0 * (1.0 - std::cos(theta)) * spread;
    if (rot_cost >= best.objective) break;  // rotation cost grows with |theta|
    const double c = std::cos(theta), s = std::sin(theta);
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      rotated[i] = {c * offsets[i].x - s * offsets[i].y, s * offsets[i].x + c * offsets[i].y};
    }
    const long rings = translate ? reach : 0;
    for (long k = 0; k <= rings; ++k) {
      const double ring_min = static_cast<double>(k) * options.resolution;
      if (n * ring_min * ring_min + rot_cost >= best.objective) break;
      // Chebyshev ring |i| = k or |j| = k, walked in a fixed order.
      for (long i = -k; i <= k; ++i) {
        const long step = (i == -k || i == k) ? 1 : 2 * k;
        for (long j = -k; j <= k; j += std::max<long>(step, 1)) {
          const Point2 t{static_cast<double>(i) * options.resolution,
                         static_cast<double>(j) * options.resolution};
          const double obj = n * squared_norm(t) + rot_cost;
          if (obj >= best.objective) continue;
          const Point2 center = mean + t;
          if (circle) {
            cand.circle = Circle(center, bound.radius());
            cand.bound = cand.circle;
          } else {
            cand.loop.resize(rotated.size());
            for (std::size_t v = 0; v < rotated.size(); ++v) cand.loop[v] = center + rotated[v];
            cand.bound = Circle(center, bound.radius() + bound_offset);
          }
          bool ok = true;
          for (std::size_t w = 0; w < witnesses.size() && ok; ++w) {
            ok = disjoint(cand, witnesses[w], witness_bounds[w]);
          }
          if (!ok) continue;
          found = true;
          best = {t.x, t.y, theta, norm(t), obj};
        }
      }
    }
  }
  if (!found) throw NoFeasibleInWindow("no feasible placement inside the search window");
  return best;
}

}  // namespace cdplan
