#include "cdplan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdplan {

namespace {

// Body-frame circle enclosing every exact part.
Circle body_bound(const RobotBody& body) {
  std::vector<Point2> pts;
  for (const auto& p : body.polygons) pts.insert(pts.end(), p.vertices().begin(), p.vertices().end());
  if (pts.empty()) {
    for (const auto& c : body.cover.circles) pts.push_back(c.center());
  }
  if (pts.empty()) throw std::invalid_argument("robot body has no geometry");
  Point2 center = pts.front();
  if (pts.size() > 1) {
    bool distinct = false;
    for (const auto& p : pts) distinct = distinct || !(p == pts.front());
    if (distinct) center = min_enclosing_circle(pts).center();
  }
  double r = 0.0;
  for (const auto& p : body.polygons) {
    for (const auto& v : p.vertices()) r = std::max(r, norm(v - center));
  }
  if (body.polygons.empty()) {
    for (const auto& c : body.cover.circles) r = std::max(r, norm(c.center() - center) + c.radius());
  }
  return {center, r};
}

}  // namespace

SweptFootprint sweep(const RobotBody& body, const Trajectory& trajectory, double step_fraction) {
  if (!(step_fraction > 0.0 && step_fraction <= 1.0)) {
    throw std::invalid_argument("sweep: step fraction must be in (0, 1]");
  }
  SweptFootprint out;
  if (trajectory.states.empty()) return out;
  const Circle bound = body_bound(body);
  const int per_step = std::max(1, static_cast<int>(std::lround(1.0 / step_fraction)));
  auto push = [&](const RobotState& x, double index) {
    out.index.push_back(index);
    out.parts.push_back(footprint_parts(body, x));
    out.bounds.push_back(bound.transformed(x.pose()));
  };
  const std::size_t n = trajectory.states.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (int j = 0; j < per_step; ++j) {
      const double f = static_cast<double>(j) / per_step;
      push(interpolate(trajectory.states[k], trajectory.states[k + 1], f),
           static_cast<double>(k) + f);
    }
  }
  push(trajectory.states.back(), static_cast<double>(n - 1));
  return out;
}

}  // namespace cdplan
