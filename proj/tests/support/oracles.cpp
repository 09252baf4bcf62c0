#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cdplan::testing {

namespace {

double orient(Point2 a, Point2 b, Point2 c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

int sign(double v) { return (v > 0) - (v < 0); }

bool on_box(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool inside_or_on(Point2 p, std::span<const Point2> loop) {
  for (std::size_t i = 0; i < loop.size(); ++i) {
    if (orient(loop[i], loop[(i + 1) % loop.size()], p) < 0) return false;
  }
  return true;
}

bool contains_all(const Circle& c, std::span<const Point2> pts) {
  for (Point2 p : pts) {
    if (std::hypot(p.x - c.center().x, p.y - c.center().y) > c.radius() * (1 + 1e-12) + 1e-12) return false;
  }
  return true;
}

}  // namespace

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Circle brute_force_mec(std::span<const Point2> pts) {
  double best_r = std::numeric_limits<double>::infinity();
  Point2 best_c{};
  auto consider = [&](Point2 c, double r) {
    if (r < best_r && r > 0 && contains_all(Circle(c, r), pts)) {
      best_r = r;
      best_c = c;
    }
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Point2 m{(pts[i].x + pts[j].x) / 2, (pts[i].y + pts[j].y) / 2};
      consider(m, std::hypot(pts[i].x - m.x, pts[i].y - m.y));
      for (std::size_t k = j + 1; k < pts.size(); ++k) {
        const Point2 a = pts[i], b = pts[j], c = pts[k];
        const double d = 2 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
        if (std::abs(d) < 1e-14) continue;
        const double a2 = a.x * a.x + a.y * a.y, b2 = b.x * b.x + b.y * b.y, c2 = c.x * c.x + c.y * c.y;
        const Point2 o{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
                       (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
        consider(o, std::hypot(a.x - o.x, a.y - o.y));
      }
    }
  }
  return Circle(best_c, best_r);
}

bool oracle_segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const int o1 = sign(orient(a, b, c)), o2 = sign(orient(a, b, d));
  const int o3 = sign(orient(c, d, a)), o4 = sign(orient(c, d, b));
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_box(a, b, c)) return true;
  if (o2 == 0 && on_box(a, b, d)) return true;
  if (o3 == 0 && on_box(c, d, a)) return true;
  if (o4 == 0 && on_box(c, d, b)) return true;
  return false;
}

bool oracle_polygons_intersect(std::span<const Point2> p, std::span<const Point2> q) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (oracle_segments_intersect(p[i], p[(i + 1) % p.size()], q[j], q[(j + 1) % q.size()])) return true;
    }
  }
  return inside_or_on(p[0], q) || inside_or_on(q[0], p);
}

bool oracle_line_hits_circle(Point2 a, Point2 b, Point2 center, double r, double step) {
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  const Point2 u{(b.x - a.x) / len, (b.y - a.y) / len};
  const double t0 = (center.x - a.x) * u.x + (center.y - a.y) * u.y;
  const int n = static_cast<int>(std::ceil((r + 1.0) / step));
  for (int k = -n; k <= n; ++k) {
    const double t = t0 + k * step;
    const Point2 p{a.x + t * u.x, a.y + t * u.y};
    if (std::hypot(p.x - center.x, p.y - center.y) <= r) return true;
  }
  return false;
}

double oracle_circle_grid(const Circle& obstacle, std::span<const Circle> witnesses, double res,
                          double window) {
  const int n = static_cast<int>(std::floor(window / res));
  double best = std::numeric_limits<double>::infinity();
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      const double dx = i * res, dy = j * res;
      const double mag = std::hypot(dx, dy);
      if (mag >= best) continue;
      bool ok = true;
      for (const Circle& w : witnesses) {
        const double dist = std::hypot(obstacle.center().x + dx - w.center().x,
                                       obstacle.center().y + dy - w.center().y);
        ok = ok && dist > obstacle.radius() + w.radius();
      }
      if (ok) best = mag;
    }
  }
  return best;
}

ConvexPolygon random_convex_polygon(std::mt19937_64& rng, int n, Point2 center, double radius) {
  for (;;) {
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) angles.push_back(uniform(rng, 0.0, 2 * std::numbers::pi));
    std::sort(angles.begin(), angles.end());
    const double sx = uniform(rng, 0.5, 1.0), sy = uniform(rng, 0.5, 1.0);
    const double rot = uniform(rng, 0.0, std::numbers::pi);
    std::vector<Point2> pts;
    for (double a : angles) {
      const double x = sx * radius * std::cos(a), y = sy * radius * std::sin(a);
      pts.push_back({center.x + std::cos(rot) * x - std::sin(rot) * y,
                     center.y + std::sin(rot) * x + std::cos(rot) * y});
    }
    try {
      return ConvexPolygon(pts);
    } catch (const InvalidGeometry&) {
      // nearly collinear triple; draw again
    }
  }
}

Scenario random_scenario(std::mt19937_64& rng, int max_obstacles) {
  Scenario s;
  s.name = "random";
  s.domain = {-8.0, 1.0, -3.0, 3.0};
  s.robot.model = ModelKind::PlanarVelocity;
  s.robot.dt = 0.1;
  s.robot.lower = {-2.0, -2.0, -2.0};
  s.robot.upper = {2.0, 2.0, 2.0};
  if (uniform(rng, 0, 1) < 0.5) {
    s.robot.body.cover.circles.push_back(Circle({0, 0}, uniform(rng, 0.2, 0.4)));
  } else {
    const ConvexPolygon body(std::vector<Point2>{{-0.35, -0.2}, {0.35, -0.2}, {0.35, 0.2}, {-0.35, 0.2}});
    s.robot.body.polygons.push_back(body);
    s.robot.body.cover = k_circle_cover(body, 2);
  }
  s.robot.start = {-7.0, uniform(rng, -1.0, 1.0), 0.0};
  s.robot.goal = {0.0, 0.0, 0.0};
  const int count = std::uniform_int_distribution<int>(1, max_obstacles)(rng);
  for (int i = 0; i < count; ++i) {
    const Point2 c{uniform(rng, -6.0, -1.0), uniform(rng, -1.5, 1.5)};
    const double r = uniform(rng, 0.25, 0.6);
    const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
    Shape shape = kind == 0 ? Shape(Circle(c, r))
                            : Shape(random_convex_polygon(rng, 3 + kind * 2, c, r * 1.3));
    Obstacle o{i + 1, true, shape, {}};
    if (const auto* p = std::get_if<ConvexPolygon>(&o.shape)) {
      o.cover = k_circle_cover(*p, 2);
    } else {
      o.cover.circles.push_back(std::get<Circle>(o.shape));
    }
    const int m = std::uniform_int_distribution<int>(0, 5)(rng);
    o.motion = m == 4 ? MotionRestriction::TranslateOnly
                      : (m == 5 && kind != 0 ? MotionRestriction::RotateOnly : MotionRestriction::Free);
    s.obstacles.push_back(std::move(o));
  }
  s.planner.horizon = 8;
  s.planner.max_steps = 150;
  s.planner.goal_tolerance = 0.25;
  s.planner.weights = {0.5, 0.5, 0.1, 10.0};
  return s;
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    ref += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max(1.0, std::sqrt(ref));
}

}  // namespace cdplan::testing
