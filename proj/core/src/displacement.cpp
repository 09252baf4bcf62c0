#include "cdplan/displacement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cdplan {

namespace {

using nlp::Vector;

Point2 vertex(const Vector& z, int i) { return {z[2 * i], z[2 * i + 1]}; }

std::vector<Point2> loop_of(const Vector& z) {
  std::vector<Point2> out(static_cast<std::size_t>(z.size() / 2));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = vertex(z, static_cast<int>(i));
  return out;
}

void add_point_grad(Vector& g, int i, Point2 d) {
  g[2 * i] += d.x;
  g[2 * i + 1] += d.y;
}

// d/d(p, a, b) of the distance from p to segment ab; t is held at its optimum.
void point_segment_grad(Point2 p, Point2 a, Point2 b, Point2& gp, Point2& ga, Point2& gb) {
  const Point2 ab = b - a;
  const double len2 = squared_norm(ab);
  const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  const Point2 diff = p - (a + t * ab);
  const double d = norm(diff);
  gp = d > 0.0 ? (1.0 / d) * diff : Point2{0.0, 0.0};
  ga = -(1.0 - t) * gp;
  gb = -t * gp;
}

// Gradient of signed_separation(loop, w) with respect to the loop coordinates,
// taken through the active edge / vertex pair.
Vector separation_gradient(std::span<const Point2> loop, const Shape& w) {
  const int n = static_cast<int>(loop.size());
  Vector g = Vector::Zero(2 * n);
  if (const auto* wc = std::get_if<Circle>(&w)) {
    const double sign = signed_distance_to_convex(wc->center(), loop) < 0.0 ? -1.0 : 1.0;
    double best = std::numeric_limits<double>::infinity();
    int bi = 0;
    for (int i = 0; i < n; ++i) {
      const double d = point_segment_distance(wc->center(), loop[i], loop[(i + 1) % n]);
      if (d < best) {
        best = d;
        bi = i;
      }
    }
    Point2 gp, ga, gb;
    point_segment_grad(wc->center(), loop[bi], loop[(bi + 1) % n], gp, ga, gb);
    add_point_grad(g, bi, sign * ga);
    add_point_grad(g, (bi + 1) % n, sign * gb);
    return g;
  }
  const std::span<const Point2> q = std::get<ConvexPolygon>(w).vertices();
  const int m = static_cast<int>(q.size());
  if (signed_separation(loop, q) > 0.0) {
    double best = std::numeric_limits<double>::infinity();
    int kind = 0, ei = 0, vi = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        const double d = point_segment_distance(q[j], loop[i], loop[(i + 1) % n]);
        if (d < best) best = d, kind = 0, ei = i, vi = j;
      }
    }
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < n; ++i) {
        const double d = point_segment_distance(loop[i], q[j], q[(j + 1) % m]);
        if (d < best) best = d, kind = 1, ei = j, vi = i;
      }
    }
    Point2 gp, ga, gb;
    if (kind == 0) {
      point_segment_grad(q[vi], loop[ei], loop[(ei + 1) % n], gp, ga, gb);
      add_point_grad(g, ei, ga);
      add_point_grad(g, (ei + 1) % n, gb);
    } else {
      point_segment_grad(loop[vi], q[ei], q[(ei + 1) % m], gp, ga, gb);
      add_point_grad(g, vi, gp);
    }
    return g;
  }
  // overlapping: largest separating-axis gap over both edge sets
  double best = -std::numeric_limits<double>::infinity();
  int kind = 0, ei = 0, vi = 0;
  for (int i = 0; i < n; ++i) {
    const Point2 e = loop[(i + 1) % n] - loop[i];
    const double len = norm(e);
    if (len == 0.0) continue;
    const Point2 nrm{e.y / len, -e.x / len};
    double gap = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int j = 0; j < m; ++j) {
      const double v = dot(nrm, q[j] - loop[i]);
      if (v < gap) gap = v, arg = j;
    }
    if (gap > best) best = gap, kind = 0, ei = i, vi = arg;
  }
  for (int j = 0; j < m; ++j) {
    const Point2 e = q[(j + 1) % m] - q[j];
    const double len = norm(e);
    if (len == 0.0) continue;
    const Point2 nrm{e.y / len, -e.x / len};
    double gap = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int i = 0; i < n; ++i) {
      const double v = dot(nrm, loop[i] - q[j]);
      if (v < gap) gap = v, arg = i;
    }
    if (gap > best) best = gap, kind = 1, ei = j, vi = arg;
  }
  if (kind == 0) {
    const Point2 e = loop[(ei + 1) % n] - loop[ei];
    const double len = norm(e);
    const Point2 hat = (1.0 / len) * e;
    const Point2 nrm{hat.y, -hat.x};
    const Point2 wv = q[vi] - loop[ei];
    // d(nrm . wv)/de = (R^T wv - hat (nrm . wv)) / len with R e = (e.y, -e.x)
    const Point2 de = (1.0 / len) * (Point2{-wv.y, wv.x} - dot(nrm, wv) * hat);
    add_point_grad(g, ei, -1.0 * nrm - de);
    add_point_grad(g, (ei + 1) % n, de);
  } else {
    const Point2 e = q[(ei + 1) % m] - q[ei];
    const double len = norm(e);
    add_point_grad(g, vi, Point2{e.y / len, -e.x / len});
  }
  return g;
}

// Places the original shape by the best rigid motion (restricted as asked)
// onto the solved decision vector.
struct Placement {
  Shape shape;
  Rigid2 motion;
};

Placement snap(const Shape& original, const Vector& z, MotionRestriction restriction) {
  if (const auto* c = std::get_if<Circle>(&original)) {
    Point2 center{z[0], z[1]};
    if (restriction == MotionRestriction::RotateOnly) center = c->center();
    const Rigid2 tf{0.0, center - c->center()};
    return {Circle(center, c->radius()), tf};
  }
  const auto& poly = std::get<ConvexPolygon>(original);
  const std::vector<Point2> solved = loop_of(z);
  const Point2 mp = poly.vertex_mean();
  Point2 mq{};
  for (const Point2& q : solved) mq = mq + q;
  mq = (1.0 / static_cast<double>(solved.size())) * mq;
  if (restriction == MotionRestriction::RotateOnly) mq = mp;

  double angle = 0.0;
  if (restriction != MotionRestriction::TranslateOnly) {
    double sc = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < solved.size(); ++i) {
      const Point2 p = poly[i] - mp;
      const Point2 q = solved[i] - mq;
      sc += dot(p, q);
      ss += cross(p, q);
    }
    angle = std::atan2(ss, sc);
  }
  const Rigid2 rot{angle, {}};
  const Rigid2 tf{angle, mq - rot.apply(mp)};
  return {poly.transformed(tf), tf};
}

double objective_of(const Shape& original, const Shape& moved, DisplacementObjective kind) {
  if (const auto* c = std::get_if<Circle>(&original)) {
    return squared_norm(std::get<Circle>(moved).center() - c->center());
  }
  const auto& a = std::get<ConvexPolygon>(original);
  const auto& b = std::get<ConvexPolygon>(moved);
  if (kind == DisplacementObjective::CentroidShift) {
    return squared_norm(b.vertex_mean() - a.vertex_mean());
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += squared_norm(b[i] - a[i]);
  return s;
}

DisplacementSolution make_solution(const Shape& original, const Placement& placed,
                                   std::span<const Shape> witnesses,
                                   const DisplacementSettings& settings) {
  DisplacementSolution sol{placed.shape, placed.motion};
  sol.centroid_shift = norm(reference_point(placed.shape) - reference_point(original));
  sol.rotation = std::holds_alternative<Circle>(original) ? 0.0 : wrap_angle(placed.motion.angle);
  sol.objective_value = objective_of(original, placed.shape, settings.objective);
  sol.min_clearance = min_clearance(placed.shape, witnesses);
  sol.feasible = true;
  for (const Shape& w : witnesses) {
    if (shapes_intersect(placed.shape, w)) {
      sol.feasible = false;
      break;
    }
  }
  return sol;
}

nlp::SmoothFunction displacement_objective(const Shape& obstacle, DisplacementObjective kind) {
  const Vector z0 = decision_vector(obstacle);
  const bool mean_only =
      kind == DisplacementObjective::CentroidShift && std::holds_alternative<ConvexPolygon>(obstacle);
  if (!mean_only) {
    return {[z0](const Vector& z) { return (z - z0).squaredNorm(); },
            [z0](const Vector& z) -> Vector { return 2.0 * (z - z0); }};
  }
  const int n = static_cast<int>(z0.size() / 2);
  auto mean_delta = [z0, n](const Vector& z) {
    Point2 d{};
    for (int i = 0; i < n; ++i) d = d + (vertex(z, i) - vertex(z0, i));
    return (1.0 / n) * d;
  };
  return {[mean_delta](const Vector& z) { return squared_norm(mean_delta(z)); },
          [mean_delta, n](const Vector& z) -> Vector {
            const Point2 d = mean_delta(z);
            Vector g(2 * n);
            for (int i = 0; i < n; ++i) {
              g[2 * i] = 2.0 * d.x / n;
              g[2 * i + 1] = 2.0 * d.y / n;
            }
            return g;
          }};
}

// Short budget for the secondary 1/t model.
nlp::NlpSettings line_parametric_budget(nlp::NlpSettings s) {
  s.max_outer_iterations = std::min(s.max_outer_iterations, 20);
  s.max_inner_iterations = std::min(s.max_inner_iterations, 100);
  return s;
}

Shape shifted(const Shape& s, Point2 by) { return transformed(s, Rigid2{0.0, by}); }

bool certified_against(const Shape& s, std::span<const Shape> witnesses) {
  for (const Shape& w : witnesses) {
    if (shapes_intersect(s, w)) return false;
  }
  return true;
}

}  // namespace

nlp::NlpSettings DisplacementSettings::default_solver() {
  nlp::NlpSettings s;
  // clearance rows have kinks; creeping along one is not progress
  s.min_step_ratio = 1e-12;
  return s;
}

Vector decision_vector(const Shape& shape) {
  if (const auto* c = std::get_if<Circle>(&shape)) return Vector{{c->center().x, c->center().y}};
  const auto& p = std::get<ConvexPolygon>(shape);
  Vector z(2 * static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    z[2 * static_cast<Eigen::Index>(i)] = p[i].x;
    z[2 * static_cast<Eigen::Index>(i) + 1] = p[i].y;
  }
  return z;
}

double min_clearance(const Shape& shape, std::span<const Shape> witnesses) {
  double m = std::numeric_limits<double>::infinity();
  for (const Shape& w : witnesses) m = std::min(m, signed_separation(shape, w));
  return m;
}

double witness_diameter(std::span<const Shape> witnesses) {
  double d = 0.0;
  for (const Shape& w : witnesses) d = std::max(d, 2.0 * bounding_circle(w).radius());
  return d;
}

// Constraint builders -----------------------------------------------------

std::vector<nlp::SmoothFunction> build_segment_circle_constraints(int vertex_count,
                                                                  const Circle& witness,
                                                                  double margin) {
  std::vector<nlp::SmoothFunction> out;
  const Point2 c = witness.center();
  const double r2 = witness.radius() * witness.radius();
  for (int i = 0; i < vertex_count; ++i) {
    const int j = (i + 1) % vertex_count;
    out.push_back(
        {[=](const Vector& z) {
           return line_circle_discriminant(vertex(z, i), vertex(z, j), c, witness.radius()) + margin;
         },
         [=](const Vector& z) {
           const Point2 d = vertex(z, i) - vertex(z, j);
           const Point2 e = vertex(z, j) - c;
           const double de = dot(d, e);
           const double k = squared_norm(e) - r2;
           Vector g = Vector::Zero(z.size());
           add_point_grad(g, i, 2.0 * de * e - 2.0 * k * d);
           add_point_grad(g, j, 2.0 * de * (d - e) + 2.0 * k * d - 2.0 * squared_norm(d) * e);
           return g;
         }});
  }
  return out;
}

std::vector<nlp::SmoothFunction> build_segment_segment_constraints(int vertex_count,
                                                                   const Segment& witness_edge,
                                                                   double epsilon) {
  std::vector<nlp::SmoothFunction> out;
  const Point2 p3 = witness_edge.a();
  const Point2 p4 = witness_edge.b();
  const double x34 = p3.x - p4.x;
  const double y34 = p3.y - p4.y;
  for (int i = 0; i < vertex_count; ++i) {
    const int j = (i + 1) % vertex_count;
    // which = 0 -> 1/t, which = 1 -> 1/s
    for (int which = 0; which < 2; ++which) {
      auto value = [=](const Vector& z) {
        const auto terms = segment_param_terms(vertex(z, i), vertex(z, j), p3, p4);
        if (std::abs(terms.denominator) <= kParallelThreshold) return -1.0;
        const double num = (which == 0 ? terms.t_numerator : terms.s_numerator) + epsilon;
        return terms.denominator / num - 1.0;
      };
      auto grad = [=](const Vector& z) {
        Vector g = Vector::Zero(z.size());
        const Point2 p1 = vertex(z, i);
        const Point2 p2 = vertex(z, j);
        const auto terms = segment_param_terms(p1, p2, p3, p4);
        if (std::abs(terms.denominator) <= kParallelThreshold) return g;
        const double x12 = p1.x - p2.x, y12 = p1.y - p2.y;
        const double x42 = p4.x - p2.x, y42 = p4.y - p2.y;
        // d(den) and d(num) w.r.t. (x1, y1, x2, y2)
        const double dden[4] = {-y34, x34, y34, -x34};
        double dnum[4];
        double num;
        if (which == 0) {
          num = terms.t_numerator + epsilon;
          dnum[0] = 0.0;
          dnum[1] = 0.0;
          dnum[2] = y34;
          dnum[3] = -x34;
        } else {
          num = terms.s_numerator + epsilon;
          dnum[0] = y42;
          dnum[1] = -x42;
          dnum[2] = y12 - y42;
          dnum[3] = x42 - x12;
        }
        double d[4];
        for (int k = 0; k < 4; ++k) {
          d[k] = dden[k] / num - terms.denominator * dnum[k] / (num * num);
        }
        add_point_grad(g, i, {d[0], d[1]});
        add_point_grad(g, j, {d[2], d[3]});
        return g;
      };
      out.push_back({value, grad});
    }
  }
  return out;
}

std::vector<nlp::SmoothFunction> build_rigidity_constraints(const ConvexPolygon& shape,
                                                            MotionRestriction restriction) {
  std::vector<nlp::SmoothFunction> out;
  const int n = static_cast<int>(shape.size());
  auto distance_row = [&](int a, int b) {
    const double l2 = squared_norm(shape[static_cast<std::size_t>(a)] - shape[static_cast<std::size_t>(b)]);
    out.push_back({[=](const Vector& z) { return squared_norm(vertex(z, a) - vertex(z, b)) - l2; },
                   [=](const Vector& z) {
                     Vector g = Vector::Zero(z.size());
                     const Point2 d = vertex(z, a) - vertex(z, b);
                     add_point_grad(g, a, 2.0 * d);
                     add_point_grad(g, b, -2.0 * d);
                     return g;
                   }});
  };
  auto linear_row = [&](std::vector<std::pair<int, double>> coeffs, double rhs) {
    out.push_back({[=](const Vector& z) {
                     double v = -rhs;
                     for (const auto& [k, c] : coeffs) v += c * z[k];
                     return v;
                   },
                   [=](const Vector& z) {
                     Vector g = Vector::Zero(z.size());
                     for (const auto& [k, c] : coeffs) g[k] += c;
                     return g;
                   }});
  };

  if (restriction == MotionRestriction::TranslateOnly) {
    for (int i = 0; i + 1 < n; ++i) {
      const Point2 d = shape[static_cast<std::size_t>(i + 1)] - shape[static_cast<std::size_t>(i)];
      linear_row({{2 * (i + 1), 1.0}, {2 * i, -1.0}}, d.x);
      linear_row({{2 * (i + 1) + 1, 1.0}, {2 * i + 1, -1.0}}, d.y);
    }
    return out;
  }
  for (int i = 0; i < n; ++i) distance_row(i, (i + 1) % n);
  for (int j = 2; j + 1 < n; ++j) distance_row(0, j);
  // fan triangle orientation; lengths alone admit mirror images and folds
  for (int j = 1; j + 1 < n; ++j) {
    const double c0 = cross(shape[static_cast<std::size_t>(j)] - shape[0],
                            shape[static_cast<std::size_t>(j + 1)] - shape[0]);
    out.push_back({[=](const Vector& z) {
                     return cross(vertex(z, j) - vertex(z, 0), vertex(z, j + 1) - vertex(z, 0)) - c0;
                   },
                   [=](const Vector& z) {
                     Vector g = Vector::Zero(z.size());
                     const Point2 b = vertex(z, j) - vertex(z, 0);
                     const Point2 c = vertex(z, j + 1) - vertex(z, 0);
                     const Point2 gb{c.y, -c.x};
                     const Point2 gc{-b.y, b.x};
                     add_point_grad(g, j, gb);
                     add_point_grad(g, j + 1, gc);
                     add_point_grad(g, 0, -1.0 * (gb + gc));
                     return g;
                   }});
  }
  if (restriction == MotionRestriction::RotateOnly) {
    const Point2 m = shape.vertex_mean();
    std::vector<std::pair<int, double>> cx, cy;
    for (int i = 0; i < n; ++i) {
      cx.emplace_back(2 * i, 1.0 / n);
      cy.emplace_back(2 * i + 1, 1.0 / n);
    }
    linear_row(cx, m.x);
    linear_row(cy, m.y);
  }
  return out;
}

std::vector<nlp::SmoothFunction> build_clearance_constraints(const Shape& obstacle,
                                                             std::span<const Shape> witnesses,
                                                             double margin) {
  std::vector<nlp::SmoothFunction> out;
  const bool circle = std::holds_alternative<Circle>(obstacle);
  const double radius = circle ? std::get<Circle>(obstacle).radius() : 0.0;
  for (const Shape& w : witnesses) {
    if (circle) {
      out.push_back({[w, radius, margin](const Vector& z) {
                       const Point2 c{z[0], z[1]};
                       if (const auto* wc = std::get_if<Circle>(&w)) {
                         return margin - (norm(c - wc->center()) - radius - wc->radius());
                       }
                       return margin -
                              (signed_distance_to_convex(c, std::get<ConvexPolygon>(w).vertices()) - radius);
                     },
                     [w](const Vector& z) {
                       const Point2 c{z[0], z[1]};
                       Point2 d{0.0, 0.0};
                       if (const auto* wc = std::get_if<Circle>(&w)) {
                         const Point2 diff = c - wc->center();
                         const double len = norm(diff);
                         if (len > 0.0) d = (1.0 / len) * diff;
                       } else {
                         const std::span<const Point2> q = std::get<ConvexPolygon>(w).vertices();
                         const int m = static_cast<int>(q.size());
                         const double sign = signed_distance_to_convex(c, q) < 0.0 ? -1.0 : 1.0;
                         double best = std::numeric_limits<double>::infinity();
                         for (int j = 0; j < m; ++j) {
                           const double dist = point_segment_distance(c, q[j], q[(j + 1) % m]);
                           if (dist < best) {
                             best = dist;
                             Point2 ga, gb;
                             point_segment_grad(c, q[j], q[(j + 1) % m], d, ga, gb);
                             d = sign * d;
                           }
                         }
                       }
                       Vector g(z.size());
                       g.setZero();
                       g[0] = -d.x;
                       g[1] = -d.y;
                       return g;
                     }});
    } else {
      out.push_back({[w, margin](const Vector& z) {
                       const std::vector<Point2> loop = loop_of(z);
                       if (const auto* wc = std::get_if<Circle>(&w)) {
                         return margin - (signed_distance_to_convex(wc->center(), loop) - wc->radius());
                       }
                       return margin - signed_separation(loop, std::get<ConvexPolygon>(w).vertices());
                     },
                     [w](const Vector& z) {
                       return Vector(-separation_gradient(loop_of(z), w));
                     }});
    }
  }
  return out;
}

std::vector<Vector> initial_points(const Shape& obstacle, std::span<const Shape> witnesses,
                                   MotionRestriction restriction, double delta_step, double slack) {
  (void)slack;
  std::vector<Shape> candidates;
  if (restriction == MotionRestriction::RotateOnly && std::holds_alternative<ConvexPolygon>(obstacle)) {
    const Point2 m = std::get<ConvexPolygon>(obstacle).vertex_mean();
    constexpr double pi = std::numbers::pi;
    for (double a : {pi / 12, pi / 6, pi / 4, pi / 3, pi / 2, 3 * pi / 4}) {
      for (double sgn : {1.0, -1.0}) {
        const Rigid2 rot{sgn * a, {}};
        candidates.push_back(transformed(obstacle, Rigid2{sgn * a, m - rot.apply(m)}));
      }
    }
  } else {
    const double big = witness_diameter(witnesses);
    const double small = delta_step * big;
    for (double mag : {big, big + small, big - small}) {
      for (Point2 dir : {Point2{1, 0}, Point2{-1, 0}, Point2{0, 1}, Point2{0, -1}}) {
        candidates.push_back(shifted(obstacle, mag * dir));
      }
    }
  }
  std::vector<Vector> feasible, rest;
  for (const Shape& c : candidates) {
    (certified_against(c, witnesses) ? feasible : rest).push_back(decision_vector(c));
  }
  feasible.insert(feasible.end(), rest.begin(), rest.end());
  return feasible;
}

// Solvers -----------------------------------------------------------------

DisplacementSolution displace_circle_circle(const Circle& obstacle, std::span<const Circle> witnesses,
                                            const DisplacementSettings& settings) {
  std::vector<Shape> shapes(witnesses.begin(), witnesses.end());
  bool any = false;
  for (const Circle& w : witnesses) any = any || shapes_intersect(obstacle, w);
  if (!any) throw NoOverlap("circle obstacle does not overlap any witness");

  if (witnesses.size() == 1) {
    const Circle& w = witnesses.front();
    Point2 dir = obstacle.center() - w.center();
    const double len = norm(dir);
    dir = len > 0.0 ? (1.0 / len) * dir : Point2{1.0, 0.0};
    // Closed form: along the center line by L, plus half the slack so contact is cleared.
    const double shift = overlap_measure(w, obstacle) + 0.5 * settings.clearance_slack;
    const Circle moved(obstacle.center() + shift * dir, obstacle.radius());
    const Placement placed{moved, Rigid2{0.0, moved.center() - obstacle.center()}};
    return make_solution(obstacle, placed, shapes, settings);
  }

  DisplacementProblem problem{obstacle, shapes, MotionRestriction::Free,
                              initial_points(obstacle, shapes, MotionRestriction::Free)};
  DisplacementSettings s = settings;
  s.constraints = ConstraintModel::Clearance;
  return displace(problem, s);
}

DisplacementSolution displace(const DisplacementProblem& problem, const DisplacementSettings& settings) {
  if (problem.witnesses.empty()) throw std::invalid_argument("displace: no witnesses");
  const Shape& obstacle = problem.obstacle;
  const std::span<const Shape> witnesses = problem.witnesses;

  const Placement identity{obstacle, Rigid2{}};
  if (certified_against(obstacle, witnesses)) {
    return make_solution(obstacle, identity, witnesses, settings);
  }

  const bool circle = std::holds_alternative<Circle>(obstacle);
  const bool all_circles = std::all_of(witnesses.begin(), witnesses.end(),
                                       [](const Shape& w) { return std::holds_alternative<Circle>(w); });
  if (circle && all_circles && witnesses.size() == 1 &&
      problem.restriction != MotionRestriction::RotateOnly) {
    const Circle w = std::get<Circle>(witnesses.front());
    return displace_circle_circle(std::get<Circle>(obstacle), std::span<const Circle>(&w, 1), settings);
  }

  std::vector<ConstraintModel> models;
  if (circle || settings.constraints == ConstraintModel::Clearance ||
      (settings.constraints == ConstraintModel::Both && !all_circles)) {
    models = {ConstraintModel::Clearance};
  } else if (settings.constraints == ConstraintModel::LineParametric) {
    models = {ConstraintModel::LineParametric};
  } else {
    models = {ConstraintModel::LineParametric, ConstraintModel::Clearance};
  }

  std::vector<nlp::SmoothFunction> equalities;
  if (!circle) {
    equalities = build_rigidity_constraints(std::get<ConvexPolygon>(obstacle), problem.restriction);
  }
  const int n = circle ? 1 : static_cast<int>(std::get<ConvexPolygon>(obstacle).size());

  std::vector<Vector> starts = problem.initial_points;
  if (starts.empty()) starts = initial_points(obstacle, witnesses, problem.restriction);
  if (static_cast<int>(starts.size()) > settings.max_starts) {
    starts.resize(static_cast<std::size_t>(std::max(1, settings.max_starts)));
  }

  std::optional<DisplacementSolution> best;
  std::optional<DisplacementSolution> best_attempt;
  for (const Vector& start : starts) {
    const Placement placed = snap(obstacle, start, problem.restriction);
    DisplacementSolution sol = make_solution(obstacle, placed, witnesses, settings);
    if (sol.feasible && (!best || sol.objective_value < best->objective_value)) best = sol;
  }
  for (ConstraintModel model : models) {
    nlp::NlpProblem nlp_problem;
    nlp_problem.dimension = static_cast<int>(decision_vector(obstacle).size());
    nlp_problem.objective = displacement_objective(obstacle, settings.objective);
    nlp_problem.equalities = equalities;
    if (model == ConstraintModel::Clearance) {
      nlp_problem.inequalities = build_clearance_constraints(obstacle, witnesses, settings.margin);
    } else {
      for (const Shape& w : witnesses) {
        std::vector<nlp::SmoothFunction> rows;
        if (const auto* wc = std::get_if<Circle>(&w)) {
          rows = build_segment_circle_constraints(n, *wc, settings.margin);
        } else {
          const auto& wp = std::get<ConvexPolygon>(w);
          for (std::size_t e = 0; e < wp.size(); ++e) {
            auto edge_rows = build_segment_segment_constraints(n, wp.edge(e), settings.epsilon);
            rows.insert(rows.end(), edge_rows.begin(), edge_rows.end());
          }
        }
        nlp_problem.inequalities.insert(nlp_problem.inequalities.end(), rows.begin(), rows.end());
      }
    }
    const std::size_t budget = settings.constraints == ConstraintModel::Both &&
                                       model == ConstraintModel::LineParametric
                                   ? std::min<std::size_t>(starts.size(), kLineParametricStarts)
                                   : starts.size();
    for (std::size_t k = 0; k < budget; ++k) {
      const Vector& start = starts[k];
      nlp_problem.initial_point = start;
      nlp::NlpResult res;
      try {
        res = nlp::solve(nlp_problem, model == ConstraintModel::LineParametric && budget < starts.size()
                                          ? line_parametric_budget(settings.solver)
                                          : settings.solver);
      } catch (const NonFiniteEvaluation&) {
        continue;
      }
      const Placement placed = snap(obstacle, res.point, problem.restriction);
      DisplacementSolution sol = make_solution(obstacle, placed, witnesses, settings);
      if (sol.feasible) {
        if (!best || sol.objective_value < best->objective_value) best = sol;
      } else if (!best_attempt || sol.min_clearance > best_attempt->min_clearance) {
        best_attempt = sol;
      }
    }
  }
  if (best) return *best;
  DisplacementSolution fallback =
      best_attempt ? *best_attempt : make_solution(obstacle, identity, witnesses, settings);
  fallback.feasible = false;
  throw DisplacementFailure("no start produced a certified placement", fallback);
}

// Whole trajectory --------------------------------------------------------

namespace {

struct PartRef {
  std::size_t sample;
  std::size_t part;
};

// Keeps the ends of every run of consecutive samples plus every stride-th one.
std::vector<PartRef> thin(const std::vector<PartRef>& refs, int stride) {
  std::vector<PartRef> out;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    const bool run_start = k == 0 || refs[k].sample > refs[k - 1].sample + 1;
    const bool run_end = k + 1 == refs.size() || refs[k + 1].sample > refs[k].sample + 1;
    if (run_start || run_end || k % static_cast<std::size_t>(std::max(1, stride)) == 0) {
      out.push_back(refs[k]);
    }
  }
  return out;
}

double part_motion(const Shape& a, const Shape& b) {
  if (const auto* ca = std::get_if<Circle>(&a)) {
    const Circle& cb = std::get<Circle>(b);
    return norm(ca->center() - cb.center()) + std::abs(ca->radius() - cb.radius());
  }
  const auto& pa = std::get<ConvexPolygon>(a);
  const auto& pb = std::get<ConvexPolygon>(b);
  double d = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) d = std::max(d, norm(pa[i] - pb[i]));
  return d;
}

// Drops parts that moved less than tol since the last kept copy of the same part.
std::vector<PartRef> distinct(const std::vector<PartRef>& refs, const SweptFootprint& swept, double tol) {
  std::vector<PartRef> out;
  std::vector<const Shape*> last;
  for (const PartRef& r : refs) {
    if (r.part >= last.size()) last.resize(r.part + 1, nullptr);
    const Shape& shape = swept.parts[r.sample][r.part];
    if (last[r.part] != nullptr && part_motion(*last[r.part], shape) < tol) continue;
    last[r.part] = &shape;
    out.push_back(r);
  }
  return out;
}

std::vector<PartRef> intersecting_parts(const Shape& shape, const SweptFootprint& swept) {
  const Circle sb = bounding_circle(shape);
  std::vector<PartRef> out;
  for (std::size_t k = 0; k < swept.parts.size(); ++k) {
    const Circle& b = swept.bounds[k];
    if (norm(b.center() - sb.center()) > b.radius() + sb.radius()) continue;
    for (std::size_t p = 0; p < swept.parts[k].size(); ++p) {
      if (shapes_intersect(swept.parts[k][p], shape)) out.push_back({k, p});
    }
  }
  return out;
}

}  // namespace

ResolveResult resolve_all(const Trajectory& trajectory, const RobotBody& robot,
                          std::span<const Obstacle> obstacles, const ResolveSettings& settings) {
  ResolveResult result;
  if (trajectory.states.empty()) return result;
  const SweptFootprint swept = sweep(robot, trajectory, settings.step_fraction);
  double sample_spacing = 0.0;
  for (std::size_t k = 1; k < swept.bounds.size(); ++k) {
    sample_spacing =
        std::max(sample_spacing, norm(swept.bounds[k].center() - swept.bounds[k - 1].center()));
  }

  for (const Obstacle& obstacle : obstacles) {
    const std::vector<PartRef> hits = intersecting_parts(obstacle.shape, swept);
    if (hits.empty()) continue;

    ObstacleResolution res{obstacle.id, obstacle.shape,
                           DisplacementSolution{obstacle.shape, Rigid2{}}, {}};
    if (!obstacle.movable) {
      res.error = "obstacle is not movable but overlaps the trajectory";
      result.all_feasible = false;
      result.resolutions.push_back(std::move(res));
      continue;
    }

    const double tol = 0.5 * settings.displacement.margin;
    std::vector<PartRef> chosen = thin(distinct(hits, swept, tol), settings.witness_stride);
    DisplacementSettings round_settings = settings.displacement;
    bool done = false;
    for (int round = 0; round <= settings.refinement_rounds && !done; ++round) {
      std::vector<Shape> witnesses;
      witnesses.reserve(chosen.size());
      for (const PartRef& r : chosen) witnesses.push_back(swept.parts[r.sample][r.part]);
      DisplacementProblem problem{obstacle.shape, witnesses, obstacle.motion, {}};
      problem.initial_points = initial_points(obstacle.shape, witnesses, obstacle.motion);
      if (round > 0) {
        // contact with chosen samples leaves unchosen neighbours overlapping; widen the gap
        round_settings.margin = std::max(2.0 * round_settings.margin, sample_spacing);
      }
      try {
        res.solution = displace(problem, round_settings);
        res.error.clear();
      } catch (const DisplacementFailure& e) {
        res.solution = e.best();
        res.error = e.what();
        break;
      }
      const std::vector<PartRef> violations = intersecting_parts(res.solution.new_shape, swept);
      if (violations.empty()) {
        done = true;
        break;
      }
      const std::vector<PartRef> fresh = thin(distinct(violations, swept, tol), settings.witness_stride);
      chosen.insert(chosen.end(), fresh.begin(), fresh.end());
      res.solution.feasible = false;
      res.error = "placement intersects the swept footprint";
    }
    if (!done) {
      res.solution.feasible = false;
      result.all_feasible = false;
    }
    result.resolutions.push_back(std::move(res));
  }

  for (const ObstacleResolution& r : result.resolutions) {
    result.total_displacement += r.solution.centroid_shift;
  }
  result.displaced_count = static_cast<int>(result.resolutions.size());
  return result;
}

}  // namespace cdplan
