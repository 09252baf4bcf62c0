#include "cdplan/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace cdplan {

namespace {

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double signed_area(std::span<const Point2> v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    a += cross(v[i], v[(i + 1) % v.size()]);
  }
  return 0.5 * a;
}

void validate_convex_ccw(std::span<const Point2> v) {
  if (v.size() < 3) {
    throw InvalidGeometry("polygon needs at least 3 vertices");
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!finite(v[i])) {
      throw InvalidGeometry("polygon vertex " + std::to_string(i) + " is not finite");
    }
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i] == v[j]) {
        throw InvalidGeometry("polygon has repeated vertex " + std::to_string(j));
      }
    }
  }
  double turning = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e0 = v[(i + 1) % n] - v[i];
    const Point2 e1 = v[(i + 2) % n] - v[(i + 1) % n];
    const double c = cross(e0, e1);
    if (!(c > 0.0)) {
      throw InvalidGeometry("polygon is not strictly convex and counter-clockwise at vertex " +
                            std::to_string((i + 1) % n));
    }
    turning += std::atan2(c, dot(e0, e1));
  }
  // A star polygon turns left everywhere but winds more than once.
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
    throw InvalidGeometry("polygon boundary self-intersects");
  }
}

// Working circle for the incremental enclosing-circle construction; may have zero radius.
struct Disk {
  Point2 c;
  double r;
};

bool contains(const Disk& d, Point2 p) {
  return norm(p - d.c) <= d.r * (1.0 + 1e-12) + 1e-12;
}

Disk disk_from(Point2 a, Point2 b) {
  const Point2 c = 0.5 * (a + b);
  return {c, 0.5 * norm(a - b)};
}

Disk disk_from(Point2 a, Point2 b, Point2 c) {
  const Point2 ab = b - a;
  const Point2 ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  if (std::abs(d) <= 1e-14 * (squared_norm(ab) + squared_norm(ac))) {
    // Collinear: the farthest pair spans the others.
    Disk best = disk_from(a, b);
    for (const Disk& cand : {disk_from(a, c), disk_from(b, c)}) {
      if (cand.r > best.r) best = cand;
    }
    return best;
  }
  const double ab2 = squared_norm(ab);
  const double ac2 = squared_norm(ac);
  const Point2 off{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
  return {a + off, norm(off)};
}

}  // namespace

// Types -------------------------------------------------------------------

Circle::Circle(Point2 center, double radius) : center_(center), radius_(radius) {
  if (!finite(center) || !std::isfinite(radius)) {
    throw InvalidGeometry("circle has non-finite center or radius");
  }
  if (!(radius > 0.0)) {
    throw InvalidGeometry("circle radius must be positive");
  }
}

double Circle::area() const { return std::numbers::pi * radius_ * radius_; }

Segment::Segment(Point2 a, Point2 b) : a_(a), b_(b) {
  if (!finite(a) || !finite(b)) {
    throw InvalidGeometry("segment endpoint is not finite");
  }
  if (a == b) {
    throw InvalidGeometry("segment endpoints coincide");
  }
}

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  validate_convex_ccw(vertices_);
}

ConvexPolygon ConvexPolygon::normalized(std::vector<Point2> vertices, bool* reversed) {
  const bool cw = vertices.size() >= 3 && signed_area(vertices) < 0.0;
  if (cw) {
    std::reverse(vertices.begin(), vertices.end());
  }
  if (reversed != nullptr) {
    *reversed = cw;
  }
  return ConvexPolygon(std::move(vertices));
}

double ConvexPolygon::area() const { return signed_area(vertices_); }

Point2 ConvexPolygon::vertex_mean() const {
  Point2 m{};
  for (const Point2& p : vertices_) m = m + p;
  return (1.0 / static_cast<double>(vertices_.size())) * m;
}

ConvexPolygon ConvexPolygon::transformed(const Rigid2& tf) const {
  ConvexPolygon out = *this;
  for (Point2& p : out.vertices_) p = tf.apply(p);
  return out;
}

CircleCover CircleCover::transformed(const Rigid2& tf) const {
  CircleCover out;
  out.circles.reserve(circles.size());
  for (const Circle& c : circles) out.circles.push_back(c.transformed(tf));
  return out;
}

Shape transformed(const Shape& shape, const Rigid2& tf) {
  return std::visit([&](const auto& s) -> Shape { return s.transformed(tf); }, shape);
}

Point2 reference_point(const Shape& shape) {
  if (const auto* c = std::get_if<Circle>(&shape)) return c->center();
  return std::get<ConvexPolygon>(shape).vertex_mean();
}

Circle bounding_circle(const Shape& shape) {
  if (const auto* c = std::get_if<Circle>(&shape)) return *c;
  return min_enclosing_circle(std::get<ConvexPolygon>(shape));
}

// Overlap metric ----------------------------------------------------------

double overlap_measure(const Circle& robot, const Circle& obstacle) {
  const double d = norm(robot.center() - obstacle.center());
  return std::max(0.0, robot.radius() + obstacle.radius() - d);
}

double overlap_measure_cover(const CircleCover& robot, const CircleCover& obstacle) {
  double total = 0.0;
  for (const Circle& r : robot.circles) {
    for (const Circle& o : obstacle.circles) total += overlap_measure(r, o);
  }
  return total;
}

// Bounding circles --------------------------------------------------------

Circle min_enclosing_circle(std::span<const Point2> points) {
  if (points.empty()) {
    throw InvalidGeometry("enclosing circle of an empty point set");
  }
  Disk d{points[0], 0.0};
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (contains(d, points[i])) continue;
    d = {points[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (contains(d, points[j])) continue;
      d = disk_from(points[i], points[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (!contains(d, points[k])) d = disk_from(points[i], points[j], points[k]);
      }
    }
  }
  if (!(d.r > 0.0)) {
    throw InvalidGeometry("enclosing circle of a single point");
  }
  return {d.c, d.r};
}

Circle min_enclosing_circle(const ConvexPolygon& polygon) {
  return min_enclosing_circle(polygon.vertices());
}

std::vector<Point2> clip_half_plane(std::span<const Point2> loop, Point2 n, double offset) {
  std::vector<Point2> out;
  const std::size_t m = loop.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Point2 cur = loop[i];
    const Point2 nxt = loop[(i + 1) % m];
    const double dc = dot(n, cur) - offset;
    const double dn = dot(n, nxt) - offset;
    if (dc <= 0.0) out.push_back(cur);
    if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
      out.push_back(cur + (dc / (dc - dn)) * (nxt - cur));
    }
  }
  return out;
}

CircleCover k_circle_cover(const ConvexPolygon& polygon, int k) {
  if (k < 1) {
    throw std::invalid_argument("k_circle_cover: k must be >= 1");
  }
  CircleCover cover;
  if (k == 1) {
    cover.circles.push_back(min_enclosing_circle(polygon));
    return cover;
  }
  const Point2 m = polygon.vertex_mean();
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const Point2& p : polygon.vertices()) {
    const Point2 d = p - m;
    sxx += d.x * d.x;
    syy += d.y * d.y;
    sxy += d.x * d.y;
  }
  const double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  const Point2 axis{std::cos(angle), std::sin(angle)};

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Point2& p : polygon.vertices()) {
    lo = std::min(lo, dot(axis, p));
    hi = std::max(hi, dot(axis, p));
  }
  const double width = (hi - lo) / k;
  std::vector<Point2> loop(polygon.vertices().begin(), polygon.vertices().end());
  for (int j = 0; j < k; ++j) {
    const double a = lo + j * width;
    const double b = (j + 1 == k) ? hi : lo + (j + 1) * width;
    auto slab = clip_half_plane(loop, axis, b);
    slab = clip_half_plane(slab, -1.0 * axis, -a);
    cover.circles.push_back(min_enclosing_circle(slab));
  }
  return cover;
}

// Predicates --------------------------------------------------------------

double line_circle_discriminant(Point2 a, Point2 b, Point2 center, double radius) {
  const Point2 d = a - b;
  const Point2 e = b - center;
  const double de = dot(d, e);
  return de * de - squared_norm(d) * (squared_norm(e) - radius * radius);
}

bool line_circle_no_intersection(const Segment& s, const Circle& c) {
  return line_circle_discriminant(s.a(), s.b(), c.center(), c.radius()) < 0.0;
}

SegmentParamTerms segment_param_terms(Point2 p1, Point2 p2, Point2 p3, Point2 p4) {
  const double x12 = p1.x - p2.x, y12 = p1.y - p2.y;
  const double x34 = p3.x - p4.x, y34 = p3.y - p4.y;
  const double x42 = p4.x - p2.x, y42 = p4.y - p2.y;
  return {-y34 * x42 + x34 * y42, -y12 * x42 + x12 * y42, -x12 * y34 + y12 * x34};
}

SegmentParams segment_params(const Segment& s1, const Segment& s2, double epsilon) {
  const auto terms = segment_param_terms(s1.a(), s1.b(), s2.a(), s2.b());
  if (std::abs(terms.denominator) <= kParallelThreshold) {
    throw ParallelSegments();
  }
  return {(terms.t_numerator + epsilon) / terms.denominator,
          (terms.s_numerator + epsilon) / terms.denominator};
}

namespace {

int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Max over this loop's edge normals of the normalized gap to `other`.
double max_axis_gap(std::span<const Point2> loop, std::span<const Point2> other) {
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e = loop[(i + 1) % n] - loop[i];
    const double len = norm(e);
    if (len == 0.0) continue;
    const Point2 nrm{e.y / len, -e.x / len};
    double gap = std::numeric_limits<double>::infinity();
    for (const Point2& q : other) gap = std::min(gap, dot(nrm, q - loop[i]));
    best = std::max(best, gap);
  }
  return best;
}

bool separated_along_edges(std::span<const Point2> loop, std::span<const Point2> other) {
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e = loop[(i + 1) % n] - loop[i];
    const Point2 nrm{e.y, -e.x};
    bool all_out = true;
    for (const Point2& q : other) {
      if (!(dot(nrm, q - loop[i]) > 0.0)) {
        all_out = false;
        break;
      }
    }
    if (all_out) return true;
  }
  return false;
}

bool loops_intersect(std::span<const Point2> p, std::span<const Point2> q) {
  return !separated_along_edges(p, q) && !separated_along_edges(q, p);
}

}  // namespace

bool segments_intersect(const Segment& s1, const Segment& s2) {
  const Point2 a = s1.a(), b = s1.b(), c = s2.a(), d = s2.b();
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool polygons_intersect(const ConvexPolygon& p, const ConvexPolygon& q) {
  return loops_intersect(p.vertices(), q.vertices());
}

bool polygon_circle_intersect(const ConvexPolygon& p, const Circle& c) {
  return signed_distance_to_convex(c.center(), p.vertices()) <= c.radius();
}

bool shapes_intersect(const Shape& a, const Shape& b) {
  const auto* ca = std::get_if<Circle>(&a);
  const auto* cb = std::get_if<Circle>(&b);
  if (ca && cb) {
    return norm(ca->center() - cb->center()) <= ca->radius() + cb->radius();
  }
  if (ca) return polygon_circle_intersect(std::get<ConvexPolygon>(b), *ca);
  if (cb) return polygon_circle_intersect(std::get<ConvexPolygon>(a), *cb);
  return polygons_intersect(std::get<ConvexPolygon>(a), std::get<ConvexPolygon>(b));
}

// Distances ---------------------------------------------------------------

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = squared_norm(ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double signed_distance_to_convex(Point2 p, std::span<const Point2> loop) {
  const std::size_t n = loop.size();
  bool inside = true;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = loop[i];
    const Point2 b = loop[(i + 1) % n];
    if (cross(b - a, p - a) < 0.0) inside = false;
    d = std::min(d, point_segment_distance(p, a, b));
  }
  return inside ? -d : d;
}

double signed_separation(std::span<const Point2> p, std::span<const Point2> q) {
  if (loops_intersect(p, q)) {
    return std::max(max_axis_gap(p, q), max_axis_gap(q, p));
  }
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point2 a = p[i], b = p[(i + 1) % p.size()];
    for (const Point2& v : q) d = std::min(d, point_segment_distance(v, a, b));
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Point2 a = q[i], b = q[(i + 1) % q.size()];
    for (const Point2& v : p) d = std::min(d, point_segment_distance(v, a, b));
  }
  return d;
}

double signed_separation(const Shape& a, const Shape& b) {
  const auto* ca = std::get_if<Circle>(&a);
  const auto* cb = std::get_if<Circle>(&b);
  if (ca && cb) {
    return norm(ca->center() - cb->center()) - ca->radius() - cb->radius();
  }
  if (ca) {
    return signed_distance_to_convex(ca->center(), std::get<ConvexPolygon>(b).vertices()) -
           ca->radius();
  }
  if (cb) {
    return signed_distance_to_convex(cb->center(), std::get<ConvexPolygon>(a).vertices()) -
           cb->radius();
  }
  return signed_separation(std::get<ConvexPolygon>(a).vertices(),
                           std::get<ConvexPolygon>(b).vertices());
}

bool certified_disjoint(const Shape& a, const Shape& b, double slack) {
  return !shapes_intersect(a, b) && signed_separation(a, b) >= slack;
}

}  // namespace cdplan
