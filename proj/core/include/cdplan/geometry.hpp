#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cdplan/errors.hpp"

namespace cdplan {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double squared_norm(Point2 a) { return dot(a, a); }

/// Rotation by `angle` followed by translation.
struct Rigid2 {
  double angle = 0.0;
  Point2 translation{};

  Point2 apply(Point2 p) const {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * p.x - s * p.y + translation.x, s * p.x + c * p.y + translation.y};
  }
};

class Circle {
 public:
  Circle(Point2 center, double radius);

  Point2 center() const { return center_; }
  double radius() const { return radius_; }
  double area() const;
  Circle transformed(const Rigid2& tf) const { return {tf.apply(center_), radius_}; }

  friend bool operator==(const Circle&, const Circle&) = default;

 private:
  Point2 center_;
  double radius_;
};

class Segment {
 public:
  Segment(Point2 a, Point2 b);

  Point2 a() const { return a_; }
  Point2 b() const { return b_; }
  double length() const { return norm(a_ - b_); }

 private:
  Point2 a_;
  Point2 b_;
};

/// Strictly convex polygon with counter-clockwise vertex order.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Point2> vertices);

  /// Accepts either winding; clockwise input is reversed. Sets `reversed` when that happened.
  static ConvexPolygon normalized(std::vector<Point2> vertices, bool* reversed = nullptr);

  std::span<const Point2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  Point2 operator[](std::size_t i) const { return vertices_[i]; }
  Segment edge(std::size_t i) const { return {vertices_[i], vertices_[(i + 1) % size()]}; }

  double area() const;
  /// Mean of the vertices. Rigid-motion bookkeeping uses this point throughout.
  Point2 vertex_mean() const;
  ConvexPolygon transformed(const Rigid2& tf) const;

  friend bool operator==(const ConvexPolygon&, const ConvexPolygon&) = default;

 private:
  std::vector<Point2> vertices_;
};

struct CircleCover {
  std::vector<Circle> circles;

  CircleCover transformed(const Rigid2& tf) const;
};

using Shape = std::variant<Circle, ConvexPolygon>;

Shape transformed(const Shape& shape, const Rigid2& tf);
/// Center of a circle or vertex mean of a polygon.
Point2 reference_point(const Shape& shape);
Circle bounding_circle(const Shape& shape);

// Overlap metric ----------------------------------------------------------

/// max(0, (r_robot + r_obstacle) - |c_robot - c_obstacle|).
double overlap_measure(const Circle& robot, const Circle& obstacle);
/// Sum of overlap_measure over every robot-circle x obstacle-circle pair.
double overlap_measure_cover(const CircleCover& robot, const CircleCover& obstacle);

// Bounding circles --------------------------------------------------------

Circle min_enclosing_circle(std::span<const Point2> points);
Circle min_enclosing_circle(const ConvexPolygon& polygon);

/// Splits the polygon into k equal-width slabs across its longest principal
/// axis and bounds each slab by its minimum enclosing circle.
CircleCover k_circle_cover(const ConvexPolygon& polygon, int k);

/// Clips a convex point loop to the half-plane dot(n, p) <= offset.
std::vector<Point2> clip_half_plane(std::span<const Point2> loop, Point2 n, double offset);

// Predicates --------------------------------------------------------------

/// Discriminant of the segment's supporting line against the circle.
/// Negative iff the infinite line misses the circle.
double line_circle_discriminant(Point2 a, Point2 b, Point2 center, double radius);
bool line_circle_no_intersection(const Segment& s, const Circle& c);

struct SegmentParams {
  double t = 0.0;
  double s = 0.0;
};

constexpr double kParallelThreshold = 1e-12;
constexpr double kDefaultSegmentEpsilon = 1e-8;

/// Parameters of the crossing point, where p(t) = t*a + (1-t)*b on each
/// segment. `epsilon` is added to both numerators.
SegmentParams segment_params(const Segment& s1, const Segment& s2,
                             double epsilon = kDefaultSegmentEpsilon);
/// Raw form shared with the constraint builders: numerators and denominator.
struct SegmentParamTerms {
  double t_numerator;
  double s_numerator;
  double denominator;
};
SegmentParamTerms segment_param_terms(Point2 p1, Point2 p2, Point2 p3, Point2 p4);

/// Exact orientation-based test; touching and collinear overlap count.
bool segments_intersect(const Segment& s1, const Segment& s2);

/// Separating-axis test; touching counts as intersecting.
bool polygons_intersect(const ConvexPolygon& p, const ConvexPolygon& q);
bool polygon_circle_intersect(const ConvexPolygon& p, const Circle& c);
bool shapes_intersect(const Shape& a, const Shape& b);

// Distances ---------------------------------------------------------------

double point_segment_distance(Point2 p, Point2 a, Point2 b);
/// Signed distance from a point to a convex loop boundary (negative inside).
double signed_distance_to_convex(Point2 p, std::span<const Point2> loop);
/// Euclidean gap when disjoint, minus the separating-axis penetration depth
/// when overlapping. Continuous through contact.
double signed_separation(std::span<const Point2> p, std::span<const Point2> q);
double signed_separation(const Shape& a, const Shape& b);

/// Certificate: true when the shapes are disjoint with at least `slack` clearance.
bool certified_disjoint(const Shape& a, const Shape& b, double slack);

}  // namespace cdplan
