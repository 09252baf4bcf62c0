#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdplan/dynamics.hpp"
#include "cdplan/geometry.hpp"
#include "cdplan/nlp.hpp"
#include "cdplan/scene.hpp"

namespace cdplan {

/// Which no-overlap constraints the displacement NLP uses.
///   LineParametric: supporting-line discriminant against circle witnesses and
///                   1/t, 1/s <= 1 against polygon witness edges. Conservative.
///   Clearance:      signed separation >= margin per witness part. Exact.
///   Both:           Clearance from every start; when every witness is a circle,
///                   LineParametric from the first
///                   kLineParametricStarts; keep the best certified result.
enum class ConstraintModel { LineParametric, Clearance, Both };

inline constexpr std::size_t kLineParametricStarts = 2;

enum class DisplacementObjective { VertexSum, CentroidShift };

struct DisplacementSettings {
  nlp::NlpSettings solver = default_solver();
  double margin = 1e-4;
  double clearance_slack = 1e-6;
  double epsilon = kDefaultSegmentEpsilon;
  ConstraintModel constraints = ConstraintModel::Both;
  DisplacementObjective objective = DisplacementObjective::VertexSum;
  /// Number of generated starts actually solved (at most 12).
  int max_starts = 12;

  static nlp::NlpSettings default_solver();
};

struct DisplacementProblem {
  Shape obstacle;
  std::vector<Shape> witnesses;
  MotionRestriction restriction = MotionRestriction::Free;
  std::vector<nlp::Vector> initial_points;
};

struct DisplacementSolution {
  Shape new_shape;
  Rigid2 motion;  // maps the old shape onto new_shape about the origin
  double centroid_shift = 0.0;
  double rotation = 0.0;
  double objective_value = 0.0;
  bool feasible = false;
  double min_clearance = 0.0;
};

/// Thrown when no start yields a certified placement; carries the best attempt.
class DisplacementFailure : public NoFeasibleSolutionFound {
 public:
  DisplacementFailure(const std::string& what, DisplacementSolution best)
      : NoFeasibleSolutionFound(what), best_(std::move(best)) {}
  const DisplacementSolution& best() const { return best_; }

 private:
  DisplacementSolution best_;
};

// Decision vectors: polygon -> (x0, y0, x1, y1, ...) of the displaced
// vertices; circle -> displaced center (x, y).

nlp::Vector decision_vector(const Shape& shape);

/// Circle obstacle against circle witnesses. A single witness is resolved in
/// closed form along the center line; several go through the NLP.
DisplacementSolution displace_circle_circle(const Circle& obstacle, std::span<const Circle> witnesses,
                                            const DisplacementSettings& settings = {});

/// Discriminant rows for every obstacle edge against `witness`:
/// (d.e)^2 - |d|^2 (|e|^2 - r^2) + margin <= 0.
std::vector<nlp::SmoothFunction> build_segment_circle_constraints(int vertex_count,
                                                                  const Circle& witness,
                                                                  double margin);

/// 1/t - 1 <= 0 and 1/s - 1 <= 0 for every obstacle edge against `witness_edge`.
/// Evaluates to -1 (inactive) while the pair is parallel.
std::vector<nlp::SmoothFunction> build_segment_segment_constraints(int vertex_count,
                                                                   const Segment& witness_edge,
                                                                   double epsilon);

/// Rigidity equalities: edge lengths, fan diagonals from vertex 0 and fan
/// triangle orientations (Free), plus a fixed vertex mean (RotateOnly), or fixed consecutive coordinate
/// differences (TranslateOnly).
std::vector<nlp::SmoothFunction> build_rigidity_constraints(const ConvexPolygon& shape,
                                                            MotionRestriction restriction);

/// Exact clearance rows: margin - signed_separation(displaced, witness) <= 0, with gradients
/// through the active edge / vertex pair.
std::vector<nlp::SmoothFunction> build_clearance_constraints(const Shape& obstacle,
                                                             std::span<const Shape> witnesses,
                                                             double margin);

/// Starting points shifting the obstacle by +-Delta, +-(Delta+delta) and
/// +-(Delta-delta) along x and y, where Delta is the largest witness
/// diameter and delta = delta_step * Delta. Certified-feasible candidates
/// come first. RotateOnly obstacles get rotations about the vertex mean instead.
std::vector<nlp::Vector> initial_points(const Shape& obstacle, std::span<const Shape> witnesses,
                                        MotionRestriction restriction, double delta_step = 0.25,
                                        double slack = 1e-6);

/// Largest witness diameter (circle diameter or polygon circumdiameter).
double witness_diameter(std::span<const Shape> witnesses);

DisplacementSolution displace(const DisplacementProblem& problem,
                              const DisplacementSettings& settings = {});

/// Minimum signed separation between `shape` and every witness.
double min_clearance(const Shape& shape, std::span<const Shape> witnesses);

// Whole-trajectory resolution ---------------------------------------------

struct ResolveSettings {
  DisplacementSettings displacement;
  /// Interpolation step (fraction of a timestep) for witnesses and certificates.
  double step_fraction = 0.01;
  /// Keep every n-th overlapping sample as an initial witness.
  int witness_stride = 10;
  /// Certificate-driven witness refinement rounds.
  int refinement_rounds = 6;
};

struct ObstacleResolution {
  int obstacle_id = 0;
  Shape before;
  DisplacementSolution solution;
  std::string error;  // empty on success
};

struct ResolveResult {
  std::vector<ObstacleResolution> resolutions;
  double total_displacement = 0.0;
  int displaced_count = 0;
  bool all_feasible = true;
};

ResolveResult resolve_all(const Trajectory& trajectory, const RobotBody& robot,
                          std::span<const Obstacle> obstacles, const ResolveSettings& settings = {});

}  // namespace cdplan
