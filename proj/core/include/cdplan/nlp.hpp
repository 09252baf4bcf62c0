#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace cdplan::nlp {

using Vector = Eigen::VectorXd;

/// A scalar map with an optional analytic gradient. Without one, central
/// finite differences are used.
struct SmoothFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;

  double operator()(const Vector& z) const { return value(z); }
};

/// minimize objective(z) s.t. inequalities(z) <= 0, equalities(z) = 0.
struct NlpProblem {
  int dimension = 0;
  SmoothFunction objective;
  std::vector<SmoothFunction> inequalities;
  std::vector<SmoothFunction> equalities;
  Vector initial_point;
};

struct NlpSettings {
  int max_outer_iterations = 50;
  int max_inner_iterations = 500;
  double constraint_tolerance = 1e-6;
  double gradient_tolerance = 1e-6;
  double finite_difference_step = 1e-7;
  double penalty_growth = 10.0;
  double initial_penalty = 10.0;
  double max_penalty = 1e10;
  /// Accepted steps shorter than this times max(1, |z|) count as a failed line search.
  double min_step_ratio = 0.0;
};

enum class NlpStatus { Converged, IterationLimit, Infeasible };

std::string to_string(NlpStatus status);

struct NlpResult {
  Vector point;
  double objective_value = 0.0;
  double max_constraint_violation = 0.0;
  NlpStatus status = NlpStatus::IterationLimit;
  /// Infinity norm of the augmented-Lagrangian gradient at `point`.
  double kkt_residual = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
};

/// Central differences: (fn(z + h e_i) - fn(z - h e_i)) / 2h.
/// Throws NonFiniteEvaluation when any sample is NaN or infinite.
Vector gradient(const std::function<double(const Vector&)>& fn, const Vector& z, double h);

/// Largest violation over all constraints: max(g_i)+ and |h_j|.
double max_violation(const NlpProblem& problem, const Vector& z);

/// Augmented-Lagrangian (PHR) outer loop around a BFGS inner minimizer.
///
/// Converged means the independent constraint re-check is within
/// `constraint_tolerance` and the inner minimization either met
/// `gradient_tolerance` (scaled by max(1, |objective|)) or stalled in its
/// line search at finite-difference noise level. Throws NonFiniteEvaluation
/// if a callback returns NaN or infinity.
NlpResult solve(const NlpProblem& problem, const NlpSettings& settings = {});

}  // namespace cdplan::nlp
