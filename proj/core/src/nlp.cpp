#include "cdplan/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdplan/errors.hpp"

namespace cdplan::nlp {

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw NonFiniteEvaluation(std::string(what) + " returned a non-finite value");
  }
  return v;
}

Vector eval_gradient(const SmoothFunction& fn, const Vector& z, double h) {
  if (fn.gradient) {
    Vector g = fn.gradient(z);
    if (!g.allFinite()) throw NonFiniteEvaluation("analytic gradient is not finite");
    return g;
  }
  return gradient(fn.value, z, h);
}

// PHR augmented Lagrangian for fixed multipliers and penalty.
class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const NlpProblem& p, double h)
      : p_(p),
        h_(h),
        lambda_(Vector::Zero(static_cast<Eigen::Index>(p.inequalities.size()))),
        mu_(Vector::Zero(static_cast<Eigen::Index>(p.equalities.size()))) {}

  double rho = 10.0;

  double value(const Vector& z) const {
    double v = checked(p_.objective(z), "objective");
    for (std::size_t j = 0; j < p_.equalities.size(); ++j) {
      const double hj = checked(p_.equalities[j](z), "equality constraint");
      v += mu_[j] * hj + 0.5 * rho * hj * hj;
    }
    for (std::size_t i = 0; i < p_.inequalities.size(); ++i) {
      const double gi = checked(p_.inequalities[i](z), "inequality constraint");
      const double shifted = std::max(0.0, lambda_[i] + rho * gi);
      v += (shifted * shifted - lambda_[i] * lambda_[i]) / (2.0 * rho);
    }
    return v;
  }

  Vector gradient(const Vector& z) const {
    Vector g = eval_gradient(p_.objective, z, h_);
    for (std::size_t j = 0; j < p_.equalities.size(); ++j) {
      const double hj = p_.equalities[j](z);
      g += (mu_[j] + rho * hj) * eval_gradient(p_.equalities[j], z, h_);
    }
    for (std::size_t i = 0; i < p_.inequalities.size(); ++i) {
      const double shifted = std::max(0.0, lambda_[i] + rho * p_.inequalities[i](z));
      if (shifted > 0.0) g += shifted * eval_gradient(p_.inequalities[i], z, h_);
    }
    return g;
  }

  /// PHR complementarity residual: max_i |max(g_i, -lambda_i / rho)|.
  double complementarity(const Vector& z) const {
    double r = 0.0;
    for (std::size_t i = 0; i < p_.inequalities.size(); ++i) {
      r = std::max(r, std::abs(std::max(p_.inequalities[i](z), -lambda_[i] / rho)));
    }
    return r;
  }

  void update_multipliers(const Vector& z) {
    for (std::size_t j = 0; j < p_.equalities.size(); ++j) {
      mu_[j] += rho * p_.equalities[j](z);
    }
    for (std::size_t i = 0; i < p_.inequalities.size(); ++i) {
      lambda_[i] = std::max(0.0, lambda_[i] + rho * p_.inequalities[i](z));
    }
  }

 private:
  const NlpProblem& p_;
  double h_;
  Vector lambda_;
  Vector mu_;
};

struct InnerResult {
  Vector z;
  double value;
  double grad_norm;
  int iterations;
  bool stalled;
};

InnerResult minimize_bfgs(const AugmentedLagrangian& al, Vector z, double tol, int max_iter,
                          double min_step_ratio) {
  const Eigen::Index n = z.size();
  double f = al.value(z);
  Vector g = al.gradient(z);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool fresh = true;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= tol) {
      return {z, f, g.lpNorm<Eigen::Infinity>(), it, false};
    }
    Vector dir = -hinv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      fresh = true;
      dir = -g;
      slope = -g.squaredNorm();
    }
    const double max_step = 10.0 * std::max(1.0, z.norm());
    if (dir.norm() > max_step) {
      const double scale = max_step / dir.norm();
      dir *= scale;
      slope *= scale;
    }
    double alpha = 1.0;
    Vector trial;
    double f_trial = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial = z + alpha * dir;
      f_trial = al.value(trial);
      if (f_trial <= f + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    const double step = (trial - z).lpNorm<Eigen::Infinity>();
    if (!accepted || step == 0.0 || step <= min_step_ratio * std::max(1.0, z.lpNorm<Eigen::Infinity>())) {
      if (!fresh) {
        hinv.setIdentity();
        fresh = true;
        continue;
      }
      return {z, f, g.lpNorm<Eigen::Infinity>(), it, true};
    }
    Vector g_trial = al.gradient(trial);
    const Vector s = trial - z;
    const Vector y = g_trial - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) {
        hinv *= sy / y.squaredNorm();
        fresh = false;
      }
      const double r = 1.0 / sy;
      const Vector hy = hinv * y;
      // Inverse BFGS update written out to keep it O(n^2).
      hinv += ((sy + y.dot(hy)) * r * r) * (s * s.transpose()) -
              r * (hy * s.transpose() + s * hy.transpose());
    }
    z = std::move(trial);
    f = f_trial;
    g = std::move(g_trial);
  }
  return {z, f, g.lpNorm<Eigen::Infinity>(), it, false};
}

constexpr int kMaxIdleOuter = 4;

}  // namespace

std::string to_string(NlpStatus status) {
  switch (status) {
    case NlpStatus::Converged:
      return "converged";
    case NlpStatus::IterationLimit:
      return "iteration_limit";
    case NlpStatus::Infeasible:
      return "infeasible";
  }
  return "unknown";
}

Vector gradient(const std::function<double(const Vector&)>& fn, const Vector& z, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("gradient: step must be positive");
  Vector g(z.size());
  Vector probe = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    probe[i] = z[i] + h;
    const double up = fn(probe);
    probe[i] = z[i] - h;
    const double down = fn(probe);
    probe[i] = z[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NonFiniteEvaluation("function returned a non-finite value during differencing");
    }
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double max_violation(const NlpProblem& problem, const Vector& z) {
  double v = 0.0;
  for (const auto& g : problem.inequalities) v = std::max(v, g(z));
  for (const auto& h : problem.equalities) v = std::max(v, std::abs(h(z)));
  return v;
}

NlpResult solve(const NlpProblem& problem, const NlpSettings& settings) {
  if (problem.dimension <= 0 || problem.initial_point.size() != problem.dimension) {
    throw std::invalid_argument("nlp: initial point does not match the problem dimension");
  }
  if (!problem.objective.value) throw std::invalid_argument("nlp: objective is missing");

  AugmentedLagrangian al(problem, settings.finite_difference_step);
  al.rho = settings.initial_penalty;

  Vector z = problem.initial_point;
  const double f0 = checked(problem.objective(z), "objective");
  double viol = checked(max_violation(problem, z), "constraint");

  // Best feasible point seen, so a feasible start is never made worse.
  bool have_feasible = viol <= settings.constraint_tolerance;
  Vector best_feasible = z;
  double best_feasible_f = f0;

  NlpResult result;
  int total_inner = 0;
  double prev_viol = viol;
  bool converged = false;
  int outer = 0;
  int idle = 0;
  double kkt = std::numeric_limits<double>::infinity();
  for (; outer < settings.max_outer_iterations; ++outer) {
    const double scale = std::max(1.0, std::abs(problem.objective(z)));
    const InnerResult inner = minimize_bfgs(al, z, settings.gradient_tolerance * scale,
                                            settings.max_inner_iterations, settings.min_step_ratio);
    total_inner += inner.iterations;
    const bool moved = (inner.z - z).lpNorm<Eigen::Infinity>() >
                       1e-9 * std::max(1.0, z.lpNorm<Eigen::Infinity>());
    z = inner.z;
    kkt = inner.grad_norm;
    viol = max_violation(problem, z);
    const double comp = al.complementarity(z);
    al.update_multipliers(z);

    const double f = problem.objective(z);
    if (viol <= settings.constraint_tolerance && (!have_feasible || f <= best_feasible_f)) {
      best_feasible = z;
      best_feasible_f = f;
      have_feasible = true;
    }
    const bool inner_done =
        inner.stalled || inner.grad_norm <= settings.gradient_tolerance *
                                                 std::max(1.0, std::abs(f));
    if (viol <= settings.constraint_tolerance && comp <= settings.constraint_tolerance && inner_done) {
      converged = true;
      ++outer;
      break;
    }
    idle = moved ? 0 : idle + 1;
    if (viol > settings.constraint_tolerance && idle >= kMaxIdleOuter) {
      ++outer;
      break;
    }
    if (viol > settings.constraint_tolerance && !moved) {
      // stationary or stuck on a kink while infeasible: step off it
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        z[i] += 1e-3 * std::max(1.0, std::abs(z[i])) * std::cos(2.4 * static_cast<double>(i) + 0.7);
      }
    }
    if (viol > 0.25 * prev_viol) {
      al.rho = std::min(al.rho * settings.penalty_growth, settings.max_penalty);
    }
    prev_viol = viol;
  }

  result.outer_iterations = outer;
  result.inner_iterations = total_inner;
  result.kkt_residual = kkt;
  if (converged) {
    result.status = NlpStatus::Converged;
  } else if (viol > settings.constraint_tolerance && al.rho >= settings.max_penalty) {
    result.status = NlpStatus::Infeasible;
  } else {
    result.status = NlpStatus::IterationLimit;
  }

  const double f_final = problem.objective(z);
  const bool final_feasible = viol <= settings.constraint_tolerance;
  if (have_feasible && (!final_feasible || best_feasible_f < f_final)) {
    z = best_feasible;
    viol = max_violation(problem, z);
    if (result.status != NlpStatus::Converged) result.status = NlpStatus::IterationLimit;
  }
  result.point = z;
  result.objective_value = problem.objective(z);
  result.max_constraint_violation = viol;
  return result;
}

}  // namespace cdplan::nlp
