#include "cdplan/overlap_planner.hpp"

#include <algorithm>
#include <cmath>

namespace cdplan {

namespace {

struct TermContext {
  const CircleCover& cover;
  std::span<const OverlapObstacle> obstacles;
  const Weights& w;
  const OverlapCostMode& mode;
  std::span<const double> eta;
  const RobotState& reference;
  const Bounds* domain;
  double wall_weight;
};

bool penalized(const OverlapObstacle& o, OverlapCostKind kind) {
  return !(o.movable && kind == OverlapCostKind::Shortest);
}

double overlap_term(const TermContext& ctx, std::size_t i, std::span<const Point2> centers,
                    double c, double s, double* gx) {
  const OverlapObstacle& o = ctx.obstacles[i];
  double total = 0.0;
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const double rr = ctx.cover.circles[j].radius();
    for (const Circle& oc : o.cover.circles) {
      const double d = norm(centers[j] - oc.center());
      total += std::max(0.0, rr + oc.radius() - d);
    }
  }
  if (!(total > 0.0)) return 0.0;

  double h = total;
  double dh = 1.0;
  if (o.movable && ctx.mode.kind == OverlapCostKind::MCR) {
    const double eta = ctx.eta.empty() ? ctx.mode.eta0 : ctx.eta[i];
    h = ctx.mode.h(total, eta);
    dh = ctx.mode.dh(total, eta);
  }
  const double cost = o.weight * h * h;
  if (gx != nullptr) {
    const double dcost = 2.0 * o.weight * h * dh;
    if (dcost != 0.0) {
      for (std::size_t j = 0; j < centers.size(); ++j) {
        const Circle& rc = ctx.cover.circles[j];
        const Point2 b = rc.center();
        const Point2 dcdth{-s * b.x - c * b.y, c * b.x - s * b.y};
        for (const Circle& oc : o.cover.circles) {
          const Point2 diff = centers[j] - oc.center();
          const double d = norm(diff);
          if (!(rc.radius() + oc.radius() - d > 0.0) || d == 0.0) continue;
          // dL/dc = -diff/d
          const Point2 dl{-diff.x / d, -diff.y / d};
          gx[0] += dcost * dl.x;
          gx[1] += dcost * dl.y;
          gx[2] += dcost * dot(dl, dcdth);
        }
      }
    }
  }
  return cost;
}

double core_term(const TermContext& ctx, std::size_t i, std::span<const Point2> centers,
                 double c, double s, double* gx) {
  const OverlapObstacle& o = ctx.obstacles[i];
  const Circle& core = *o.core;
  double cost = 0.0;
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const Circle& rc = ctx.cover.circles[j];
    const Point2 diff = centers[j] - core.center();
    const double d = norm(diff);
    const double l = rc.radius() + core.radius() - d;
    if (!(l > 0.0)) continue;
    cost += o.core_weight * l * l;
    if (gx != nullptr && d > 0.0) {
      const Point2 b = rc.center();
      const Point2 dcdth{-s * b.x - c * b.y, c * b.x - s * b.y};
      const double g = 2.0 * o.core_weight * l;
      const Point2 dl{-diff.x / d, -diff.y / d};
      gx[0] += g * dl.x;
      gx[1] += g * dl.y;
      gx[2] += g * dot(dl, dcdth);
    }
  }
  return cost;
}

double wall_term(const TermContext& ctx, std::span<const Point2> centers, double c, double s,
                 double* gx) {
  if (ctx.domain == nullptr || ctx.wall_weight <= 0.0) return 0.0;
  const Bounds& dom = *ctx.domain;
  double cost = 0.0;
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const double r = ctx.cover.circles[j].radius();
    const Point2 b = ctx.cover.circles[j].center();
    const Point2 dcdth{-s * b.x - c * b.y, c * b.x - s * b.y};
    const Point2 p = centers[j];
    // Excess beyond each wall and the derivative of that excess w.r.t. the circle center.
    const double ex[4] = {std::max(0.0, dom.xmin - (p.x - r)), std::max(0.0, p.x + r - dom.xmax),
                          std::max(0.0, dom.ymin - (p.y - r)), std::max(0.0, p.y + r - dom.ymax)};
    const Point2 dir[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    for (int k = 0; k < 4; ++k) {
      if (!(ex[k] > 0.0)) continue;
      cost += ctx.wall_weight * ex[k] * ex[k];
      if (gx != nullptr) {
        const double g = 2.0 * ctx.wall_weight * ex[k];
        gx[0] += g * dir[k].x;
        gx[1] += g * dir[k].y;
        gx[2] += g * dot(dir[k], dcdth);
      }
    }
  }
  return cost;
}

// Every stage term that depends on the state; accumulates d/d(x, y, theta) into gx.
double state_terms(const TermContext& ctx, const RobotState& x, std::span<const int> active,
                   bool all, double* gx) {
  const double dx = x.x - ctx.reference.x;
  const double dy = x.y - ctx.reference.y;
  const double dth = wrap_angle(x.theta - ctx.reference.theta);
  double cost = ctx.w.state * (dx * dx + dy * dy + dth * dth);
  if (gx != nullptr) {
    gx[0] += 2.0 * ctx.w.state * dx;
    gx[1] += 2.0 * ctx.w.state * dy;
    gx[2] += 2.0 * ctx.w.state * dth;
  }
  const double c = std::cos(x.theta);
  const double s = std::sin(x.theta);
  const Rigid2 pose = x.pose();
  std::vector<Point2> centers;
  centers.reserve(ctx.cover.circles.size());
  for (const Circle& rc : ctx.cover.circles) centers.push_back(pose.apply(rc.center()));

  auto visit = [&](std::size_t i) {
    if (penalized(ctx.obstacles[i], ctx.mode.kind)) {
      cost += overlap_term(ctx, i, centers, c, s, gx);
    }
    if (ctx.obstacles[i].core) cost += core_term(ctx, i, centers, c, s, gx);
  };
  if (all) {
    for (std::size_t i = 0; i < ctx.obstacles.size(); ++i) visit(i);
  } else {
    for (int i : active) visit(static_cast<std::size_t>(i));
  }
  cost += wall_term(ctx, centers, c, s, gx);
  return cost;
}

// Disc about the pivot that a single rotation cannot clear for a path bending around it:
// halfway between the inscribed radius (swept by every rotation) and the vertex reach.
Circle rotation_core(const Shape& shape, double margin) {
  if (const auto* circle = std::get_if<Circle>(&shape)) {
    return {circle->center(), circle->radius() + margin};
  }
  const auto& poly = std::get<ConvexPolygon>(shape);
  const Point2 pivot = poly.vertex_mean();
  const double inner = std::max(0.0, -signed_distance_to_convex(pivot, poly.vertices()));
  double outer = inner;
  for (const Point2& v : poly.vertices()) outer = std::max(outer, norm(v - pivot));
  return {pivot, 0.5 * (inner + outer) + margin};
}

Circle enclosing(const CircleCover& cover) {
  std::vector<Point2> pts;
  for (const Circle& c : cover.circles) pts.push_back(c.center());
  Point2 center = pts.front();
  bool distinct = false;
  for (const Point2& p : pts) distinct = distinct || !(p == center);
  if (distinct) center = min_enclosing_circle(pts).center();
  double r = 0.0;
  for (const Circle& c : cover.circles) r = std::max(r, norm(c.center() - center) + c.radius());
  return {center, r};
}

}  // namespace

double OverlapCostMode::h(double overlap, double eta) const {
  if (kind == OverlapCostKind::MCR) return eta * overlap / (overlap + epsilon);
  return overlap;
}

double OverlapCostMode::dh(double overlap, double eta) const {
  if (kind == OverlapCostKind::MCR) {
    const double d = overlap + epsilon;
    return eta * epsilon / (d * d);
  }
  return 1.0;
}

nlp::NlpSettings PlannerConfig::default_solver() {
  nlp::NlpSettings s;
  s.max_outer_iterations = 12;
  s.max_inner_iterations = 120;
  s.constraint_tolerance = 1e-4;
  s.gradient_tolerance = 1e-5;
  return s;
}

CostModel::CostModel(const PlanningProblem& problem, const PlannerConfig& config)
    : model_(problem.model),
      robot_cover_(problem.robot.cover),
      domain_(problem.domain),
      goal_(problem.goal),
      reference_(config.state_reference == StateReference::Goal ? problem.goal : RobotState{}),
      config_(config) {
  if (robot_cover_.circles.empty()) {
    throw std::invalid_argument("planner: robot circle cover is empty");
  }
  for (const Obstacle& o : problem.obstacles) {
    OverlapObstacle oo;
    oo.id = o.id;
    oo.cover = o.cover;
    oo.movable = o.movable;
    oo.weight = o.movable ? config.weights.overlap * o.weight : config.immovable_weight;
    if (oo.cover.circles.empty()) oo.cover.circles.push_back(bounding_circle(o.shape));
    if (o.movable && o.motion == MotionRestriction::RotateOnly) {
      oo.core = rotation_core(o.shape, config.core_margin);
      oo.core_weight = config.immovable_weight;
    }
    obstacle_bounds_.push_back(enclosing(oo.cover));
    obstacles_.push_back(std::move(oo));
  }
  for (const Circle& c : robot_cover_.circles) {
    robot_reach_ = std::max(robot_reach_, norm(c.center()) + c.radius());
  }
  const Control lo = model_.lower();
  const Control hi = model_.upper();
  auto mag = [](double a, double b) { return std::max(std::abs(a), std::abs(b)); };
  if (model_.kind() == ModelKind::PlanarVelocity) {
    step_reach_ = model_.dt() * std::hypot(mag(lo[0], hi[0]), mag(lo[1], hi[1]));
  } else {
    step_reach_ = mag(lo[0], hi[0]) + mag(lo[1], hi[1]);
  }
}

std::vector<double> CostModel::initial_eta() const {
  return std::vector<double>(obstacles_.size(), config_.mode.eta0);
}

std::vector<double> CostModel::overlaps(const RobotState& x) const {
  const CircleCover world = robot_cover_.transformed(x.pose());
  std::vector<double> out;
  out.reserve(obstacles_.size());
  for (const OverlapObstacle& o : obstacles_) out.push_back(overlap_measure_cover(world, o.cover));
  return out;
}

double CostModel::stage_cost(const RobotState& x, const Control& u,
                             std::span<const double> eta) const {
  const TermContext ctx{robot_cover_, obstacles_, config_.weights, config_.mode, eta,
                        reference_,   domain_ ? &*domain_ : nullptr, config_.wall_weight};
  const double uu = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
  return state_terms(ctx, x, {}, true, nullptr) + config_.weights.control * uu;
}

double CostModel::terminal_cost(const RobotState& x) const {
  return cdplan::terminal_cost(x, goal_, config_.weights.goal);
}

double CostModel::horizon_cost(const RobotState& x0, std::span<const double> controls,
                               std::span<const double> eta, std::span<double> grad) const {
  const std::size_t steps = controls.size() / 3;
  const TermContext ctx{robot_cover_, obstacles_, config_.weights, config_.mode, eta,
                        reference_,   domain_ ? &*domain_ : nullptr, config_.wall_weight};

  std::vector<int> active;
  const double reach = robot_reach_ + static_cast<double>(steps) * step_reach_;
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    if (!penalized(obstacles_[i], config_.mode.kind) && !obstacles_[i].core) continue;
    const Circle& b = obstacle_bounds_[i];
    if (norm(b.center() - x0.position()) < reach + b.radius()) active.push_back(static_cast<int>(i));
  }

  auto control_at = [&](std::size_t l) {
    return Control{controls[3 * l], controls[3 * l + 1], controls[3 * l + 2]};
  };
  std::vector<RobotState> states(steps + 1);
  states[0] = x0;
  for (std::size_t l = 0; l < steps; ++l) states[l + 1] = model_.propagate(states[l], control_at(l));

  const bool want_grad = !grad.empty();
  std::vector<std::array<double, 3>> gx(steps + 1, {0.0, 0.0, 0.0});
  double total = 0.0;
  for (std::size_t l = 0; l < steps; ++l) {
    const Control u = control_at(l);
    total += state_terms(ctx, states[l + 1], active, false, want_grad ? gx[l + 1].data() : nullptr);
    total += config_.weights.control * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  }
  const RobotState& last = states[steps];
  const double ex = last.x - goal_.x;
  const double ey = last.y - goal_.y;
  const double eth = wrap_angle(last.theta - goal_.theta);
  const double mg = config_.weights.goal;
  total += mg * (ex * ex + ey * ey + eth * eth);
  if (!want_grad) return total;

  gx[steps][0] += 2.0 * mg * ex;
  gx[steps][1] += 2.0 * mg * ey;
  gx[steps][2] += 2.0 * mg * eth;
  // Reverse sweep through the rollout.
  std::array<double, 3> lam = gx[steps];
  for (std::size_t l = steps; l-- > 0;) {
    const Control u = control_at(l);
    const StepJacobians jac = model_.jacobians(states[l], u);
    for (int c = 0; c < 3; ++c) {
      double g = 2.0 * config_.weights.control * u[c];
      for (int r = 0; r < 3; ++r) g += jac.control[3 * r + c] * lam[r];
      grad[3 * l + c] = g;
    }
    if (l > 0) {
      std::array<double, 3> next = gx[l];
      for (int c = 0; c < 3; ++c) {
        for (int r = 0; r < 3; ++r) next[c] += jac.state[3 * r + c] * lam[r];
      }
      lam = next;
    }
  }
  return total;
}

double stage_cost(const RobotState& x, const Control& u, const CircleCover& robot_cover,
                  std::span<const OverlapObstacle> obstacles, const Weights& w,
                  const OverlapCostMode& mode, std::span<const double> eta,
                  const RobotState& reference) {
  const TermContext ctx{robot_cover, obstacles, w, mode, eta, reference, nullptr, 0.0};
  const double uu = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
  return state_terms(ctx, x, {}, true, nullptr) + w.control * uu;
}

double terminal_cost(const RobotState& x, const RobotState& goal, double mg) {
  const double dx = x.x - goal.x;
  const double dy = x.y - goal.y;
  const double dth = wrap_angle(x.theta - goal.theta);
  return mg * (dx * dx + dy * dy + dth * dth);
}

HorizonPlan plan_horizon(const CostModel& cost, const PlanningProblem& problem,
                         const RobotState& x, const PlannerConfig& config,
                         std::span<const double> eta, std::span<const Control> warm_start) {
  if (config.horizon < 1) throw std::invalid_argument("planner: horizon must be >= 1");
  const int n = 3 * config.horizon;
  const DynamicsModel& model = problem.model;

  nlp::Vector z0 = nlp::Vector::Zero(n);
  for (int l = 0; l < config.horizon; ++l) {
    Control u{0.0, 0.0, 0.0};
    if (!warm_start.empty()) {
      u = warm_start[std::min<std::size_t>(static_cast<std::size_t>(l), warm_start.size() - 1)];
    }
    u = model.clamp(u);
    for (int c = 0; c < 3; ++c) z0[3 * l + c] = u[c];
  }

  // Copy eta so the callbacks never alias caller storage.
  const std::vector<double> eta_copy(eta.begin(), eta.end());
  nlp::NlpProblem prob;
  prob.dimension = n;
  prob.initial_point = z0;
  prob.objective.value = [&cost, x, eta_copy](const nlp::Vector& z) {
    return cost.horizon_cost(x, std::span<const double>(z.data(), z.size()), eta_copy);
  };
  prob.objective.gradient = [&cost, x, eta_copy](const nlp::Vector& z) {
    nlp::Vector g(z.size());
    cost.horizon_cost(x, std::span<const double>(z.data(), z.size()), eta_copy,
                      std::span<double>(g.data(), g.size()));
    return g;
  };
  for (int k = 0; k < n; ++k) {
    const double lo = model.lower()[k % 3];
    const double hi = model.upper()[k % 3];
    prob.inequalities.push_back(
        {[k, hi](const nlp::Vector& z) { return z[k] - hi; },
         [k, n](const nlp::Vector&) {
           nlp::Vector g = nlp::Vector::Zero(n);
           g[k] = 1.0;
           return g;
         }});
    prob.inequalities.push_back(
        {[k, lo](const nlp::Vector& z) { return lo - z[k]; },
         [k, n](const nlp::Vector&) {
           nlp::Vector g = nlp::Vector::Zero(n);
           g[k] = -1.0;
           return g;
         }});
  }

  const nlp::NlpResult res = nlp::solve(prob, config.solver);
  HorizonPlan out;
  out.status = res.status;
  out.cost = res.objective_value;
  out.controls.reserve(static_cast<std::size_t>(config.horizon));
  for (int l = 0; l < config.horizon; ++l) {
    out.controls.push_back(model.clamp({res.point[3 * l], res.point[3 * l + 1], res.point[3 * l + 2]}));
  }
  return out;
}

std::set<int> exact_overlaps(const RobotBody& robot, const Trajectory& trajectory,
                             std::span<const Obstacle> obstacles, double step_fraction) {
  std::set<int> ids;
  if (trajectory.states.empty()) return ids;
  const SweptFootprint swept = sweep(robot, trajectory, step_fraction);
  for (const Obstacle& o : obstacles) {
    const Circle ob = bounding_circle(o.shape);
    bool hit = false;
    for (std::size_t k = 0; k < swept.parts.size() && !hit; ++k) {
      const Circle& sb = swept.bounds[k];
      if (norm(sb.center() - ob.center()) > sb.radius() + ob.radius()) continue;
      for (const Shape& part : swept.parts[k]) {
        if (shapes_intersect(part, o.shape)) {
          hit = true;
          break;
        }
      }
    }
    if (hit) ids.insert(o.id);
  }
  return ids;
}

PlanResult plan(const PlanningProblem& problem, const PlannerConfig& config) {
  if (config.horizon < 1) throw std::invalid_argument("planner: horizon must be >= 1");
  if (!(config.goal_tolerance > 0.0)) {
    throw std::invalid_argument("planner: goal tolerance must be positive");
  }
  const CostModel cost(problem, config);
  PlanResult result;
  result.trajectory.dt = problem.model.dt();
  result.trajectory.states.push_back(problem.start);
  for (const OverlapObstacle& o : cost.obstacles()) result.report.obstacle_ids.push_back(o.id);

  std::vector<double> eta = cost.initial_eta();
  auto mark = [&](const RobotState& x) {
    std::vector<double> row = cost.overlaps(x);
    if (config.mode.kind == OverlapCostKind::MCR) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] > 0.0 && cost.obstacles()[i].movable) eta[i] = 0.0;
      }
    }
    result.report.per_step.push_back(std::move(row));
  };
  mark(problem.start);

  auto at_goal = [&](const RobotState& x) {
    return norm(x.position() - problem.goal.position()) <= config.goal_tolerance;
  };

  RobotState x = problem.start;
  result.goal_reached = at_goal(x);
  std::vector<Control> warm;
  for (int k = 0; k < config.max_steps && !result.goal_reached; ++k) {
    const HorizonPlan hp = plan_horizon(cost, problem, x, config, eta, warm);
    if (hp.status != nlp::NlpStatus::Converged) ++result.unconverged_horizons;
    const Control u = problem.model.clamp(hp.controls.front());
    x = step(problem.model, x, u);
    result.trajectory.controls.push_back(u);
    result.trajectory.states.push_back(x);
    mark(x);
    warm.assign(hp.controls.begin() + 1, hp.controls.end());
    if (warm.empty()) warm.push_back(hp.controls.back());
    result.goal_reached = at_goal(x);
  }
  result.report.eta_state = eta;
  result.report.overlapped_ids = exact_overlaps(problem.robot, result.trajectory,
                                                problem.obstacles, config.report_step_fraction);
  return result;
}

}  // namespace cdplan
