#include "cdplan/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cdplan {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

DynamicsModel::DynamicsModel(ModelKind kind, double dt, Control lower, Control upper)
    : kind_(kind), dt_(dt), lower_(lower), upper_(upper) {
  if (kind == ModelKind::PlanarVelocity && !(dt > 0.0 && std::isfinite(dt))) {
    throw std::invalid_argument("dynamics model: dt must be positive");
  }
  for (int i = 0; i < 3; ++i) {
    if (!(lower[i] <= upper[i])) {
      throw std::invalid_argument("dynamics model: control lower bound exceeds upper bound");
    }
  }
}

bool DynamicsModel::within_bounds(const Control& u) const {
  for (int i = 0; i < 3; ++i) {
    if (!(u[i] >= lower_[i] && u[i] <= upper_[i])) return false;
  }
  return true;
}

Control DynamicsModel::clamp(const Control& u) const {
  Control out{};
  for (int i = 0; i < 3; ++i) out[i] = std::clamp(u[i], lower_[i], upper_[i]);
  return out;
}

RobotState DynamicsModel::propagate(const RobotState& x, const Control& u) const {
  const double c = std::cos(x.theta);
  const double s = std::sin(x.theta);
  if (kind_ == ModelKind::PlanarVelocity) {
    return {x.x + dt_ * (u[0] * c - u[1] * s), x.y + dt_ * (u[0] * s + u[1] * c),
            wrap_angle(x.theta + dt_ * u[2])};
  }
  const double a = x.theta + 0.5 * u[2];
  const double b = x.theta + 0.5 * (u[2] + std::numbers::pi);
  return {x.x + u[0] * std::cos(a) + u[1] * std::cos(b),
          x.y + u[0] * std::sin(a) + u[1] * std::sin(b), wrap_angle(x.theta + u[2])};
}

StepJacobians DynamicsModel::jacobians(const RobotState& x, const Control& u) const {
  StepJacobians j;
  j.state = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  if (kind_ == ModelKind::PlanarVelocity) {
    const double c = std::cos(x.theta);
    const double s = std::sin(x.theta);
    j.state[2] = dt_ * (-u[0] * s - u[1] * c);
    j.state[5] = dt_ * (u[0] * c - u[1] * s);
    j.control = {dt_ * c, -dt_ * s, 0, dt_ * s, dt_ * c, 0, 0, 0, dt_};
    return j;
  }
  const double a = x.theta + 0.5 * u[2];
  const double b = x.theta + 0.5 * (u[2] + std::numbers::pi);
  const double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b);
  const double dxdth = -u[0] * sa - u[1] * sb;
  const double dydth = u[0] * ca + u[1] * cb;
  j.state[2] = dxdth;
  j.state[5] = dydth;
  j.control = {ca, cb, 0.5 * dxdth, sa, sb, 0.5 * dydth, 0, 0, 1};
  return j;
}

RobotState step(const DynamicsModel& model, const RobotState& x, const Control& u) {
  if (!model.within_bounds(u)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "control (" << u[0] << ", " << u[1] << ", " << u[2] << ") is outside the bounds";
    throw ControlOutOfBounds(msg.str());
  }
  return model.propagate(x, u);
}

std::vector<RobotState> rollout(const DynamicsModel& model, const RobotState& x0,
                                std::span<const Control> controls) {
  std::vector<RobotState> states;
  states.reserve(controls.size() + 1);
  states.push_back(x0);
  for (const Control& u : controls) states.push_back(step(model, states.back(), u));
  return states;
}

std::vector<Shape> RobotBody::parts() const {
  std::vector<Shape> out;
  if (!polygons.empty()) {
    out.assign(polygons.begin(), polygons.end());
  } else {
    out.assign(cover.circles.begin(), cover.circles.end());
  }
  return out;
}

Footprint footprint_at(const RobotState& x, std::span<const ConvexPolygon> base_polygons,
                       const CircleCover& base_cover) {
  const Rigid2 tf = x.pose();
  Footprint fp;
  fp.polygons.reserve(base_polygons.size());
  for (const ConvexPolygon& p : base_polygons) fp.polygons.push_back(p.transformed(tf));
  fp.cover = base_cover.transformed(tf);
  return fp;
}

std::vector<Shape> footprint_parts(const RobotBody& body, const RobotState& x) {
  const Rigid2 tf = x.pose();
  std::vector<Shape> out;
  if (!body.polygons.empty()) {
    out.reserve(body.polygons.size());
    for (const ConvexPolygon& p : body.polygons) out.emplace_back(p.transformed(tf));
  } else {
    out.reserve(body.cover.circles.size());
    for (const Circle& c : body.cover.circles) out.emplace_back(c.transformed(tf));
  }
  return out;
}

RobotState interpolate(const RobotState& a, const RobotState& b, double f) {
  return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y),
          wrap_angle(a.theta + f * wrap_angle(b.theta - a.theta))};
}

}  // namespace cdplan
