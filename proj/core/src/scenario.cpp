#include "cdplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "scenario_json.hpp"

namespace cdplan {

namespace {

using io::json;

// Number of slabs for a default cover: the polygon's aspect ratio across its
// thinnest edge direction, capped to keep the overlap stage cheap.
int default_cover_size(const ConvexPolygon& p) {
  double best_height = std::numeric_limits<double>::infinity();
  double best_width = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point2 e = p[(i + 1) % p.size()] - p[i];
    const Point2 u = (1.0 / norm(e)) * e;
    const Point2 n{-u.y, u.x};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, nlo = lo, nhi = -lo;
    for (Point2 v : p.vertices()) {
      lo = std::min(lo, dot(v, u));
      hi = std::max(hi, dot(v, u));
      nlo = std::min(nlo, dot(v, n));
      nhi = std::max(nhi, dot(v, n));
    }
    if (nhi - nlo < best_height) {
      best_height = nhi - nlo;
      best_width = hi - lo;
    }
  }
  const double aspect = std::max(best_width, best_height) / std::min(best_width, best_height);
  return std::clamp(static_cast<int>(std::ceil(aspect - 1e-9)), 1, 6);
}

CircleCover default_cover(const Shape& s) {
  if (const auto* c = std::get_if<Circle>(&s)) return CircleCover{{*c}};
  const auto& p = std::get<ConvexPolygon>(s);
  return k_circle_cover(p, default_cover_size(p));
}

ConvexPolygon read_polygon(const json& j, const std::string& where, const LoadOptions& options,
                           std::vector<std::string>* warnings) {
  const std::vector<Point2> pts = io::loop(j, where);
  try {
    bool reversed = false;
    ConvexPolygon poly = ConvexPolygon::normalized(pts, &reversed);
    if (reversed) {
      if (options.strict) throw ValidationError(where + ": vertices are clockwise");
      if (warnings) warnings->push_back(where + ": clockwise vertices reversed");
    }
    return poly;
  } catch (const InvalidGeometry& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

MotionRestriction parse_motion(const std::string& s, const std::string& where) {
  if (s == "free") return MotionRestriction::Free;
  if (s == "translate_only") return MotionRestriction::TranslateOnly;
  if (s == "rotate_only") return MotionRestriction::RotateOnly;
  throw ValidationError(where + ": unknown motion '" + s + "'");
}

std::string motion_name(MotionRestriction m) {
  switch (m) {
    case MotionRestriction::Free: return "free";
    case MotionRestriction::TranslateOnly: return "translate_only";
    case MotionRestriction::RotateOnly: return "rotate_only";
  }
  return "free";
}

ModelKind parse_model(const std::string& s) {
  if (s == "planar_velocity") return ModelKind::PlanarVelocity;
  if (s == "down_cross_turn") return ModelKind::DownCrossTurn;
  throw ValidationError("robot.model: unknown model '" + s + "'");
}

std::string model_name(ModelKind k) {
  return k == ModelKind::PlanarVelocity ? "planar_velocity" : "down_cross_turn";
}

ConstraintModel parse_constraints(const std::string& s) {
  if (s == "both") return ConstraintModel::Both;
  if (s == "line_parametric") return ConstraintModel::LineParametric;
  if (s == "clearance") return ConstraintModel::Clearance;
  throw ValidationError("displacement.constraints: unknown value '" + s + "'");
}

std::string constraints_name(ConstraintModel c) {
  switch (c) {
    case ConstraintModel::Both: return "both";
    case ConstraintModel::LineParametric: return "line_parametric";
    case ConstraintModel::Clearance: return "clearance";
  }
  return "both";
}

json circles_json(const CircleCover& cover) {
  json a = json::array();
  for (const Circle& c : cover.circles) a.push_back(io::circle(c));
  return a;
}

CircleCover read_circles(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected a list of circles");
  CircleCover cover;
  for (std::size_t i = 0; i < j.size(); ++i) {
    cover.circles.push_back(io::circle(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return cover;
}

}  // namespace

namespace io {

Scenario scenario_from_json(const json& j, const LoadOptions& options,
                            std::vector<std::string>* warnings) {
  Scenario s;
  if (j.contains("version") && j.at("version") != kScenarioVersion) {
    throw ValidationError("version: unsupported scenario version");
  }
  s.name = io::string_or(j, "name", "", "scenario");

  const json& d = io::field(j, "domain", "scenario");
  s.domain = {io::number_at(d, "xmin", "domain"), io::number_at(d, "xmax", "domain"),
              io::number_at(d, "ymin", "domain"), io::number_at(d, "ymax", "domain")};

  const json& r = io::field(j, "robot", "scenario");
  s.robot.model = parse_model(io::string_or(r, "model", "planar_velocity", "robot"));
  s.robot.dt = io::number_or(r, "dt", 0.1, "robot");
  s.robot.lower = io::control(io::field(r, "control_lower", "robot"), "robot.control_lower");
  s.robot.upper = io::control(io::field(r, "control_upper", "robot"), "robot.control_upper");
  if (r.contains("polygons")) {
    const json& polys = r.at("polygons");
    if (!polys.is_array()) throw ValidationError("robot.polygons: expected a list of polygons");
    for (std::size_t i = 0; i < polys.size(); ++i) {
      s.robot.body.polygons.push_back(
          read_polygon(polys[i], "robot.polygons[" + std::to_string(i) + "]", options, warnings));
    }
  }
  if (r.contains("circles")) {
    s.robot.body.cover = read_circles(r.at("circles"), "robot.circles");
  } else {
    for (const ConvexPolygon& p : s.robot.body.polygons) {
      const CircleCover c = default_cover(p);
      s.robot.body.cover.circles.insert(s.robot.body.cover.circles.end(), c.circles.begin(),
                                        c.circles.end());
    }
  }
  s.robot.start = io::state(io::field(r, "start", "robot"), "start");
  s.robot.goal = io::state(io::field(r, "goal", "robot"), "goal");

  if (j.contains("obstacles")) {
    const json& obs = j.at("obstacles");
    if (!obs.is_array()) throw ValidationError("obstacles: expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const json& o = obs[i];
      const int id = io::integer_at(o, "id", "obstacles[" + std::to_string(i) + "]");
      const std::string where = "obstacle " + std::to_string(id);
      Shape shape = o.contains("polygon")
                        ? Shape(read_polygon(o.at("polygon"), where + ".polygon", options, warnings))
                        : io::shape(o, where);
      Obstacle ob{id, io::boolean_or(o, "movable", true, where), shape, {}};
      ob.cover = o.contains("circles") ? read_circles(o.at("circles"), where + ".circles")
                                       : default_cover(ob.shape);
      ob.motion = parse_motion(io::string_or(o, "motion", "free", where), where + ".motion");
      ob.weight = io::number_or(o, "weight", 1.0, where);
      s.obstacles.push_back(std::move(ob));
    }
  }

  const json p = j.value("planner", json::object());
  PlannerConfig& c = s.planner;
  c.mode.kind = parse_mode(io::string_or(p, "mode", "mcd", "planner"));
  if (p.contains("horizon")) c.horizon = io::integer_at(p, "horizon", "planner");
  if (p.contains("max_steps")) c.max_steps = io::integer_at(p, "max_steps", "planner");
  c.goal_tolerance = io::number_or(p, "goal_tolerance", c.goal_tolerance, "planner");
  const json w = p.value("weights", json::object());
  c.weights.state = io::number_or(w, "Mx", c.weights.state, "planner.weights");
  c.weights.overlap = io::number_or(w, "Mi", c.weights.overlap, "planner.weights");
  c.weights.control = io::number_or(w, "Mu", c.weights.control, "planner.weights");
  c.weights.goal = io::number_or(w, "Mg", c.weights.goal, "planner.weights");
  c.mode.eta0 = io::number_or(p, "eta", c.mode.eta0, "planner");
  c.mode.epsilon = io::number_or(p, "epsilon", c.mode.epsilon, "planner");
  const std::string ref = io::string_or(p, "state_reference", "zero", "planner");
  if (ref == "zero") {
    c.state_reference = StateReference::Zero;
  } else if (ref == "goal") {
    c.state_reference = StateReference::Goal;
  } else {
    throw ValidationError("planner.state_reference: expected zero or goal");
  }
  c.immovable_weight = io::number_or(p, "immovable_weight", c.immovable_weight, "planner");
  c.wall_weight = io::number_or(p, "wall_weight", c.wall_weight, "planner");

  const json dj = j.value("displacement", json::object());
  ResolveSettings& rs = s.resolve;
  rs.displacement.margin = io::number_or(dj, "margin", rs.displacement.margin, "displacement");
  if (dj.contains("max_starts")) rs.displacement.max_starts = io::integer_at(dj, "max_starts", "displacement");
  rs.displacement.constraints = parse_constraints(
      io::string_or(dj, "constraints", constraints_name(rs.displacement.constraints), "displacement"));
  rs.step_fraction = io::number_or(dj, "step_fraction", rs.step_fraction, "displacement");
  if (dj.contains("witness_stride")) rs.witness_stride = io::integer_at(dj, "witness_stride", "displacement");
  if (dj.contains("refinement_rounds")) {
    rs.refinement_rounds = io::integer_at(dj, "refinement_rounds", "displacement");
  }
  return s;
}

json scenario_json(const Scenario& s) {
  json j;
  j["version"] = kScenarioVersion;
  j["name"] = s.name;
  j["domain"] = {{"xmin", s.domain.xmin}, {"xmax", s.domain.xmax}, {"ymin", s.domain.ymin},
                 {"ymax", s.domain.ymax}};
  json polys = json::array();
  for (const ConvexPolygon& p : s.robot.body.polygons) polys.push_back(io::shape(p).at("polygon"));
  j["robot"] = {{"model", model_name(s.robot.model)},
                {"dt", s.robot.dt},
                {"control_lower", io::control(s.robot.lower)},
                {"control_upper", io::control(s.robot.upper)},
                {"polygons", polys},
                {"circles", circles_json(s.robot.body.cover)},
                {"start", io::state(s.robot.start)},
                {"goal", io::state(s.robot.goal)}};
  json obs = json::array();
  for (const Obstacle& o : s.obstacles) {
    json e = io::shape(o.shape);
    e["id"] = o.id;
    e["movable"] = o.movable;
    e["circles"] = circles_json(o.cover);
    e["motion"] = motion_name(o.motion);
    e["weight"] = o.weight;
    obs.push_back(std::move(e));
  }
  j["obstacles"] = obs;
  const PlannerConfig& c = s.planner;
  j["planner"] = {{"mode", to_string(c.mode.kind)},
                  {"horizon", c.horizon},
                  {"max_steps", c.max_steps},
                  {"goal_tolerance", c.goal_tolerance},
                  {"weights",
                   {{"Mx", c.weights.state},
                    {"Mi", c.weights.overlap},
                    {"Mu", c.weights.control},
                    {"Mg", c.weights.goal}}},
                  {"eta", c.mode.eta0},
                  {"epsilon", c.mode.epsilon},
                  {"state_reference", c.state_reference == StateReference::Goal ? "goal" : "zero"},
                  {"immovable_weight", c.immovable_weight},
                  {"wall_weight", c.wall_weight}};
  const ResolveSettings& rs = s.resolve;
  j["displacement"] = {{"margin", rs.displacement.margin},
                       {"max_starts", rs.displacement.max_starts},
                       {"constraints", constraints_name(rs.displacement.constraints)},
                       {"step_fraction", rs.step_fraction},
                       {"witness_stride", rs.witness_stride},
                       {"refinement_rounds", rs.refinement_rounds}};
  return j;
}

}  // namespace io

OverlapCostKind parse_mode(const std::string& text) {
  if (text == "mcd") return OverlapCostKind::MCD;
  if (text == "mcr") return OverlapCostKind::MCR;
  if (text == "shortest") return OverlapCostKind::Shortest;
  throw ValidationError("planner.mode: expected mcd, mcr or shortest, got '" + text + "'");
}

std::string to_string(OverlapCostKind kind) {
  switch (kind) {
    case OverlapCostKind::MCD: return "mcd";
    case OverlapCostKind::MCR: return "mcr";
    case OverlapCostKind::Shortest: return "shortest";
  }
  return "mcd";
}

void validate(const Scenario& s) {
  const Bounds& d = s.domain;
  if (!(d.xmin < d.xmax && d.ymin < d.ymax)) throw ValidationError("domain: empty bounds");
  if (!d.contains(s.robot.start.position())) throw ValidationError("start: outside the domain");
  if (!d.contains(s.robot.goal.position())) throw ValidationError("goal: outside the domain");
  if (!(s.robot.dt > 0.0)) throw ValidationError("robot.dt: must be positive");
  for (int i = 0; i < 3; ++i) {
    if (!(s.robot.lower[i] <= s.robot.upper[i])) {
      throw ValidationError("robot.control_lower: exceeds control_upper");
    }
  }
  if (s.robot.body.polygons.empty() && s.robot.body.cover.circles.empty()) {
    throw ValidationError("robot: needs polygons or circles");
  }
  if (s.robot.body.cover.circles.empty()) throw ValidationError("robot.circles: cover is empty");
  std::set<int> ids;
  for (const Obstacle& o : s.obstacles) {
    const std::string where = "obstacle " + std::to_string(o.id);
    if (!ids.insert(o.id).second) throw ValidationError(where + ": duplicate id");
    if (!(o.weight > 0.0)) throw ValidationError(where + ".weight: must be positive");
    if (o.cover.circles.empty()) throw ValidationError(where + ".circles: cover is empty");
  }
  const PlannerConfig& c = s.planner;
  if (c.horizon < 1) throw ValidationError("planner.horizon: must be at least 1");
  if (c.max_steps < 0) throw ValidationError("planner.max_steps: must be non-negative");
  if (!(c.goal_tolerance > 0.0)) throw ValidationError("planner.goal_tolerance: must be positive");
  const Weights& w = c.weights;
  if (w.state < 0 || w.overlap < 0 || w.control < 0 || w.goal < 0) {
    throw ValidationError("planner.weights: must be non-negative");
  }
  if (!(c.mode.epsilon > 0.0)) throw ValidationError("planner.epsilon: must be positive");
  if (!(s.resolve.step_fraction > 0.0 && s.resolve.step_fraction <= 1.0)) {
    throw ValidationError("displacement.step_fraction: must be in (0, 1]");
  }
  if (s.resolve.displacement.max_starts < 1) {
    throw ValidationError("displacement.max_starts: must be at least 1");
  }
}

static Scenario parse_scenario_from(const std::string& text, const std::string& source,
                                   const LoadOptions& options, std::vector<std::string>* warnings) {
  Scenario s = io::scenario_from_json(io::parse(text, source), options, warnings);
  validate(s);
  return s;
}

Scenario parse_scenario(const std::string& text, const LoadOptions& options,
                        std::vector<std::string>* warnings) {
  return parse_scenario_from(text, "scenario", options, warnings);
}

Scenario load_scenario(const std::filesystem::path& path, const LoadOptions& options,
                       std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_from(buf.str(), path.string(), options, warnings);
}

std::string scenario_to_string(const Scenario& scenario) { return io::scenario_json(scenario).dump(2) + "\n"; }

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << scenario_to_string(scenario);
}

PlanningProblem to_planning_problem(const Scenario& s) {
  return PlanningProblem{DynamicsModel(s.robot.model, s.robot.dt, s.robot.lower, s.robot.upper),
                         s.robot.body, s.robot.start, s.robot.goal, s.obstacles, s.domain};
}

void apply(Scenario& s, const PlanOverrides& o) {
  if (o.mode) s.planner.mode.kind = *o.mode;
  if (o.horizon) s.planner.horizon = *o.horizon;
  if (o.overlap_weight) s.planner.weights.overlap = *o.overlap_weight;
  if (o.seed_starts) s.resolve.displacement.max_starts = *o.seed_starts;
}

}  // namespace cdplan
