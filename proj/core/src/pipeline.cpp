#include "cdplan/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "scenario_json.hpp"

namespace cdplan {

namespace {

using io::json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json trajectory_json(const Trajectory& t) {
  json states = json::array(), controls = json::array(), stamps = json::array();
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    states.push_back(io::state(t.states[k]));
    stamps.push_back(t.timestamp(k));
  }
  for (const Control& u : t.controls) controls.push_back(io::control(u));
  return {{"dt", t.dt}, {"states", states}, {"controls", controls}, {"timestamps", stamps}};
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory t;
  t.dt = io::number_at(j, "dt", "trajectory");
  const json& states = io::field(j, "states", "trajectory");
  for (std::size_t k = 0; k < states.size(); ++k) {
    t.states.push_back(io::state(states[k], "trajectory.states[" + std::to_string(k) + "]"));
  }
  if (j.contains("controls")) {
    const json& controls = j.at("controls");
    for (std::size_t k = 0; k < controls.size(); ++k) {
      t.controls.push_back(io::control(controls[k], "trajectory.controls[" + std::to_string(k) + "]"));
    }
  }
  return t;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json resolution_json(const ObstacleResolution& r) {
  const DisplacementSolution& s = r.solution;
  json e = {{"id", r.obstacle_id},
            {"before", io::shape(r.before)},
            {"after", io::shape(s.new_shape)},
            {"motion", {{"angle", s.motion.angle}, {"translation", io::point(s.motion.translation)}}},
            {"centroid_shift", s.centroid_shift},
            {"rotation", s.rotation},
            {"objective", s.objective_value},
            {"feasible", s.feasible},
            {"min_clearance", nullable(s.min_clearance)}};
  if (!r.error.empty()) e["error"] = r.error;
  return e;
}

ObstacleResolution resolution_from_json(const json& e) {
  const std::string where = "obstacles[" + std::to_string(e.value("id", 0)) + "]";
  ObstacleResolution r{io::integer_at(e, "id", where), io::shape(io::field(e, "before", where), where + ".before"),
                       DisplacementSolution{io::shape(io::field(e, "after", where), where + ".after"), Rigid2{}},
                       e.value("error", std::string{})};
  DisplacementSolution& s = r.solution;
  if (e.contains("motion")) {
    s.motion.angle = io::number_at(e.at("motion"), "angle", where + ".motion");
    s.motion.translation = io::point(io::field(e.at("motion"), "translation", where), where + ".motion");
  }
  s.centroid_shift = io::number_at(e, "centroid_shift", where);
  s.rotation = io::number_at(e, "rotation", where);
  s.objective_value = io::number_at(e, "objective", where);
  s.feasible = io::boolean_or(e, "feasible", false, where);
  s.min_clearance = number_or_inf(e.value("min_clearance", json(nullptr)));
  return r;
}

json certificate_json(const CertificateSummary& c) {
  return {{"step_fraction", c.step_fraction},
          {"samples", c.samples},
          {"pairs_checked", c.pairs_checked},
          {"violations", c.violations},
          {"min_clearance", c.min_clearance ? json(*c.min_clearance) : json(nullptr)},
          {"violating_ids", c.violating_ids},
          {"passed", c.passed()}};
}

CertificateSummary certificate_from_json(const json& j) {
  CertificateSummary c;
  c.step_fraction = j.at("step_fraction").get<double>();
  c.samples = j.at("samples").get<std::size_t>();
  c.pairs_checked = j.at("pairs_checked").get<std::size_t>();
  c.violations = j.at("violations").get<std::size_t>();
  if (!j.at("min_clearance").is_null()) c.min_clearance = j.at("min_clearance").get<double>();
  c.violating_ids = j.at("violating_ids").get<std::vector<int>>();
  return c;
}

void finish(RunReport& report) {
  report.metrics = compute_metrics(report.obstacles);
  const std::vector<Obstacle> placed = final_obstacles(report.scenario, report.obstacles);
  report.certificate =
      certify(report.scenario.robot.body, report.trajectory, placed, report.scenario.resolve.step_fraction);
}

void run_stage_two(RunReport& report) {
  const auto t0 = std::chrono::steady_clock::now();
  ResolveResult resolved = resolve_all(report.trajectory, report.scenario.robot.body,
                                       report.scenario.obstacles, report.scenario.resolve);
  report.timings.displacement_stage_seconds = seconds_since(t0);
  report.obstacles = std::move(resolved.resolutions);
  finish(report);
}

}  // namespace

bool RunReport::all_displacements_feasible() const {
  for (const ObstacleResolution& r : obstacles) {
    if (!r.solution.feasible) return false;
  }
  return true;
}

RunReport run_pipeline(const Scenario& scenario) {
  validate(scenario);
  RunReport report;
  report.scenario = scenario;
  const auto t0 = std::chrono::steady_clock::now();
  PlanResult planned = plan(to_planning_problem(scenario), scenario.planner);
  report.timings.overlap_stage_seconds = seconds_since(t0);
  report.trajectory = std::move(planned.trajectory);
  report.overlap = std::move(planned.report);
  report.goal_reached = planned.goal_reached;
  report.unconverged_horizons = planned.unconverged_horizons;
  run_stage_two(report);
  return report;
}

RunReport resolve_trajectory(const Scenario& scenario, const Trajectory& trajectory) {
  validate(scenario);
  RunReport report;
  report.scenario = scenario;
  report.trajectory = trajectory;
  if (!trajectory.states.empty()) {
    const RobotState& last = trajectory.states.back();
    report.goal_reached = norm(last.position() - scenario.robot.goal.position()) <=
                          scenario.planner.goal_tolerance;
  }
  run_stage_two(report);
  return report;
}

double metric_total_displacement(std::span<const DisplacementSolution> solutions) {
  double total = 0.0;
  for (const DisplacementSolution& s : solutions) total += s.centroid_shift;
  return total;
}

double metric_total_displacement(std::span<const ObstacleResolution> resolutions) {
  double total = 0.0;
  for (const ObstacleResolution& r : resolutions) total += r.solution.centroid_shift;
  return total;
}

Metrics compute_metrics(std::span<const ObstacleResolution> resolutions) {
  return {metric_total_displacement(resolutions), static_cast<int>(resolutions.size())};
}

std::vector<Obstacle> final_obstacles(const Scenario& scenario,
                                      std::span<const ObstacleResolution> resolutions) {
  std::map<int, const Shape*> moved;
  for (const ObstacleResolution& r : resolutions) moved[r.obstacle_id] = &r.solution.new_shape;
  std::vector<Obstacle> out = scenario.obstacles;
  for (Obstacle& o : out) {
    if (const auto it = moved.find(o.id); it != moved.end()) o.shape = *it->second;
  }
  return out;
}

CertificateSummary certify(const RobotBody& robot, const Trajectory& trajectory,
                           std::span<const Obstacle> obstacles, double step_fraction) {
  CertificateSummary c;
  c.step_fraction = step_fraction;
  if (trajectory.states.empty()) return c;
  const SweptFootprint swept = sweep(robot, trajectory, step_fraction);
  c.samples = swept.parts.size();
  std::set<int> bad;
  for (const Obstacle& o : obstacles) {
    const Circle ob = bounding_circle(o.shape);
    for (std::size_t k = 0; k < swept.parts.size(); ++k) {
      const Circle& b = swept.bounds[k];
      if (norm(b.center() - ob.center()) > b.radius() + ob.radius()) continue;
      for (const Shape& part : swept.parts[k]) {
        ++c.pairs_checked;
        const double sep = signed_separation(part, o.shape);
        c.min_clearance = c.min_clearance ? std::min(*c.min_clearance, sep) : sep;
        if (!certified_disjoint(part, o.shape, 0.0)) {
          ++c.violations;
          bad.insert(o.id);
        }
      }
    }
  }
  c.violating_ids.assign(bad.begin(), bad.end());
  return c;
}

CheckResult check_report(const RunReport& report) {
  CheckResult r;
  const std::vector<Obstacle> placed = final_obstacles(report.scenario, report.obstacles);
  r.certificate = certify(report.scenario.robot.body, report.trajectory, placed,
                          report.scenario.resolve.step_fraction);
  const Metrics m = compute_metrics(report.obstacles);
  r.metrics_consistent = m.total_displacement_magnitude == report.metrics.total_displacement_magnitude &&
                         m.displaced_count == report.metrics.displaced_count;
  return r;
}

std::string report_to_string(const RunReport& report) {
  json j;
  j["version"] = kReportVersion;
  j["trajectory"] = trajectory_json(report.trajectory);
  json per_step = json::array();
  for (const auto& row : report.overlap.per_step) per_step.push_back(row);
  j["overlap"] = {{"goal_reached", report.goal_reached},
                  {"unconverged_horizons", report.unconverged_horizons},
                  {"obstacle_ids", report.overlap.obstacle_ids},
                  {"overlapped_ids", std::vector<int>(report.overlap.overlapped_ids.begin(),
                                                      report.overlap.overlapped_ids.end())},
                  {"eta_state", report.overlap.eta_state},
                  {"per_step", per_step}};
  json obs = json::array();
  for (const ObstacleResolution& r : report.obstacles) obs.push_back(resolution_json(r));
  j["obstacles"] = obs;
  j["metrics"] = {{"total_displacement_magnitude", report.metrics.total_displacement_magnitude},
                  {"displaced_count", report.metrics.displaced_count}};
  j["certificate"] = certificate_json(report.certificate);
  j["config"] = io::scenario_json(report.scenario);
  return j.dump(2) + "\n";
}

RunReport parse_report(const std::string& text, const std::string& source) {
  const json j = io::parse(text, source);
  try {
    RunReport r;
    r.scenario = io::scenario_from_json(io::field(j, "config", "report"), {}, nullptr);
    r.trajectory = trajectory_from_json(io::field(j, "trajectory", "report"));
    const json& ov = io::field(j, "overlap", "report");
    r.goal_reached = ov.at("goal_reached").get<bool>();
    r.unconverged_horizons = ov.at("unconverged_horizons").get<int>();
    r.overlap.obstacle_ids = ov.at("obstacle_ids").get<std::vector<int>>();
    const auto ids = ov.at("overlapped_ids").get<std::vector<int>>();
    r.overlap.overlapped_ids = std::set<int>(ids.begin(), ids.end());
    r.overlap.eta_state = ov.at("eta_state").get<std::vector<double>>();
    r.overlap.per_step = ov.at("per_step").get<std::vector<std::vector<double>>>();
    for (const json& e : io::field(j, "obstacles", "report")) r.obstacles.push_back(resolution_from_json(e));
    const json& m = io::field(j, "metrics", "report");
    r.metrics.total_displacement_magnitude = io::number_at(m, "total_displacement_magnitude", "metrics");
    r.metrics.displaced_count = io::integer_at(m, "displaced_count", "metrics");
    r.certificate = certificate_from_json(io::field(j, "certificate", "report"));
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(source + ": malformed report: " + e.what());
  }
}

RunReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_report(buf.str(), path.string());
}

void save_report(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << report_to_string(report);
}

std::string trajectory_to_string(const Trajectory& trajectory) {
  return json{{"version", kReportVersion}, {"trajectory", trajectory_json(trajectory)}}.dump(2) + "\n";
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const json j = io::parse(buf.str(), path.string());
  return trajectory_from_json(j.contains("trajectory") ? j.at("trajectory") : j);
}

std::string timings_to_string(const StageTimings& t) {
  return json{{"overlap_stage_seconds", t.overlap_stage_seconds},
              {"displacement_stage_seconds", t.displacement_stage_seconds}}
             .dump(2) +
         "\n";
}

}  // namespace cdplan
