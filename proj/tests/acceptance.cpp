#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "cdplan/displacement.hpp"
#include "cdplan/experiment.hpp"
#include "cdplan/nlp.hpp"
#include "cdplan/oracle.hpp"
#include "cdplan/pipeline.hpp"
#include "support/oracles.hpp"

using namespace cdplan;
using cdplan::testing::uniform;
using nlp::Vector;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const fs::path kSource = CDPLAN_SOURCE_DIR;

// 1 -----------------------------------------------------------------------

Outcome zero_overlap() {
  std::vector<std::pair<std::string, Scenario>> scenes;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kSource / "scenarios")) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) scenes.emplace_back(f.stem().string(), load_scenario(f));
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    scenes.emplace_back("random_" + std::to_string(i), cdplan::testing::random_scenario(rng, 10));
  }
  int failures = 0;
  int short_of_goal = 0;
  double slowest = 0.0;
  std::string first_failure;
  for (const auto& [name, sc] : scenes) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string why;
    try {
      const RunReport r = run_pipeline(sc);
      if (!r.goal_reached) ++short_of_goal;
      ok = r.certificate.passed() && r.all_displacements_feasible() &&
           (!r.certificate.min_clearance || *r.certificate.min_clearance >= 0.0);
      if (!ok) why = std::to_string(r.certificate.violations) + " violations";
    } catch (const std::exception& e) {
      why = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    slowest = std::max(slowest, secs);
    if (secs >= 60.0) {
      ok = false;
      why = "took " + fmt("%.1f", secs) + " s";
    }
    if (!ok) {
      ++failures;
      if (first_failure.empty()) first_failure = name + " (" + why + ")";
    }
  }
  return {failures == 0, std::to_string(scenes.size()) + " scenarios, " + std::to_string(failures) +
                             " failing, " + std::to_string(short_of_goal) + " short of goal, slowest " +
                             fmt("%.2f", slowest) + " s" +
                             (first_failure.empty() ? "" : ", first: " + first_failure)};
}

// 2 -----------------------------------------------------------------------

Outcome circle_closed_form() {
  std::mt19937_64 rng(2);
  double worst_mag = 0.0, worst_angle = 0.0;
  for (int i = 0; i < 1000;) {
    const Circle w({uniform(rng, -2, 2), uniform(rng, -2, 2)}, uniform(rng, 0.1, 1.5));
    const Circle o({w.center().x + uniform(rng, -1.5, 1.5), w.center().y + uniform(rng, -1.5, 1.5)},
                   uniform(rng, 0.1, 1.5));
    const double L = overlap_measure(w, o);
    if (L < 1e-3 || norm(o.center() - w.center()) < 1e-6) continue;
    ++i;
    const auto sol = displace_circle_circle(o, std::vector{w});
    const Point2 moved = std::get<Circle>(sol.new_shape).center() - o.center();
    const Point2 line = o.center() - w.center();
    worst_mag = std::max(worst_mag, std::abs(sol.centroid_shift - L));
    worst_angle = std::max(worst_angle, std::abs(std::atan2(cross(line, moved), dot(line, moved))));
  }
  return {worst_mag <= 1e-6 && worst_angle <= 1e-9,
          "max |shift - L| " + fmt("%.2e", worst_mag) + ", max angle " + fmt("%.2e", worst_angle) + " rad"};
}

// 3 -----------------------------------------------------------------------

std::vector<Shape> overlapping_witnesses(std::mt19937_64& rng, const ConvexPolygon& obstacle, int count,
                                         double scale) {
  std::vector<Shape> out;
  while (static_cast<int>(out.size()) < count) {
    const Point2 c = obstacle.vertex_mean() + Point2{uniform(rng, -0.6, 0.6), uniform(rng, -0.6, 0.6)} * scale;
    Shape s = uniform(rng, 0, 1) < 0.5
                  ? Shape(Circle(c, uniform(rng, 0.15, 0.4) * scale))
                  : Shape(cdplan::testing::random_convex_polygon(rng, 3 + static_cast<int>(out.size()) % 3, c,
                                                                  0.35 * scale));
    if (shapes_intersect(s, obstacle)) out.push_back(std::move(s));
  }
  return out;
}

DisplacementSolution solve_or_best(const DisplacementProblem& p, int* failures) {
  try {
    return displace(p);
  } catch (const DisplacementFailure& e) {
    ++*failures;
    return e.best();
  }
}

Outcome rigidity() {
  std::mt19937_64 rng(3);
  double worst_free = 0.0, worst_spread = 0.0, worst_drift = 0.0;
  int failures = 0, solved = 0;
  for (int i = 0; i < 300; ++i) {
    const ConvexPolygon obstacle = cdplan::testing::random_convex_polygon(rng, 3 + i % 5, {0, 0}, 0.6);
    const auto w = overlapping_witnesses(rng, obstacle, 1 + i % 3, 1.0);
    const MotionRestriction r = i < 200 ? MotionRestriction::Free
                                : i < 250 ? MotionRestriction::TranslateOnly
                                          : MotionRestriction::RotateOnly;
    const auto sol = solve_or_best({obstacle, w, r, {}}, &failures);
    ++solved;
    const auto& moved = std::get<ConvexPolygon>(sol.new_shape);
    for (std::size_t a = 0; a < obstacle.size(); ++a) {
      for (std::size_t b = a + 1; b < obstacle.size(); ++b) {
        const double d0 = norm(obstacle[a] - obstacle[b]);
        worst_free = std::max(worst_free, std::abs(norm(moved[a] - moved[b]) - d0) / d0);
      }
    }
    if (r == MotionRestriction::TranslateOnly) {
      const Point2 s0 = moved[0] - obstacle[0];
      for (std::size_t a = 1; a < obstacle.size(); ++a) {
        worst_spread = std::max(worst_spread, norm((moved[a] - obstacle[a]) - s0));
      }
    }
    if (r == MotionRestriction::RotateOnly) {
      worst_drift = std::max(worst_drift, norm(moved.vertex_mean() - obstacle.vertex_mean()));
    }
  }
  return {worst_free <= 1e-6 && worst_spread < 1e-6 && worst_drift < 1e-6,
          std::to_string(solved) + " problems (200 free, 50 translate, 50 rotate), " + std::to_string(failures) +
              " uncertified, max distance error " + fmt("%.2e", worst_free) + ", translate spread " +
              fmt("%.2e", worst_spread) + ", rotate drift " + fmt("%.2e", worst_drift)};
}

// 4 -----------------------------------------------------------------------

Outcome oracle_optimality() {
  std::mt19937_64 rng(4);
  int worse = 0, failures = 0;
  double worst_gap = -1e9;
  for (int i = 0; i < 50; ++i) {
    const ConvexPolygon obstacle = cdplan::testing::random_convex_polygon(rng, 3 + i % 3, {0, 0}, 0.4);
    const auto w = overlapping_witnesses(rng, obstacle, 1 + i % 3, 0.6);
    const auto sol = solve_or_best({obstacle, w, MotionRestriction::Free, {}}, &failures);
    const GridDisplacement grid = oracle_grid_displacement(obstacle, w);
    const double gap = sol.objective_value - grid.objective;
    worst_gap = std::max(worst_gap, gap);
    if (!sol.feasible || gap > 0.05) ++worse;
  }
  return {worse == 0 && failures == 0, "50 instances, " + std::to_string(worse) + " above oracle + 0.05, " +
                                           std::to_string(failures) + " uncertified, max (nlp - oracle) " +
                                           fmt("%.4f", worst_gap)};
}

// 5-7 ---------------------------------------------------------------------

std::map<std::string, SuiteRow> run_suite(const std::string& file) {
  std::map<std::string, SuiteRow> out;
  for (SuiteRow& r : run_experiment_suite(load_suite(kSource / "suites" / file))) out[r.cell] = std::move(r);
  return out;
}

bool healthy(const std::map<std::string, SuiteRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const auto& kv) {
    return kv.second.error.empty() && kv.second.certificate_passed && kv.second.all_feasible;
  });
}

Outcome mcd_trend(const std::map<std::string, SuiteRow>& t1) {
  const double m03 = t1.at("L21_mi03").total_displacement, m05 = t1.at("L21_mi05").total_displacement;
  const double m07 = t1.at("L21_mi07").total_displacement, shortest = t1.at("shortest").total_displacement;
  const bool ok = healthy(t1) && m07 <= 0.99 * m03 && shortest >= 1.01 * m07;
  return {ok, "shortest " + fmt("%.3f", shortest) + ", Mi 0.3 " + fmt("%.3f", m03) + ", Mi 0.5 " +
                  fmt("%.3f", m05) + ", Mi 0.7 " + fmt("%.3f", m07) + " m"};
}

Outcome mcr_trend(const std::map<std::string, SuiteRow>& t2) {
  const int lo = t2.at("mcr_mi05").displaced_count, hi = t2.at("mcr_mi07").displaced_count;
  const int shortest = t2.at("shortest").displaced_count;
  return {healthy(t2) && hi <= lo && lo <= shortest && hi <= shortest,
          "displaced: shortest " + std::to_string(shortest) + ", Mi 0.5 " + std::to_string(lo) + ", Mi 0.7 " +
              std::to_string(hi)};
}

Outcome horizon_trend(const std::map<std::string, SuiteRow>& t1) {
  const double l11 = t1.at("L11_mi07").total_displacement, l21 = t1.at("L21_mi07").total_displacement;
  return {healthy(t1) && l21 <= 1.05 * l11, "L=11 " + fmt("%.3f", l11) + " m, L=21 " + fmt("%.3f", l21) + " m"};
}

// 8 -----------------------------------------------------------------------

Outcome predicate_equivalence() {
  std::mt19937_64 rng(8);
  int seg_disagree = 0, seg_count = 0;
  while (seg_count < 100000) {
    const Point2 a{uniform(rng, -1, 1), uniform(rng, -1, 1)}, b{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const Point2 c{uniform(rng, -1, 1), uniform(rng, -1, 1)}, d{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    if (std::abs(cross(b - a, d - c)) <= 1e-9) continue;
    ++seg_count;
    const SegmentParams p = segment_params(Segment(a, b), Segment(c, d));
    const bool by_params = p.t >= 0 && p.t <= 1 && p.s >= 0 && p.s <= 1;
    if (by_params != cdplan::testing::oracle_segments_intersect(a, b, c, d) ||
        by_params != segments_intersect(Segment(a, b), Segment(c, d))) {
      ++seg_disagree;
    }
  }
  int poly_disagree = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = cdplan::testing::random_convex_polygon(rng, 3 + i % 6, {0, 0}, 1.0);
    const auto q = cdplan::testing::random_convex_polygon(rng, 3 + (i / 6) % 6,
                                                          {uniform(rng, -2, 2), uniform(rng, -2, 2)},
                                                          uniform(rng, 0.2, 1.5));
    if (polygons_intersect(p, q) != cdplan::testing::oracle_polygons_intersect(p.vertices(), q.vertices())) {
      ++poly_disagree;
    }
  }
  return {seg_disagree == 0 && poly_disagree == 0,
          std::to_string(seg_disagree) + "/100000 segment and " + std::to_string(poly_disagree) +
              "/10000 polygon disagreements"};
}

// 9 -----------------------------------------------------------------------

Vector vec(std::initializer_list<double> v) {
  Vector z(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) z[i++] = x;
  return z;
}

double worst_row_error(const std::vector<nlp::SmoothFunction>& rows, const Vector& z) {
  double worst = 0.0;
  for (const auto& r : rows) {
    const Vector a = r.gradient(z);
    const Vector f = nlp::gradient(r.value, z, 1e-6);
    worst = std::max(worst, cdplan::testing::relative_error(std::span(a.data(), a.size()),
                                                            std::span(f.data(), f.size())));
  }
  return worst;
}

Outcome nlp_suite() {
  nlp::NlpProblem p1;
  p1.dimension = 1;
  p1.objective.value = [](const Vector& z) { return (z[0] - 3) * (z[0] - 3); };
  p1.inequalities.push_back({[](const Vector& z) { return z[0] - 1; }, {}});
  p1.initial_point = vec({0});
  nlp::NlpProblem p2;
  p2.dimension = 2;
  p2.objective.value = [](const Vector& z) { return z.squaredNorm(); };
  p2.equalities.push_back({[](const Vector& z) { return z[0] + z[1] - 2; }, {}});
  p2.initial_point = vec({0, 0});
  nlp::NlpProblem p3;
  p3.dimension = 2;
  p3.objective.value = [](const Vector& z) { return -z[0] - z[1]; };
  p3.inequalities.push_back({[](const Vector& z) { return z.squaredNorm() - 1; }, {}});
  p3.initial_point = vec({0, 0});
  const double h = std::sqrt(0.5);
  const double e1 = (nlp::solve(p1).point - vec({1})).norm();
  const double e2 = (nlp::solve(p2).point - vec({1, 1})).norm();
  const double e3 = (nlp::solve(p3).point - vec({h, h})).norm();
  const double solve_err = std::max({e1, e2, e3});

  std::mt19937_64 rng(9);
  double seg_circle = 0.0, seg_seg = 0.0, rigid = 0.0, clearance = 0.0, horizon = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ConvexPolygon shape = cdplan::testing::random_convex_polygon(rng, 3 + i % 4, {0, 0}, 1.0);
    Vector z(2 * shape.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = decision_vector(Shape(shape))[k] + uniform(rng, -0.3, 0.3);
    const Circle c({uniform(rng, -1, 1), uniform(rng, -1, 1)}, uniform(rng, 0.2, 1));
    seg_circle = std::max(seg_circle, worst_row_error(build_segment_circle_constraints(
                                                          static_cast<int>(shape.size()), c, 1e-4), z));
    // witness edge kept away from the 1/t and 1/s poles
    for (;;) {
      const Segment edge({uniform(rng, -3, 3), uniform(rng, -3, 3)}, {uniform(rng, -3, 3), uniform(rng, -3, 3)});
      const auto rows = build_segment_segment_constraints(static_cast<int>(shape.size()), edge, 1e-8);
      bool well_posed = true;
      for (std::size_t e = 0; e < shape.size(); ++e) {
        const Point2 p1{z[2 * e], z[2 * e + 1]};
        const Point2 p2{z[2 * ((e + 1) % shape.size())], z[2 * ((e + 1) % shape.size()) + 1]};
        const auto t = segment_param_terms(p1, p2, edge.a(), edge.b());
        well_posed = well_posed && std::abs(t.denominator) > 0.1 && std::abs(t.t_numerator) > 0.1 &&
                     std::abs(t.s_numerator) > 0.1;
      }
      if (!well_posed) continue;
      seg_seg = std::max(seg_seg, worst_row_error(rows, z));
      break;
    }
    for (MotionRestriction r : {MotionRestriction::Free, MotionRestriction::RotateOnly,
                                MotionRestriction::TranslateOnly}) {
      rigid = std::max(rigid, worst_row_error(build_rigidity_constraints(shape, r), z));
    }
    const std::vector<Shape> witnesses{
        c, cdplan::testing::random_convex_polygon(rng, 4, {uniform(rng, -1, 1), uniform(rng, -1, 1)}, 0.5)};
    clearance = std::max(clearance, worst_row_error(build_clearance_constraints(Shape(shape), witnesses, 1e-4), z));
    const Circle disc({0, 0}, 0.4);
    clearance = std::max(clearance, worst_row_error(build_clearance_constraints(Shape(disc), witnesses, 1e-4),
                                                    vec({uniform(rng, -1, 1), uniform(rng, -1, 1)})));
  }

  RobotBody body;
  body.cover.circles = {Circle({0.2, 0}, 0.3), Circle({-0.2, 0}, 0.3)};
  std::vector<Obstacle> obstacles;
  for (int k = 0; k < 4; ++k) {
    const Circle c({uniform(rng, -3.5, -0.5), uniform(rng, -0.8, 0.8)}, uniform(rng, 0.2, 0.5));
    obstacles.push_back({k + 1, k != 3, c, CircleCover{{c}}});
  }
  for (OverlapCostKind kind : {OverlapCostKind::MCD, OverlapCostKind::MCR}) {
    for (ModelKind model : {ModelKind::PlanarVelocity, ModelKind::DownCrossTurn}) {
      PlanningProblem problem{DynamicsModel(model, 0.1, {-2, -2, -2}, {2, 2, 2}), body, {-4, 0, 0}, {0, 0, 0},
                              obstacles, Bounds{-5, 1, -1, 1}};
      PlannerConfig config;
      config.horizon = 8;
      config.mode.kind = kind;
      config.weights = {0.3, 0.7, 0.1, 10.0};
      const CostModel cost(problem, config);
      const auto eta = cost.initial_eta();
      for (int trial = 0; trial < 25; ++trial) {
        Vector u(24);
        for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = uniform(rng, -0.5, 0.5);
        std::vector<double> g(24);
        cost.horizon_cost(problem.start, std::span(u.data(), 24), eta, g);
        const Vector fd = nlp::gradient(
            [&](const Vector& v) { return cost.horizon_cost(problem.start, std::span(v.data(), 24), eta); }, u,
            1e-6);
        horizon = std::max(horizon, cdplan::testing::relative_error(g, std::span(fd.data(), 24)));
      }
    }
  }
  const bool ok = solve_err <= 1e-4 && std::max({seg_circle, seg_seg, rigid, clearance, horizon}) <= 1e-4;
  return {ok, "solve error " + fmt("%.1e", solve_err) + "; gradient rel. error: segment-circle " +
                  fmt("%.1e", seg_circle) + ", segment-segment " + fmt("%.1e", seg_seg) + ", rigidity " +
                  fmt("%.1e", rigid) + ", clearance " + fmt("%.1e", clearance) + ", horizon cost " + fmt("%.1e", horizon)};
}

// 10 ----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
#ifdef CDPLAN_CLI
  const fs::path work = fs::temp_directory_path() / "cdplan_acceptance_determinism";
  fs::remove_all(work);
  fs::create_directories(work);
  {
    std::ofstream(work / "suite.json")
        << "{\"name\": \"det\", \"cells\": [{\"name\": \"a\", \"scenario\": \""
        << (kSource / "scenarios" / "roomba_room.json").string()
        << "\"}, {\"name\": \"b\", \"scenario\": \"" << (kSource / "scenarios" / "two_rooms.json").string()
        << "\", \"mode\": \"mcd\", \"horizon\": 8}]}";
  }
  const std::string cli = CDPLAN_CLI;
  const auto run = [&](const std::string& args) {
    return std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
  };
  std::vector<std::string> compared;
  int mismatches = 0;
  for (const std::string scene : {"roomba_room", "abcd_circular", "two_rooms_weighted"}) {
    const fs::path s = kSource / "scenarios" / (scene + ".json");
    for (int k = 0; k < 2; ++k) {
      const fs::path d = work / (scene + std::to_string(k));
      run("plan --scenario " + s.string() + " --out " + d.string());
      run("resolve --scenario " + s.string() + " --trajectory " + (d / "trajectory.json").string() + " --out " +
          (d / "resolved").string());
      run("render --report " + (d / "report.json").string() + " --svg " + (d / "scene.svg").string());
    }
    for (const std::string f : {"report.json", "trajectory.json", "scene.svg", "resolved/report.json"}) {
      const std::string a = slurp(work / (scene + "0") / f), b = slurp(work / (scene + "1") / f);
      if (a.empty() || a != b) ++mismatches;
      compared.push_back(scene + "/" + f);
    }
  }
  for (int k = 0; k < 2; ++k) run("bench --suite " + (work / "suite.json").string() + " --out " +
                                  (work / ("bench" + std::to_string(k))).string());
  for (const std::string f : {"results.csv", "results.json", "a/report.json", "b/report.json"}) {
    const std::string a = slurp(work / "bench0" / f), b = slurp(work / "bench1" / f);
    if (a.empty() || a != b) ++mismatches;
    compared.push_back("bench/" + f);
  }
  return {mismatches == 0, std::to_string(compared.size()) + " artifacts compared, " + std::to_string(mismatches) +
                               " differ or missing"};
#else
  return {false, "command line tool not built"};
#endif
}

}  // namespace

int main() {
  std::map<std::string, SuiteRow> t1, t2;
  std::string suite_error;
  try {
    t1 = run_suite("table1.json");
    t2 = run_suite("table2.json");
  } catch (const std::exception& e) {
    suite_error = e.what();
  }
  const auto guarded = [&](std::function<Outcome()> f) -> Outcome {
    try {
      return f();
    } catch (const std::exception& e) {
      return {false, std::string("exception: ") + e.what()};
    }
  };
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"zero-overlap certificate", zero_overlap},
      {"circle-circle closed form", circle_closed_form},
      {"rigidity", rigidity},
      {"local optimality vs grid oracle", oracle_optimality},
      {"MCD weight trend", [&] { return mcd_trend(t1); }},
      {"MCR count trend", [&] { return mcr_trend(t2); }},
      {"horizon trend", [&] { return horizon_trend(t1); }},
      {"predicate equivalence", predicate_equivalence},
      {"NLP suite and gradients", nlp_suite},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = guarded(criteria[i].second);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << "criterion " << (i + 1) << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
              << o.detail << " [" << fmt("%.1f", secs) << " s]" << std::endl;
  }
  if (!suite_error.empty()) std::cout << "suite error: " << suite_error << "\n";
  return failed == 0 ? 0 : 1;
}
