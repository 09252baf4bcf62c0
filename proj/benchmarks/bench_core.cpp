#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cdplan/displacement.hpp"
#include "cdplan/geometry.hpp"
#include "cdplan/nlp.hpp"
#include "cdplan/overlap_planner.hpp"

using namespace cdplan;

namespace {

ConvexPolygon ngon(int n, Point2 c, double r, double phase) {
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) {
    const double a = phase + 2.0 * std::numbers::pi * i / n;
    pts.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return ConvexPolygon(pts);
}

void BM_PolygonsIntersect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConvexPolygon p = ngon(n, {0, 0}, 1.0, 0.0);
  const ConvexPolygon q = ngon(n, {1.9, 0.2}, 1.0, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(polygons_intersect(p, q));
}
BENCHMARK(BM_PolygonsIntersect)->Arg(4)->Arg(8)->Arg(16);

void BM_SegmentsIntersect(benchmark::State& state) {
  const Segment a({0, 0}, {2, 1}), b({1, -1}, {1.2, 2});
  for (auto _ : state) benchmark::DoNotOptimize(segments_intersect(a, b));
}
BENCHMARK(BM_SegmentsIntersect);

void BM_SignedSeparation(benchmark::State& state) {
  const Shape p = ngon(6, {0, 0}, 1.0, 0.0), q = ngon(6, {2.5, 0.3}, 1.0, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(signed_separation(p, q));
}
BENCHMARK(BM_SignedSeparation);

void BM_MinEnclosingCircle(benchmark::State& state) {
  const ConvexPolygon p = ngon(static_cast<int>(state.range(0)), {0, 0}, 1.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(min_enclosing_circle(p));
}
BENCHMARK(BM_MinEnclosingCircle)->Arg(8)->Arg(64);

void BM_NlpDisk(benchmark::State& state) {
  nlp::NlpProblem p;
  p.dimension = 2;
  p.objective = {[](const nlp::Vector& z) { return -z[0] - z[1]; }, {}};
  p.inequalities.push_back({[](const nlp::Vector& z) { return z.squaredNorm() - 1; }, {}});
  p.initial_point = nlp::Vector::Zero(2);
  for (auto _ : state) benchmark::DoNotOptimize(nlp::solve(p));
}
BENCHMARK(BM_NlpDisk);

void BM_DisplaceSquare(benchmark::State& state) {
  const ConvexPolygon sq({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}});
  const DisplacementProblem problem{sq, {Circle({0.2, 0.1}, 0.6)}, MotionRestriction::Free, {}};
  for (auto _ : state) benchmark::DoNotOptimize(displace(problem));
}
BENCHMARK(BM_DisplaceSquare)->Unit(benchmark::kMillisecond);

void BM_PlanHorizon(benchmark::State& state) {
  RobotBody body;
  body.cover.circles.push_back(Circle({0, 0}, 0.3));
  std::vector<Obstacle> obstacles;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(-4.0, -0.5), uy(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Circle c({ux(rng), uy(rng)}, 0.3);
    obstacles.push_back({i + 1, true, c, CircleCover{{c}}});
  }
  const PlanningProblem problem{DynamicsModel(ModelKind::PlanarVelocity, 0.1, {-2, -2, -2}, {2, 2, 2}), body,
                                {-5, 0, 0}, {0, 0, 0}, obstacles, std::nullopt};
  PlannerConfig config;
  config.horizon = static_cast<int>(state.range(0));
  const CostModel cost(problem, config);
  const auto eta = cost.initial_eta();
  for (auto _ : state) benchmark::DoNotOptimize(plan_horizon(cost, problem, problem.start, config, eta));
}
BENCHMARK(BM_PlanHorizon)->Arg(10)->Arg(21)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
