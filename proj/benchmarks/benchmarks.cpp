// Microbenchmarks for the hot paths: the action language, the per-tick
// simulation and decision work, chunking, projection, and scoring.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "steerbench/controller.hpp"
#include "steerbench/geometry.hpp"
#include "steerbench/high_level.hpp"
#include "steerbench/labeler.hpp"
#include "steerbench/meta_action.hpp"
#include "steerbench/metrics.hpp"
#include "steerbench/sim.hpp"
#include "steerbench/trajectory.hpp"

namespace steerbench {
namespace {

TrajectoryLog synthetic_log(double duration_s) {
  TrajectoryLog log;
  log.rate_hz = 20.0;
  const double dt = 0.05;
  const int n = static_cast<int>(duration_s / dt) + 1;
  double x = 0.0;
  double y = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = i * dt;
    EgoState s;
    s.t = t;
    s.x = x;
    s.y = y;
    s.heading_deg = 12.0 * std::sin(0.4 * t);
    s.speed_mps = 6.0 + 2.0 * std::sin(0.25 * t);
    log.states.push_back(s);
    Point2 dir = heading_direction(s.heading_deg);
    x += s.speed_mps * dir.x * dt;
    y += s.speed_mps * dir.y * dt;
  }
  return log;
}

ScenarioConfig accident_scenario() {
  return load_scenario(std::string(STEERBENCH_REPO_ROOT) +
                       "/data/scenarios/traffic_accident.json");
}

void BM_ParseMetaAction(benchmark::State& state) {
  const std::string text =
      "The vehicle decelerates rapidly and cautiously makes a slight right "
      "adjustment before stopping for a sign.";
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_meta_action(text));
  }
}
BENCHMARK(BM_ParseMetaAction);

void BM_RenderMetaAction(benchmark::State& state) {
  MetaAction m;
  m.speed = SpeedBehavior::decelerate;
  m.speed_intensity = SpeedIntensity::rapid;
  m.heading = HeadingBehavior::adjust_right;
  m.heading_extent = HeadingExtent::slight;
  m.style = DrivingStyle::cautiously;
  m.referent = "a sign";
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_meta_action(m));
  }
}
BENCHMARK(BM_RenderMetaAction);

void BM_SimStep(benchmark::State& state) {
  ScenarioConfig config = accident_scenario();
  ScenarioWorld world = make_world(config, 0);
  Controls controls;
  controls.throttle = 0.3;
  for (auto _ : state) {
    step(world, controls, 0.05);
    if (world.collided || world.finished) {
      state.PauseTiming();
      world = make_world(config, 0);
      state.ResumeTiming();
    }
  }
}
BENCHMARK(BM_SimStep);

void BM_RuleDecision(benchmark::State& state) {
  ScenarioConfig config = accident_scenario();
  ScenarioWorld world = make_world(config, 0);
  Controls coast;
  for (int i = 0; i < 40; ++i) step(world, coast, 0.05);
  Observation obs = observe(world);
  for (auto _ : state) {
    benchmark::DoNotOptimize(decide_rule_based(obs));
  }
}
BENCHMARK(BM_RuleDecision);

void BM_PlanAndTrack(benchmark::State& state) {
  VehicleState ego;
  ego.speed_mps = 6.0;
  MetaAction meta;
  meta.speed = SpeedBehavior::decelerate;
  RoadContext road;
  for (int i = 0; i <= 60; ++i) {
    road.centerline.push_back(Point2{static_cast<double>(i * 5), 0.0});
  }
  ControllerParams params;
  PidState lon, lat;
  for (auto _ : state) {
    ActionChunk chunk = plan_waypoints(ego, meta, road, params);
    benchmark::DoNotOptimize(
        track_waypoints(chunk, ego, lon, lat, 0.05, params));
  }
}
BENCHMARK(BM_PlanAndTrack);

void BM_ChunkTrajectory(benchmark::State& state) {
  TrajectoryLog log = synthetic_log(30.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chunk_trajectory(log));
  }
}
BENCHMARK(BM_ChunkTrajectory);

void BM_ProjectPoints(benchmark::State& state) {
  CameraModel camera;
  Eigen::Matrix3d r;
  r << 0, -1, 0,
       0, 0, -1,
       1, 0, 0;
  camera.rotation = r;
  camera.translation = Eigen::Vector3d(0.0, 1.5, 5.0);
  std::vector<Eigen::Vector3d> points;
  for (int i = 0; i < 200; ++i) {
    points.emplace_back(i * 0.5, std::sin(i * 0.1), 0.0);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_points(camera, points));
  }
}
BENCHMARK(BM_ProjectPoints);

void BM_DrivingScore(benchmark::State& state) {
  std::vector<InfractionEvent> events(4);
  events[0].kind = InfractionKind::collision_vehicle;
  events[1].kind = InfractionKind::red_light;
  events[2].kind = InfractionKind::stop_sign;
  events[3].kind = InfractionKind::route_deviation;
  for (auto _ : state) {
    benchmark::DoNotOptimize(driving_score(0.8, events));
  }
}
BENCHMARK(BM_DrivingScore);

}  // namespace
}  // namespace steerbench

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
