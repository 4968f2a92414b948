#include "steerbench/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "steerbench/errors.hpp"

namespace steerbench {
namespace {

constexpr double kPi = 3.14159265358979323846;

ScenarioConfig basic_config(double length_m = 200.0) {
  ScenarioConfig cfg;
  cfg.name = "unit";
  cfg.route = {Point2{0.0, 0.0}, Point2{length_m, 0.0}};
  cfg.lanes_left = 1;
  cfg.lanes_right = 1;
  cfg.ego.s = 0.0;
  cfg.ego.lane = 0;
  cfg.ego.speed_mps = 6.0;
  cfg.max_steps = 2000;
  return cfg;
}

TEST(Bicycle, SpeedUpdatesBeforePosition) {
  VehicleState s;
  Controls c;
  c.throttle = 1.0;
  step_vehicle(s, c, 0.05);
  // One tick: speed rises to 3*0.05, position advances with the new speed.
  EXPECT_NEAR(s.speed_mps, 0.15, 1e-12);
  EXPECT_NEAR(s.x, 0.15 * 0.05, 1e-12);
}

TEST(Bicycle, PositiveSteerMovesRight) {
  VehicleState s;
  s.speed_mps = 5.0;
  Controls c;
  c.steer = 1.0;
  step_vehicle(s, c, 0.05);
  EXPECT_GT(s.heading_deg, 0.0);
  EXPECT_LT(s.y, 0.0);  // course increasing means drifting right (-y)
}

TEST(Bicycle, SpeedNeverNegative) {
  VehicleState s;
  s.speed_mps = 0.2;
  Controls c;
  c.brake = 1.0;
  step_vehicle(s, c, 0.05);
  step_vehicle(s, c, 0.05);
  EXPECT_DOUBLE_EQ(s.speed_mps, 0.0);
}

// Constant steer at drag-balanced throttle traces a circle of radius
// wheelbase / tan(steer * max_steer). The 2 s chord must match the
// closed-form circle chord within 1%.
TEST(Bicycle, ConstantSteerCircleOracle) {
  BicycleParams params;
  const double v = 6.0;
  const double steer = 0.5;
  const double dt = 0.05;
  VehicleState s;
  s.speed_mps = v;
  Controls c;
  c.throttle = params.drag_per_s * v / params.throttle_gain_mps2;
  c.steer = steer;
  for (int i = 0; i < 40; ++i) {
    step_vehicle(s, c, dt, params);
  }
  EXPECT_NEAR(s.speed_mps, v, 1e-9);
  double steer_rad = steer * params.max_steer_deg * kPi / 180.0;
  double radius = params.wheelbase_m / std::tan(steer_rad);
  double theta = v / radius * 2.0;  // radians turned in 2 s
  double chord = 2.0 * radius * std::sin(theta / 2.0);
  double traversed = std::hypot(s.x, s.y);
  EXPECT_NEAR(traversed, chord, 0.01 * chord);
  EXPECT_NEAR(s.heading_deg, theta * 180.0 / kPi, 1e-6);
}

TEST(Ledger, DebouncesPerKindAndAgent) {
  InfractionLedger ledger(2.0);
  EXPECT_TRUE(ledger.record(InfractionKind::collision_vehicle, "a", 0.0));
  EXPECT_FALSE(ledger.record(InfractionKind::collision_vehicle, "a", 1.9));
  EXPECT_TRUE(ledger.record(InfractionKind::collision_vehicle, "b", 1.9));
  EXPECT_TRUE(ledger.record(InfractionKind::route_deviation, "", 1.9));
  EXPECT_TRUE(ledger.record(InfractionKind::collision_vehicle, "a", 4.0));
  EXPECT_EQ(ledger.count(InfractionKind::collision_vehicle), 3u);
  EXPECT_EQ(ledger.count(InfractionKind::route_deviation), 1u);
}

TEST(Ledger, DebounceProperty) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> jump(0.0, 3.0);
  InfractionLedger ledger(2.0);
  double t = 0.0;
  double last_recorded = -1e9;
  for (int i = 0; i < 500; ++i) {
    t += jump(rng);
    bool expect = t - last_recorded >= 2.0;
    EXPECT_EQ(ledger.record(InfractionKind::red_light, "", t), expect) << t;
    if (expect) last_recorded = t;
  }
}

TEST(ScenarioJson, MinimalDocumentParses) {
  ScenarioConfig cfg = parse_scenario_json(R"({
    "schema": "steerbench.scenario/1",
    "name": "minimal",
    "route": {"length_m": 100}
  })");
  EXPECT_EQ(cfg.name, "minimal");
  ASSERT_EQ(cfg.route.size(), 2u);
  EXPECT_NEAR(cfg.route[1].x, 100.0, 1e-12);
  EXPECT_DOUBLE_EQ(cfg.speed_limit_mps, 8.0);
}

TEST(ScenarioJson, RejectsBadDocuments) {
  EXPECT_THROW(parse_scenario_json("{not json"), ConfigError);
  EXPECT_THROW(parse_scenario_json(R"({"name":"x"})"), ConfigError);
  EXPECT_THROW(parse_scenario_json(R"({
    "schema": "steerbench.scenario/1", "name": "x",
    "route": {"length_m": -5}
  })"),
               ConfigError);
  EXPECT_THROW(parse_scenario_json(R"({
    "schema": "steerbench.scenario/1", "name": "x",
    "route": {"length_m": 100},
    "agents": [{"id": "a", "category": "dragon", "path": [[0,0]]}]
  })"),
               ConfigError);
  EXPECT_THROW(parse_scenario_json(R"({
    "schema": "steerbench.scenario/1", "name": "x",
    "route": {"length_m": 100},
    "ego": {"lane": 2}
  })"),
               ConfigError);
}

TEST(World, SameSeedSameTrace) {
  ScenarioConfig cfg = basic_config();
  ScenarioWorld a = make_world(cfg, 42);
  ScenarioWorld b = make_world(cfg, 42);
  Controls c;
  c.throttle = 0.4;
  c.steer = 0.05;
  for (int i = 0; i < 100; ++i) {
    step(a, c, 0.05);
    step(b, c, 0.05);
  }
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].x, b.trace[i].x);
    EXPECT_EQ(a.trace[i].y, b.trace[i].y);
    EXPECT_EQ(a.trace[i].speed_mps, b.trace[i].speed_mps);
  }
}

TEST(World, DistinctSeedsPerturbSpawn) {
  ScenarioConfig cfg = basic_config();
  ScenarioWorld a = make_world(cfg, 1);
  ScenarioWorld b = make_world(cfg, 2);
  EXPECT_NE(a.ego.speed_mps, b.ego.speed_mps);
}

TEST(World, CompletionIsMaxSoFar) {
  ScenarioConfig cfg = basic_config(100.0);
  cfg.ego.speed_mps = 8.0;
  ScenarioWorld w = make_world(cfg, 0);
  Controls coast;
  for (int i = 0; i < 40; ++i) step(w, coast, 0.05);
  double peak = w.completion;
  Controls brake;
  brake.brake = 1.0;
  for (int i = 0; i < 100; ++i) step(w, brake, 0.05);
  EXPECT_GE(w.completion, peak);
}

TEST(Observe, FovGatesVisibility) {
  ScenarioConfig cfg = basic_config();
  auto prop = [](const std::string& id, double x, double y) {
    AgentScript s;
    s.id = id;
    s.category = AgentCategory::car;
    s.path = {Point2{x, y}};
    return s;
  };
  cfg.agents.push_back(prop("near", 20.0, 0.0));
  cfg.agents.push_back(prop("far", 40.0, 0.0));
  cfg.agents.push_back(prop("too_far", 120.0, 0.0));
  cfg.agents.push_back(prop("behind", -10.0, 0.0));
  ScenarioWorld w = make_world(cfg, 0);
  Observation obs = observe(w);
  ASSERT_EQ(obs.agents.size(), 2u);
  EXPECT_EQ(obs.agents[0].id, "near");  // ordered nearest first
  EXPECT_EQ(obs.agents[1].id, "far");
}

TEST(Observe, RelativeLaneFollowsOffset) {
  ScenarioConfig cfg = basic_config();
  AgentScript left;
  left.id = "left";
  left.category = AgentCategory::car;
  left.path = {Point2{20.0, 3.5}};  // one lane to the left of the route
  cfg.agents.push_back(left);
  ScenarioWorld w = make_world(cfg, 0);
  Observation obs = observe(w);
  ASSERT_EQ(obs.agents.size(), 1u);
  EXPECT_EQ(obs.agents[0].relative_lane, -1);
}

TEST(Observe, TriggeredAgentAbsentUntilFired) {
  ScenarioConfig cfg = basic_config();
  AgentScript timed;
  timed.id = "timed";
  timed.category = AgentCategory::pedestrian;
  timed.path = {Point2{20.0, 0.0}};
  timed.trigger.kind = TriggerKind::time;
  timed.trigger.time_s = 1.0;
  cfg.agents.push_back(timed);
  ScenarioWorld w = make_world(cfg, 0);
  EXPECT_TRUE(observe(w).agents.empty());
  Controls coast;
  for (int i = 0; i < 30; ++i) step(w, coast, 0.05);  // 1.5 s
  EXPECT_EQ(observe(w).agents.size(), 1u);
}

TEST(LaneCenterline, OffsetsRight) {
  std::vector<Point2> route{{0, 0}, {100, 0}};
  std::vector<Point2> lane = lane_centerline(route, 1, 3.5);
  EXPECT_NEAR(lane.front().y, -3.5, 1e-9);  // right of +x travel is -y
  std::vector<Point2> left = lane_centerline(route, -1, 3.5);
  EXPECT_NEAR(left.front().y, 3.5, 1e-9);
}

TEST(Detectors, RedLightCrossing) {
  ScenarioConfig cfg = basic_config(100.0);
  cfg.ego.s = 20.0;
  cfg.ego.speed_mps = 8.0;
  cfg.traffic_light = TrafficLightSpec{30.0, 1000.0};
  ScenarioWorld w = make_world(cfg, 0);
  Controls hold;
  hold.throttle = 0.2;
  for (int i = 0; i < 100; ++i) step(w, hold, 0.05);
  EXPECT_EQ(w.ledger.count(InfractionKind::red_light), 1u);
}

TEST(Detectors, GreenLightAfterRedWindow) {
  ScenarioConfig cfg = basic_config(100.0);
  cfg.ego.s = 20.0;
  cfg.ego.speed_mps = 8.0;
  cfg.traffic_light = TrafficLightSpec{30.0, 0.5};  // green by arrival
  ScenarioWorld w = make_world(cfg, 0);
  Controls hold;
  hold.throttle = 0.2;
  for (int i = 0; i < 100; ++i) step(w, hold, 0.05);
  EXPECT_EQ(w.ledger.count(InfractionKind::red_light), 0u);
}

TEST(Detectors, StopSignRequiresAFullStop) {
  ScenarioConfig cfg = basic_config(100.0);
  cfg.ego.s = 20.0;
  cfg.ego.speed_mps = 8.0;
  cfg.stop_sign_s = 30.0;
  ScenarioWorld rolled = make_world(cfg, 0);
  Controls hold;
  hold.throttle = 0.2;
  for (int i = 0; i < 100; ++i) step(rolled, hold, 0.05);
  EXPECT_EQ(rolled.ledger.count(InfractionKind::stop_sign), 1u);

  ScenarioWorld stopped = make_world(cfg, 0);
  Controls brake;
  brake.brake = 1.0;
  for (int i = 0; i < 80; ++i) step(stopped, brake, 0.05);  // halts in the zone
  ASSERT_LT(stopped.ego.speed_mps, 0.5);
  for (int i = 0; i < 200; ++i) step(stopped, hold, 0.05);
  EXPECT_EQ(stopped.ledger.count(InfractionKind::stop_sign), 0u);
}

TEST(Detectors, RouteDeviation) {
  ScenarioConfig cfg = basic_config();
  cfg.ego.speed_mps = 8.0;
  ScenarioWorld w = make_world(cfg, 0);
  Controls veer;
  veer.throttle = 0.3;
  veer.steer = 0.5;
  for (int i = 0; i < 200 && w.ledger.empty(); ++i) step(w, veer, 0.05);
  EXPECT_EQ(w.ledger.count(InfractionKind::route_deviation), 1u);
}

TEST(Collision, TerminalAndTyped) {
  ScenarioConfig cfg = basic_config(100.0);
  cfg.ego.speed_mps = 8.0;
  AgentScript wall;
  wall.id = "wall";
  wall.category = AgentCategory::static_obstacle;
  wall.path = {Point2{15.0, 0.0}};
  cfg.agents.push_back(wall);
  ScenarioWorld w = make_world(cfg, 0);
  Controls hold;
  hold.throttle = 0.2;
  for (int i = 0; i < 100 && !w.collided; ++i) step(w, hold, 0.05);
  EXPECT_TRUE(w.collided);
  EXPECT_EQ(w.ledger.count(InfractionKind::collision_static), 1u);
  EXPECT_EQ(w.ledger.events()[0].agent_id, "wall");
}

TEST(TractionZones, BiasYawsTheVehicle) {
  ScenarioConfig cfg = basic_config();
  cfg.ego.speed_mps = 8.0;
  cfg.traction_zones.push_back(TractionZone{5.0, 50.0, 10.0});
  ScenarioWorld w = make_world(cfg, 0);
  Controls coast;
  for (int i = 0; i < 40; ++i) step(w, coast, 0.05);
  EXPECT_GT(w.ego.heading_deg, 1.0);  // pulled right with zero steer
}

class ThrowingPolicy : public PolicyStack {
 public:
  DecisionRecord decide(const Observation&) override {
    throw InvalidArgumentError("deliberate failure");
  }
  Controls act(const Observation&, const MetaAction&) override {
    return Controls{};
  }
};

TEST(RunEpisode, PolicyExceptionAborts) {
  ScenarioConfig cfg = basic_config();
  ScenarioWorld w = make_world(cfg, 0);
  ThrowingPolicy policy;
  EpisodeResult result = run_episode(w, policy);
  EXPECT_TRUE(result.aborted);
  EXPECT_NE(result.abort_reason.find("deliberate failure"), std::string::npos);
  EXPECT_FALSE(result.success);
}

TEST(RunEpisode, SummaryJsonCarriesSchema) {
  ScenarioConfig cfg = basic_config(50.0);
  ScenarioWorld w = make_world(cfg, 0);
  ThrowingPolicy policy;
  EpisodeResult result = run_episode(w, policy);
  std::string json = episode_summary_json(result);
  EXPECT_NE(json.find("steerbench.episode/1"), std::string::npos);
  EXPECT_EQ(json, episode_summary_json(result));  // deterministic
}

}  // namespace
}  // namespace steerbench
