#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "steerbench/controller.hpp"
#include "steerbench/meta_action.hpp"
#include "steerbench/trajectory.hpp"

namespace steerbench {

// Kinematic bicycle with throttle/brake forces and linear drag. Speed is
// updated first, then heading, then position, so one step moves the vehicle
// with its post-update speed along its post-update heading.
struct BicycleParams {
  double throttle_gain_mps2 = 3.0;
  double brake_gain_mps2 = 6.0;
  double drag_per_s = 0.05;
  double wheelbase_m = 2.8;
  double max_steer_deg = 35.0;
};

void step_vehicle(VehicleState& state, const Controls& controls, double dt,
                  const BicycleParams& params = BicycleParams{});

enum class InfractionKind {
  collision_pedestrian,
  collision_vehicle,
  collision_static,
  red_light,
  stop_sign,
  route_deviation,
};

std::string to_string(InfractionKind kind);
InfractionKind infraction_kind_from_string(const std::string& s);

struct InfractionEvent {
  InfractionKind kind = InfractionKind::route_deviation;
  std::string agent_id;  // empty for non-agent infractions
  double t = 0.0;
};

// Records infractions with a per-(kind, agent) debounce so one continuous
// contact or excursion is not double counted.
class InfractionLedger {
 public:
  explicit InfractionLedger(double debounce_s = 2.0);

  // Returns true when the event was recorded, false when debounced.
  bool record(InfractionKind kind, const std::string& agent_id, double t);

  const std::vector<InfractionEvent>& events() const { return events_; }
  std::size_t count(InfractionKind kind) const;
  bool empty() const { return events_.empty(); }

 private:
  double debounce_s_;
  std::vector<InfractionEvent> events_;
  std::map<std::pair<int, std::string>, double> last_;
};

struct SpeedPhase {
  double t_start = 0.0;
  double speed_mps = 0.0;
};

enum class TriggerKind { none, time, proximity };

struct AgentTrigger {
  TriggerKind kind = TriggerKind::none;
  double time_s = 0.0;      // kind == time
  double distance_m = 0.0;  // kind == proximity: ego within this range
};

// One scripted agent: a polyline it follows and a piecewise speed plan.
// Until its trigger fires the agent does not exist in the world (it is
// neither visible nor collidable). A single-point path means a fixed prop.
struct AgentScript {
  std::string id;
  AgentCategory category = AgentCategory::car;
  std::optional<std::string> color;
  std::vector<Point2> path;
  double heading_deg = 0.0;  // used when the path cannot define one
  std::vector<SpeedPhase> phases;
  AgentTrigger trigger;           // none: present from the start
  double accel_mps2 = 4.0;        // rate of approach to phase targets
  double collision_radius_m = 0;  // 0: derive from category
};

struct TractionZone {
  double s_begin = 0.0;
  double s_end = 0.0;
  double yaw_bias_deg_s = 0.0;  // positive pulls the vehicle right
};

struct TrafficLightSpec {
  double stop_line_s = 0.0;
  double red_until_s = 0.0;
};

struct EgoSpawn {
  double s = 0.0;
  int lane = 0;  // lane ids grow to the right of the route
  double speed_mps = 0.0;
};

struct ScenarioConfig {
  std::string name;
  std::string description;
  std::vector<Point2> route;  // route-lane centerline (lane 0)
  double lane_width_m = 3.5;
  int lanes_left = 0;
  int lanes_right = 0;
  double speed_limit_mps = 8.0;
  double rate_hz = 20.0;
  int max_steps = 4000;
  EgoSpawn ego;
  RoutingKind routing = RoutingKind::follow_road;
  std::vector<AgentScript> agents;
  std::vector<TractionZone> traction_zones;
  std::optional<TrafficLightSpec> traffic_light;
  std::optional<double> stop_sign_s;
};

// Parses and validates a scenario JSON file. Unknown agent categories,
// malformed triggers, or a degenerate route throw ConfigError.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario_json(const std::string& text,
                                   const std::string& origin = "<memory>");

struct AgentRuntime {
  std::size_t script_index = 0;  // index into ScenarioConfig::agents
  bool active = false;
  double activation_t = 0.0;  // world time the trigger fired
  double speed_scale = 1.0;   // per-seed jitter on phase speeds
  double path_s = 0.0;
  double speed_mps = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading_deg = 0.0;
};

struct ScenarioWorld {
  ScenarioConfig config;
  std::uint64_t seed = 0;
  double t = 0.0;
  int steps = 0;
  VehicleState ego;
  std::vector<AgentRuntime> agents;
  InfractionLedger ledger;
  double completion = 0.0;  // max-so-far route progress in [0, 1]
  bool collided = false;
  bool finished = false;  // reached the route end
  BicycleParams bicycle;
  // Field of view for observations.
  double fov_half_angle_deg = 60.0;
  double fov_range_m = 60.0;
  double route_deviation_m = 8.0;
  // Internal detectors.
  Polyline route_line;
  double route_s = 0.0;            // current (not max) projection
  bool stop_sign_satisfied = false;
  std::vector<EgoState> trace;     // ego states at each tick, t=0 first
};

// Builds the initial world. The seed perturbs the ego spawn speed and agent
// phase speeds slightly so distinct seeds give distinct yet reproducible runs.
ScenarioWorld make_world(const ScenarioConfig& config, std::uint64_t seed);

// Advances the world one tick: traction bias, ego dynamics, scripted agents,
// then collision/infraction/completion bookkeeping. Collisions are terminal.
void step(ScenarioWorld& world, const Controls& controls, double dt);

// Everything a policy may see at one tick. No ground-truth scripts leak in;
// agents outside the field of view are absent.
struct Observation {
  double t = 0.0;
  double dt = 0.05;  // tick length of the world producing this observation
  EgoState ego;
  HistorySnapshot history;
  std::vector<AgentBox> agents;  // sorted by distance, nearest first
  RoutingCommand routing;
  RoadContext road;      // current-lane centerline and lane counts
  int ego_lane = 0;      // lane id relative to the route lane
  double speed_limit_mps = 8.0;
};

Observation observe(const ScenarioWorld& world);

// Lane centerline offset from the route by lane_id widths to the right.
std::vector<Point2> lane_centerline(const std::vector<Point2>& route,
                                    int lane_id, double lane_width_m);

struct DecisionRecord {
  std::string reasoning;
  MetaAction meta;
  bool fallback_used = false;
  bool length_warning = false;
};

// A hierarchical driving policy: decide() produces the reasoning trace and
// meta-action for the tick, act() turns the chosen meta-action into controls.
// run_episode calls them in that order every tick.
class PolicyStack {
 public:
  virtual ~PolicyStack() = default;
  virtual void reset() {}
  virtual DecisionRecord decide(const Observation& obs) = 0;
  virtual Controls act(const Observation& obs, const MetaAction& meta) = 0;
};

struct DecisionTrace {
  double t = 0.0;
  DecisionRecord decision;
};

struct EpisodeResult {
  std::string scenario;
  std::uint64_t seed = 0;
  double completion = 0.0;
  bool success = false;  // full completion with zero collisions
  bool collided = false;
  bool aborted = false;
  std::string abort_reason;
  int steps = 0;
  std::vector<InfractionEvent> infractions;
  std::vector<DecisionTrace> decisions;
  TrajectoryLog log;
};

struct RunOptions {
  bool record_decisions = true;
  bool record_log = true;
};

// Runs the decide/act/step loop until the route completes, a collision
// occurs, or max_steps elapse. A policy exception aborts the episode and is
// reported in the result instead of propagating.
EpisodeResult run_episode(ScenarioWorld& world, PolicyStack& stack,
                          const RunOptions& options = RunOptions{});

// Writes <stem>.jsonl (trajectory) and <stem>.json (summary sidecar). The
// sidecar carries schema tag "steerbench.episode/1" and no wall-clock times.
void save_episode(const EpisodeResult& result, const std::string& stem);
std::string episode_summary_json(const EpisodeResult& result);

}  // namespace steerbench
