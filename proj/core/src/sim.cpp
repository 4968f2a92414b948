#include "steerbench/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "steerbench/errors.hpp"

namespace steerbench {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEgoRadius = 1.4;

double category_radius(AgentCategory c) {
  switch (c) {
    case AgentCategory::car: return 1.4;
    case AgentCategory::truck: return 1.8;
    case AgentCategory::pedestrian: return 0.35;
    case AgentCategory::cyclist: return 0.6;
    case AgentCategory::emergency_vehicle: return 1.5;
    case AgentCategory::static_obstacle: return 0.5;
  }
  return 1.0;
}

Eigen::Vector3d category_size(AgentCategory c) {
  switch (c) {
    case AgentCategory::car: return {4.5, 2.0, 1.6};
    case AgentCategory::truck: return {8.0, 2.5, 3.0};
    case AgentCategory::pedestrian: return {0.5, 0.5, 1.8};
    case AgentCategory::cyclist: return {1.8, 0.6, 1.7};
    case AgentCategory::emergency_vehicle: return {5.5, 2.2, 2.2};
    case AgentCategory::static_obstacle: return {0.5, 0.5, 1.0};
  }
  return {1.0, 1.0, 1.0};
}

InfractionKind collision_kind(AgentCategory c) {
  switch (c) {
    case AgentCategory::pedestrian:
      return InfractionKind::collision_pedestrian;
    case AgentCategory::static_obstacle:
      return InfractionKind::collision_static;
    default:
      return InfractionKind::collision_vehicle;
  }
}

double phase_target(const AgentScript& script, double local_t) {
  double target = 0.0;
  bool any = false;
  for (const SpeedPhase& phase : script.phases) {
    if (phase.t_start <= local_t + 1e-9) {
      target = phase.speed_mps;
      any = true;
    }
  }
  return any ? target : 0.0;
}

}  // namespace

void step_vehicle(VehicleState& state, const Controls& controls, double dt,
                  const BicycleParams& params) {
  Controls c = clamp_controls(controls);
  double accel = params.throttle_gain_mps2 * c.throttle -
                 params.brake_gain_mps2 * c.brake -
                 params.drag_per_s * state.speed_mps;
  state.speed_mps = std::max(0.0, state.speed_mps + accel * dt);
  double steer_rad = c.steer * params.max_steer_deg * kPi / 180.0;
  double yaw_rate_rad = (state.speed_mps / params.wheelbase_m) * std::tan(steer_rad);
  state.heading_deg =
      normalize_heading(state.heading_deg + yaw_rate_rad * 180.0 / kPi * dt);
  Point2 dir = heading_direction(state.heading_deg);
  state.x += state.speed_mps * dir.x * dt;
  state.y += state.speed_mps * dir.y * dt;
}

std::string to_string(InfractionKind kind) {
  switch (kind) {
    case InfractionKind::collision_pedestrian: return "collision_pedestrian";
    case InfractionKind::collision_vehicle: return "collision_vehicle";
    case InfractionKind::collision_static: return "collision_static";
    case InfractionKind::red_light: return "red_light";
    case InfractionKind::stop_sign: return "stop_sign";
    case InfractionKind::route_deviation: return "route_deviation";
  }
  throw InvalidArgumentError("unknown InfractionKind");
}

InfractionKind infraction_kind_from_string(const std::string& s) {
  if (s == "collision_pedestrian") return InfractionKind::collision_pedestrian;
  if (s == "collision_vehicle") return InfractionKind::collision_vehicle;
  if (s == "collision_static") return InfractionKind::collision_static;
  if (s == "red_light") return InfractionKind::red_light;
  if (s == "stop_sign") return InfractionKind::stop_sign;
  if (s == "route_deviation") return InfractionKind::route_deviation;
  throw InvalidArgumentError("unknown infraction kind: " + s);
}

InfractionLedger::InfractionLedger(double debounce_s) : debounce_s_(debounce_s) {}

bool InfractionLedger::record(InfractionKind kind, const std::string& agent_id,
                              double t) {
  auto key = std::make_pair(static_cast<int>(kind), agent_id);
  auto it = last_.find(key);
  if (it != last_.end() && t - it->second < debounce_s_) {
    return false;
  }
  last_[key] = t;
  events_.push_back(InfractionEvent{kind, agent_id, t});
  return true;
}

std::size_t InfractionLedger::count(InfractionKind kind) const {
  std::size_t n = 0;
  for (const InfractionEvent& e : events_) {
    if (e.kind == kind) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Scenario loading

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& origin, const std::string& msg) {
  throw ConfigError(origin + ": " + msg);
}

std::vector<Point2> parse_points(const json& arr, const std::string& origin,
                                 const std::string& field) {
  std::vector<Point2> pts;
  if (!arr.is_array()) config_fail(origin, field + " must be an array");
  for (const json& p : arr) {
    if (!p.is_array() || p.size() != 2) {
      config_fail(origin, field + " entries must be [x, y] pairs");
    }
    pts.push_back(Point2{p[0].get<double>(), p[1].get<double>()});
  }
  return pts;
}

AgentCategory parse_category(const json& j, const std::string& origin,
                             const std::string& agent_id) {
  std::string name = j.get<std::string>();
  try {
    return agent_category_from_string(name);
  } catch (const InvalidArgumentError&) {
    config_fail(origin, "agent '" + agent_id + "': unknown category '" + name +
                            "' (valid: car, truck, pedestrian, cyclist, "
                            "emergency_vehicle, static_obstacle)");
  }
}

AgentTrigger parse_trigger(const json& j, const std::string& origin,
                           const std::string& agent_id) {
  AgentTrigger trigger;
  std::string kind = j.value("kind", "");
  if (kind == "time") {
    trigger.kind = TriggerKind::time;
    if (!j.contains("t")) {
      config_fail(origin, "agent '" + agent_id + "': time trigger needs \"t\"");
    }
    trigger.time_s = j.at("t").get<double>();
  } else if (kind == "proximity") {
    trigger.kind = TriggerKind::proximity;
    if (!j.contains("distance_m")) {
      config_fail(origin,
                  "agent '" + agent_id + "': proximity trigger needs \"distance_m\"");
    }
    trigger.distance_m = j.at("distance_m").get<double>();
    if (trigger.distance_m <= 0.0) {
      config_fail(origin, "agent '" + agent_id + "': distance_m must be positive");
    }
  } else {
    config_fail(origin, "agent '" + agent_id + "': unknown trigger kind '" + kind +
                            "' (valid: time, proximity)");
  }
  return trigger;
}

}  // namespace

ScenarioConfig parse_scenario_json(const std::string& text,
                                   const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_fail(origin, std::string("invalid JSON: ") + e.what());
  }
  if (j.value("schema", "") != "steerbench.scenario/1") {
    config_fail(origin, "missing or unsupported schema tag (expected "
                        "\"steerbench.scenario/1\")");
  }

  ScenarioConfig cfg;
  cfg.name = j.value("name", "");
  if (cfg.name.empty()) config_fail(origin, "scenario needs a name");
  cfg.description = j.value("description", "");

  if (!j.contains("route")) config_fail(origin, "missing route");
  const json& route = j.at("route");
  if (route.contains("points")) {
    cfg.route = parse_points(route.at("points"), origin, "route.points");
  } else if (route.contains("length_m")) {
    double len = route.at("length_m").get<double>();
    if (len <= 0.0) config_fail(origin, "route.length_m must be positive");
    cfg.route = {Point2{0.0, 0.0}, Point2{len, 0.0}};
  }
  if (cfg.route.size() < 2) {
    config_fail(origin, "route needs length_m or 2+ points");
  }
  cfg.lane_width_m = route.value("lane_width_m", 3.5);
  if (cfg.lane_width_m <= 0.0) config_fail(origin, "lane_width_m must be positive");
  cfg.lanes_left = route.value("lanes_left", 0);
  cfg.lanes_right = route.value("lanes_right", 0);
  if (cfg.lanes_left < 0 || cfg.lanes_right < 0) {
    config_fail(origin, "lane counts must be non-negative");
  }
  cfg.speed_limit_mps = route.value("speed_limit_mps", 8.0);
  if (cfg.speed_limit_mps <= 0.0) {
    config_fail(origin, "speed_limit_mps must be positive");
  }

  if (j.contains("ego")) {
    const json& ego = j.at("ego");
    cfg.ego.s = ego.value("s", 0.0);
    cfg.ego.lane = ego.value("lane", 0);
    cfg.ego.speed_mps = ego.value("speed_mps", 0.0);
    if (cfg.ego.lane < -cfg.lanes_left || cfg.ego.lane > cfg.lanes_right) {
      config_fail(origin, "ego.lane outside the configured lanes");
    }
    if (cfg.ego.speed_mps < 0.0) config_fail(origin, "ego.speed_mps negative");
  }

  if (j.contains("routing")) {
    std::string routing = j.at("routing").get<std::string>();
    if (routing == "follow_road") cfg.routing = RoutingKind::follow_road;
    else if (routing == "turn_left") cfg.routing = RoutingKind::turn_left;
    else if (routing == "turn_right") cfg.routing = RoutingKind::turn_right;
    else if (routing == "lane_change_left") cfg.routing = RoutingKind::lane_change_left;
    else if (routing == "lane_change_right") cfg.routing = RoutingKind::lane_change_right;
    else if (routing == "stop") cfg.routing = RoutingKind::stop;
    else config_fail(origin, "unknown routing '" + routing + "'");
  }

  cfg.rate_hz = j.value("rate_hz", 20.0);
  if (cfg.rate_hz <= 0.0) config_fail(origin, "rate_hz must be positive");
  cfg.max_steps = j.value("max_steps", 4000);
  if (cfg.max_steps < 1) config_fail(origin, "max_steps must be at least 1");

  for (const json& a : j.value("agents", json::array())) {
    AgentScript script;
    script.id = a.value("id", "");
    if (script.id.empty()) config_fail(origin, "every agent needs an id");
    if (!a.contains("category")) {
      config_fail(origin, "agent '" + script.id + "': missing category");
    }
    script.category = parse_category(a.at("category"), origin, script.id);
    if (a.contains("color")) script.color = a.at("color").get<std::string>();
    if (!a.contains("path")) {
      config_fail(origin, "agent '" + script.id + "': missing path");
    }
    script.path = parse_points(a.at("path"), origin, "agent '" + script.id + "' path");
    if (script.path.empty()) {
      config_fail(origin, "agent '" + script.id + "': path needs 1+ points");
    }
    script.heading_deg = a.value("heading_deg", 0.0);
    for (const json& ph : a.value("phases", json::array())) {
      SpeedPhase phase;
      phase.t_start = ph.value("t", 0.0);
      phase.speed_mps = ph.value("speed_mps", 0.0);
      if (phase.speed_mps < 0.0) {
        config_fail(origin, "agent '" + script.id + "': negative phase speed");
      }
      script.phases.push_back(phase);
    }
    if (a.contains("trigger")) {
      script.trigger = parse_trigger(a.at("trigger"), origin, script.id);
    }
    script.accel_mps2 = a.value("accel_mps2", 4.0);
    script.collision_radius_m = a.value("collision_radius_m", 0.0);
    cfg.agents.push_back(std::move(script));
  }

  for (const json& z : j.value("traction_zones", json::array())) {
    TractionZone zone;
    zone.s_begin = z.value("s_begin", 0.0);
    zone.s_end = z.value("s_end", 0.0);
    zone.yaw_bias_deg_s = z.value("yaw_bias_deg_s", 0.0);
    if (zone.s_end <= zone.s_begin) {
      config_fail(origin, "traction zone must satisfy s_begin < s_end");
    }
    cfg.traction_zones.push_back(zone);
  }

  if (j.contains("traffic_light") && !j.at("traffic_light").is_null()) {
    TrafficLightSpec light;
    light.stop_line_s = j.at("traffic_light").value("stop_line_s", 0.0);
    light.red_until_s = j.at("traffic_light").value("red_until_s", 0.0);
    cfg.traffic_light = light;
  }
  if (j.contains("stop_sign_s") && !j.at("stop_sign_s").is_null()) {
    cfg.stop_sign_s = j.at("stop_sign_s").get<double>();
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str(), path);
}

// ---------------------------------------------------------------------------
// World dynamics

std::vector<Point2> lane_centerline(const std::vector<Point2>& route,
                                    int lane_id, double lane_width_m) {
  Polyline line(route);
  std::vector<Point2> out;
  out.reserve(route.size());
  double s = 0.0;
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (i > 0) s += dist(route[i - 1], route[i]);
    Point2 n = right_normal(line.direction_at(s));
    double shift = lane_id * lane_width_m;
    out.push_back(Point2{route[i].x + n.x * shift, route[i].y + n.y * shift});
  }
  return out;
}

ScenarioWorld make_world(const ScenarioConfig& config, std::uint64_t seed) {
  ScenarioWorld world;
  world.config = config;
  world.seed = seed;
  world.route_line = Polyline(config.route);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  double s = config.ego.s;
  Point2 base = world.route_line.at(s);
  Point2 dir = world.route_line.direction_at(s);
  Point2 n = right_normal(dir);
  double shift = config.ego.lane * config.lane_width_m;
  world.ego.x = base.x + n.x * shift;
  world.ego.y = base.y + n.y * shift;
  world.ego.heading_deg = heading_of(dir);
  world.ego.speed_mps = std::max(0.0, config.ego.speed_mps + 0.3 * unit(rng));
  world.route_s = s;
  world.completion = std::clamp(s / std::max(world.route_line.length(), 1e-9),
                                0.0, 1.0);

  for (std::size_t i = 0; i < world.config.agents.size(); ++i) {
    const AgentScript& script = world.config.agents[i];
    AgentRuntime rt;
    rt.script_index = i;
    rt.speed_scale = 1.0 + 0.03 * unit(rng);
    rt.active = script.trigger.kind == TriggerKind::none;
    rt.activation_t = 0.0;
    rt.x = script.path.front().x;
    rt.y = script.path.front().y;
    rt.heading_deg = script.path.size() >= 2
                         ? heading_of(Point2{script.path[1].x - script.path[0].x,
                                             script.path[1].y - script.path[0].y})
                         : script.heading_deg;
    if (rt.active && !script.phases.empty() &&
        script.phases.front().t_start <= 0.0) {
      rt.speed_mps = phase_target(script, 0.0) * rt.speed_scale;
    }
    world.agents.push_back(rt);
  }

  EgoState init;
  init.t = 0.0;
  init.x = world.ego.x;
  init.y = world.ego.y;
  init.heading_deg = world.ego.heading_deg;
  init.speed_mps = world.ego.speed_mps;
  init.lane_id = config.ego.lane;
  world.trace.push_back(init);
  return world;
}

void step(ScenarioWorld& world, const Controls& controls, double dt) {
  if (dt <= 0.0) throw InvalidArgumentError("step: dt must be positive");
  const ScenarioConfig& cfg = world.config;
  double prev_s = world.route_s;

  for (const TractionZone& zone : cfg.traction_zones) {
    if (prev_s >= zone.s_begin && prev_s <= zone.s_end) {
      world.ego.heading_deg =
          normalize_heading(world.ego.heading_deg + zone.yaw_bias_deg_s * dt);
    }
  }
  step_vehicle(world.ego, controls, dt, world.bicycle);
  world.t += dt;
  world.steps += 1;

  const Point2 ego_pos{world.ego.x, world.ego.y};
  for (AgentRuntime& rt : world.agents) {
    const AgentScript& script = cfg.agents[rt.script_index];
    if (!rt.active) {
      switch (script.trigger.kind) {
        case TriggerKind::time:
          if (world.t >= script.trigger.time_s) {
            rt.active = true;
            rt.activation_t = world.t;
          }
          break;
        case TriggerKind::proximity:
          if (dist(ego_pos, Point2{rt.x, rt.y}) <= script.trigger.distance_m) {
            rt.active = true;
            rt.activation_t = world.t;
          }
          break;
        case TriggerKind::none:
          rt.active = true;
          break;
      }
      if (!rt.active) continue;
    }
    if (script.path.size() < 2) {
      rt.speed_mps = 0.0;
      continue;
    }
    Polyline path(script.path);
    double target =
        phase_target(script, world.t - rt.activation_t) * rt.speed_scale;
    double dv = std::clamp(target - rt.speed_mps, -script.accel_mps2 * dt,
                           script.accel_mps2 * dt);
    rt.speed_mps = std::max(0.0, rt.speed_mps + dv);
    rt.path_s += rt.speed_mps * dt;
    if (rt.path_s >= path.length()) {
      rt.path_s = path.length();
      rt.speed_mps = 0.0;
    }
    Point2 p = path.at(rt.path_s);
    rt.x = p.x;
    rt.y = p.y;
    rt.heading_deg = heading_of(path.direction_at(rt.path_s));
  }

  // Collisions are terminal; record at most one event per agent contact.
  for (const AgentRuntime& rt : world.agents) {
    if (!rt.active) continue;
    const AgentScript& script = cfg.agents[rt.script_index];
    double radius = script.collision_radius_m > 0.0
                        ? script.collision_radius_m
                        : category_radius(script.category);
    if (dist(Point2{world.ego.x, world.ego.y}, Point2{rt.x, rt.y}) <
        kEgoRadius + radius) {
      world.ledger.record(collision_kind(script.category), script.id, world.t);
      world.collided = true;
    }
  }

  PolylineProjection proj =
      world.route_line.project(Point2{world.ego.x, world.ego.y});
  world.route_s = proj.s;
  double len = world.route_line.length();
  world.completion =
      std::max(world.completion, std::clamp(proj.s / len, 0.0, 1.0));
  if (proj.s >= len - 0.01) {
    world.completion = 1.0;
    world.finished = true;
  }

  if (std::abs(proj.offset) > world.route_deviation_m) {
    world.ledger.record(InfractionKind::route_deviation, "", world.t);
  }
  if (cfg.traffic_light) {
    const TrafficLightSpec& light = *cfg.traffic_light;
    if (prev_s < light.stop_line_s && proj.s >= light.stop_line_s &&
        world.t < light.red_until_s) {
      world.ledger.record(InfractionKind::red_light, "", world.t);
    }
  }
  if (cfg.stop_sign_s) {
    double sign = *cfg.stop_sign_s;
    if (proj.s >= sign - 12.0 && proj.s < sign &&
        world.ego.speed_mps < 0.5) {
      world.stop_sign_satisfied = true;
    }
    if (prev_s < sign && proj.s >= sign) {
      if (!world.stop_sign_satisfied) {
        world.ledger.record(InfractionKind::stop_sign, "", world.t);
      }
      world.stop_sign_satisfied = false;
    }
  }

  EgoState state;
  state.t = world.t;
  state.x = world.ego.x;
  state.y = world.ego.y;
  state.heading_deg = world.ego.heading_deg;
  state.speed_mps = world.ego.speed_mps;
  state.lane_id = static_cast<int>(std::lround(proj.offset / cfg.lane_width_m));
  world.trace.push_back(state);
}

// ---------------------------------------------------------------------------
// Observation

Observation observe(const ScenarioWorld& world) {
  const ScenarioConfig& cfg = world.config;
  Observation obs;
  obs.t = world.t;
  obs.dt = 1.0 / cfg.rate_hz;
  obs.ego = world.trace.back();
  obs.speed_limit_mps = cfg.speed_limit_mps;

  PolylineProjection ego_proj =
      world.route_line.project(Point2{world.ego.x, world.ego.y});
  obs.ego_lane = static_cast<int>(std::lround(ego_proj.offset / cfg.lane_width_m));

  // History resampled from the trace, padded by repeating the earliest state
  // when the episode is younger than the window.
  TrajectoryLog log;
  log.rate_hz = cfg.rate_hz;
  log.states = world.trace;
  double window = HistorySnapshot::kSampleSpacing * (HistorySnapshot::kSampleCount - 1);
  if (!log.states.empty() && log.states.front().t > obs.t - window) {
    EgoState pad = log.states.front();
    pad.t = obs.t - window;
    log.states.insert(log.states.begin(), pad);
  }
  obs.history = resample_history(log, obs.t);

  for (const AgentRuntime& rt : world.agents) {
    if (!rt.active) continue;
    const AgentScript& script = cfg.agents[rt.script_index];
    Point2 delta{rt.x - world.ego.x, rt.y - world.ego.y};
    double d = std::hypot(delta.x, delta.y);
    if (d > world.fov_range_m) continue;
    if (d > 1e-6) {
      double bearing = course_delta(world.ego.heading_deg, heading_of(delta));
      if (std::abs(bearing) > world.fov_half_angle_deg) continue;
    }
    AgentBox box;
    box.id = script.id;
    box.category = script.category;
    box.size = category_size(script.category);
    box.center = Eigen::Vector3d(rt.x, rt.y, box.size.z() / 2.0);
    box.heading_deg = rt.heading_deg;
    box.speed_mps = rt.speed_mps;
    box.color = script.color;
    PolylineProjection agent_proj = world.route_line.project(Point2{rt.x, rt.y});
    int agent_lane =
        static_cast<int>(std::lround(agent_proj.offset / cfg.lane_width_m));
    box.relative_lane = agent_lane - obs.ego_lane;
    obs.agents.push_back(std::move(box));
  }
  std::sort(obs.agents.begin(), obs.agents.end(),
            [&](const AgentBox& a, const AgentBox& b) {
              double da = std::hypot(a.center.x() - world.ego.x,
                                     a.center.y() - world.ego.y);
              double db = std::hypot(b.center.x() - world.ego.x,
                                     b.center.y() - world.ego.y);
              if (da != db) return da < db;
              return a.id < b.id;
            });

  obs.routing = make_routing_command(cfg.routing);
  obs.road.centerline = lane_centerline(cfg.route, obs.ego_lane, cfg.lane_width_m);
  obs.road.lane_width = cfg.lane_width_m;
  obs.road.lanes_left = cfg.lanes_left + obs.ego_lane;
  obs.road.lanes_right = cfg.lanes_right - obs.ego_lane;
  obs.road.speed_limit_mps = cfg.speed_limit_mps;
  return obs;
}

// ---------------------------------------------------------------------------
// Episode loop

EpisodeResult run_episode(ScenarioWorld& world, PolicyStack& stack,
                          const RunOptions& options) {
  EpisodeResult result;
  result.scenario = world.config.name;
  result.seed = world.seed;
  result.log.rate_hz = world.config.rate_hz;
  const double dt = 1.0 / world.config.rate_hz;

  stack.reset();
  while (!world.collided && !world.finished &&
         world.steps < world.config.max_steps) {
    Observation obs = observe(world);
    DecisionRecord decision;
    Controls controls;
    try {
      decision = stack.decide(obs);
      controls = stack.act(obs, decision.meta);
    } catch (const std::exception& e) {
      result.aborted = true;
      result.abort_reason = e.what();
      break;
    }
    if (options.record_decisions) {
      result.decisions.push_back(DecisionTrace{world.t, decision});
    }
    if (options.record_log) {
      result.log.boxes.push_back(obs.agents);
    }
    step(world, controls, dt);
  }

  result.completion = world.completion;
  result.collided = world.collided;
  result.steps = world.steps;
  result.infractions = world.ledger.events();
  result.success = world.finished && !world.collided && !result.aborted &&
                   world.ledger.count(InfractionKind::collision_pedestrian) == 0 &&
                   world.ledger.count(InfractionKind::collision_vehicle) == 0 &&
                   world.ledger.count(InfractionKind::collision_static) == 0;
  if (options.record_log) {
    result.log.states = world.trace;
  }
  return result;
}

std::string episode_summary_json(const EpisodeResult& result) {
  nlohmann::ordered_json j;
  j["schema"] = "steerbench.episode/1";
  j["scenario"] = result.scenario;
  j["seed"] = result.seed;
  j["steps"] = result.steps;
  j["completion"] = result.completion;
  j["success"] = result.success;
  j["collided"] = result.collided;
  j["aborted"] = result.aborted;
  j["abort_reason"] = result.abort_reason;
  j["infractions"] = nlohmann::ordered_json::array();
  for (const InfractionEvent& e : result.infractions) {
    j["infractions"].push_back({{"kind", to_string(e.kind)},
                                {"agent_id", e.agent_id},
                                {"t", e.t}});
  }
  j["decisions"] = nlohmann::ordered_json::array();
  for (const DecisionTrace& d : result.decisions) {
    nlohmann::ordered_json item;
    item["t"] = d.t;
    item["meta"] = render_meta_action(d.decision.meta);
    item["reasoning"] = d.decision.reasoning;
    item["fallback_used"] = d.decision.fallback_used;
    item["length_warning"] = d.decision.length_warning;
    j["decisions"].push_back(std::move(item));
  }
  return j.dump(2) + "\n";
}

void save_episode(const EpisodeResult& result, const std::string& stem) {
  save_trajectory_log(result.log, stem + ".jsonl");
  std::ofstream out(stem + ".json", std::ios::binary);
  if (!out) throw ConfigError("cannot write episode summary: " + stem + ".json");
  out << episode_summary_json(result);
}

}  // namespace steerbench
