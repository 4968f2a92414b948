#include "steerbench/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "steerbench/errors.hpp"

namespace steerbench {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

double deg2rad(double deg) { return deg * kPi / 180.0; }

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

struct StyleScales {
  double speed = 1.0;
  double accel = 1.0;
};

StyleScales style_scales(DrivingStyle style, const ControllerParams& p) {
  switch (style) {
    case DrivingStyle::cautiously:
      return {p.cautious_speed_scale, p.cautious_accel_scale};
    case DrivingStyle::aggressively:
      return {p.aggressive_speed_scale, p.aggressive_accel_scale};
    case DrivingStyle::smoothly:
      return {1.0, p.smooth_accel_scale};
    case DrivingStyle::assertively:
      return {p.assertive_speed_scale, p.assertive_accel_scale};
    case DrivingStyle::normally:
      break;
  }
  return {1.0, 1.0};
}

double base_accel(SpeedIntensity intensity, const ControllerParams& p) {
  switch (intensity) {
    case SpeedIntensity::slight: return p.accel_slight_mps2;
    case SpeedIntensity::rapid: return p.accel_rapid_mps2;
    case SpeedIntensity::normal: break;
  }
  return p.accel_normal_mps2;
}

}  // namespace

Controls clamp_controls(Controls c) {
  c.throttle = std::clamp(c.throttle, 0.0, 1.0);
  c.brake = std::clamp(c.brake, 0.0, 1.0);
  c.steer = std::clamp(c.steer, -1.0, 1.0);
  if (c.throttle > 0.0 && c.brake > 0.0) {
    // Brake wins; the pair must stay mutually exclusive.
    c.throttle = 0.0;
  }
  return c;
}

double pid_step(const PidGains& gains, PidState& state, double error, double dt,
                double integral_limit) {
  if (dt <= 0.0) throw InvalidArgumentError("pid_step: dt must be positive");
  if (!state.primed) {
    state.prev_error = error;
    state.primed = true;
  }
  state.integral = std::clamp(state.integral + error * dt, -integral_limit,
                              integral_limit);
  double derivative = (error - state.prev_error) / dt;
  state.prev_error = error;
  return gains.kp * error + gains.ki * state.integral + gains.kd * derivative;
}

ActionChunk plan_waypoints(const VehicleState& ego, const MetaAction& action,
                           const RoadContext& road,
                           const ControllerParams& params) {
  MetaAction meta = normalize_meta_action(action);
  if (road.centerline.size() < 2) {
    throw InvalidArgumentError("plan_waypoints: centerline needs 2+ points");
  }
  if (meta.heading == HeadingBehavior::lane_change_left && road.lanes_left < 1) {
    throw InfeasibleManeuverError("lane change left: no lane to the left");
  }
  if (meta.heading == HeadingBehavior::lane_change_right && road.lanes_right < 1) {
    throw InfeasibleManeuverError("lane change right: no lane to the right");
  }

  const StyleScales scales = style_scales(meta.style, params);
  const Point2 ego_pos{ego.x, ego.y};
  const double build_len = ActionChunk::kGeomLength + 12.0;

  // Dense path, starting exactly at the ego pose.
  std::vector<Point2> dense;
  bool arc_maneuver = meta.heading == HeadingBehavior::turn_left ||
                      meta.heading == HeadingBehavior::turn_right ||
                      meta.heading == HeadingBehavior::u_turn;
  if (arc_maneuver) {
    bool left = meta.heading == HeadingBehavior::turn_left;
    double sweep_deg = params.turn_angle_deg;
    double radius = params.turn_radius_normal_m;
    if (meta.heading == HeadingBehavior::u_turn) {
      sweep_deg = params.u_turn_angle_deg;
      left = true;  // U-turns cross to the opposite direction via the left
    }
    switch (meta.heading_extent) {
      case HeadingExtent::slight:
        sweep_deg = params.turn_angle_slight_deg;
        break;
      case HeadingExtent::sharp:
        radius = params.turn_radius_sharp_m;
        break;
      case HeadingExtent::wide:
        radius = params.turn_radius_wide_m;
        break;
      default:
        break;
    }
    double side = left ? -radius : radius;
    Point2 right0 = right_normal(heading_direction(ego.heading_deg));
    Point2 center{ego.x + side * right0.x, ego.y + side * right0.y};
    double arc_len = deg2rad(sweep_deg) * radius;
    const double step = 0.1;
    for (double s = 0.0; s <= arc_len; s += step) {
      double phi = (s / radius) * 180.0 / kPi;
      double h = left ? ego.heading_deg - phi : ego.heading_deg + phi;
      Point2 r = right_normal(heading_direction(h));
      dense.push_back(Point2{center.x - side * r.x, center.y - side * r.y});
    }
    double final_heading =
        left ? ego.heading_deg - sweep_deg : ego.heading_deg + sweep_deg;
    Point2 fwd = heading_direction(final_heading);
    Point2 tail = dense.empty() ? ego_pos : dense.back();
    for (double ext = 0.1; ext <= build_len; ext += 0.1) {
      dense.push_back(Point2{tail.x + fwd.x * ext, tail.y + fwd.y * ext});
    }
  } else {
    Polyline line(extend_polyline(road.centerline, build_len + 20.0));
    PolylineProjection proj = line.project(ego_pos);
    double target_offset = 0.0;
    switch (meta.heading) {
      case HeadingBehavior::adjust_left:
      case HeadingBehavior::adjust_right: {
        double mag = (meta.heading_extent == HeadingExtent::slight)
                         ? params.adjust_offset_slight_m
                         : params.adjust_offset_normal_m;
        target_offset = (meta.heading == HeadingBehavior::adjust_right) ? mag : -mag;
        break;
      }
      case HeadingBehavior::lane_change_left:
        target_offset = -road.lane_width;
        break;
      case HeadingBehavior::lane_change_right:
        target_offset = road.lane_width;
        break;
      default:
        target_offset = 0.0;  // keep / recenter into the current lane
        break;
    }
    // Spatial ramp sized to ~lane_change_ramp_time_s of travel so that a
    // merge begun from a crawl clears an adjacent obstacle instead of
    // drifting over tens of metres; capped at the nominal ramp at speed.
    const double ramp =
        std::clamp(params.lane_change_ramp_time_s * ego.speed_mps,
                   params.lane_change_ramp_min_m, params.lane_change_ramp_m);
    const double step = 0.1;
    for (double s = 0.0; s <= build_len; s += step) {
      double s_abs = proj.s + s;
      Point2 b = line.at(s_abs);
      Point2 n = right_normal(line.direction_at(s_abs));
      double offset = proj.offset +
                      (target_offset - proj.offset) * smoothstep(s / ramp);
      dense.push_back(Point2{b.x + n.x * offset, b.y + n.y * offset});
    }
  }
  if (dense.size() < 2) {
    throw InvalidArgumentError("plan_waypoints: degenerate path");
  }
  dense.front() = ego_pos;

  Polyline path(std::move(dense));

  ActionChunk chunk;
  chunk.geom_wps.reserve(static_cast<std::size_t>(ActionChunk::kGeomLength) + 1);
  for (double s = 0.0; s <= ActionChunk::kGeomLength + 1e-9;
       s += ActionChunk::kGeomSpacing) {
    chunk.geom_wps.push_back(path.at(s));
  }

  // Speed profile integrated forward at the timed-waypoint spacing so the
  // k-th gap implies the speed at the k-th sample.
  double accel = 0.0;
  double v_cap = std::numeric_limits<double>::max();
  double v = ego.speed_mps;
  switch (meta.speed) {
    case SpeedBehavior::accelerate:
      accel = base_accel(meta.speed_intensity, params) * scales.accel;
      v_cap = road.speed_limit_mps * scales.speed;
      break;
    case SpeedBehavior::decelerate:
      accel = -base_accel(meta.speed_intensity, params) * scales.accel;
      break;
    case SpeedBehavior::stop:
      // Safety maneuver: full braking authority regardless of style.
      accel = -params.stop_decel_mps2;
      break;
    case SpeedBehavior::stationary:
      v = 0.0;
      break;
    case SpeedBehavior::maintain:
      break;
  }

  double travelled = 0.0;
  for (int k = 0; k < ActionChunk::kTimedCount; ++k) {
    Point2 p = path.at(travelled);
    chunk.time_wps.push_back(
        TimedWaypoint{k * ActionChunk::kTimeSpacing, p.x, p.y});
    travelled += v * ActionChunk::kTimeSpacing;
    v = std::clamp(v + accel * ActionChunk::kTimeSpacing, 0.0,
                   std::max(v_cap, 0.0));
  }
  chunk.time_wps.front() = TimedWaypoint{0.0, ego.x, ego.y};
  return chunk;
}

double derive_target_speed(const ActionChunk& chunk) {
  if (chunk.time_wps.size() < 2) {
    throw InvalidArgumentError("derive_target_speed: need 2+ timed waypoints");
  }
  const TimedWaypoint& a = chunk.time_wps[0];
  const TimedWaypoint& b = chunk.time_wps[1];
  return std::hypot(b.x - a.x, b.y - a.y) / ActionChunk::kTimeSpacing;
}

Controls track_waypoints(const ActionChunk& chunk, const VehicleState& state,
                         PidState& longitudinal, PidState& lateral, double dt,
                         const ControllerParams& params) {
  if (chunk.empty()) {
    return Controls{0.0, 1.0, 0.0};  // fail safe: full brake, wheel centered
  }

  double target_speed = derive_target_speed(chunk);
  // Feedforward from the profile slope so replans (which restart the profile
  // at the current speed, zeroing the tracking error) cannot stall a braking
  // or acceleration ramp while the PID error rebuilds.
  double accel_ff = 0.0;
  if (chunk.time_wps.size() >= 3) {
    const TimedWaypoint& b = chunk.time_wps[1];
    const TimedWaypoint& c = chunk.time_wps[2];
    double next_speed =
        std::hypot(c.x - b.x, c.y - b.y) / ActionChunk::kTimeSpacing;
    accel_ff = (next_speed - target_speed) / ActionChunk::kTimeSpacing;
  }
  double lon_ff = accel_ff >= 0.0 ? accel_ff / params.ff_throttle_gain_mps2
                                  : accel_ff / params.ff_brake_gain_mps2;
  double lon_out = lon_ff + pid_step(params.longitudinal, longitudinal,
                                     target_speed - state.speed_mps, dt,
                                     params.integral_limit);
  Controls controls;
  if (lon_out >= 0.0) {
    controls.throttle = std::clamp(lon_out, 0.0, 1.0);
  } else {
    controls.brake = std::clamp(-lon_out, 0.0, 1.0);
  }

  // Pure-pursuit style lateral error: lateral offset of a lookahead point on
  // the geometry, expressed in the vehicle frame (positive right).
  const Point2 pos{state.x, state.y};
  double lookahead =
      params.lookahead_base_m + params.lookahead_speed_gain * state.speed_mps;
  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < chunk.geom_wps.size(); ++i) {
    double d = dist(chunk.geom_wps[i], pos);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  Point2 target = chunk.geom_wps.back();
  double walked = 0.0;
  for (std::size_t i = nearest; i + 1 < chunk.geom_wps.size(); ++i) {
    walked += dist(chunk.geom_wps[i], chunk.geom_wps[i + 1]);
    if (walked >= lookahead) {
      target = chunk.geom_wps[i + 1];
      break;
    }
  }
  Point2 fwd = heading_direction(state.heading_deg);
  Point2 right = right_normal(fwd);
  double dx = target.x - pos.x;
  double dy = target.y - pos.y;
  double y_right = dx * right.x + dy * right.y;
  // Pure-pursuit curvature for the lookahead arc, expressed as the fraction
  // of full steering lock it asks for; this keeps the PID gains dimensionless
  // and the loop equally damped at all speeds.
  double reach = std::max(std::sqrt(dx * dx + dy * dy), 1.0);
  double curvature = 2.0 * y_right / (reach * reach);
  double steer_target = std::atan(params.wheelbase_m * curvature) /
                        (params.max_steer_deg * kDegToRad);
  double lat_out = pid_step(params.lateral, lateral, steer_target, dt,
                            params.integral_limit);
  controls.steer = std::clamp(lat_out, -1.0, 1.0);
  return clamp_controls(controls);
}

}  // namespace steerbench
