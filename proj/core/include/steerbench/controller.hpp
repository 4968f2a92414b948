#pragma once

#include <cstddef>
#include <vector>

#include "steerbench/geometry.hpp"
#include "steerbench/meta_action.hpp"

namespace steerbench {

struct TimedWaypoint {
  double t_offset = 0.0;  // seconds from chunk start
  double x = 0.0;
  double y = 0.0;
};

// Low-level plan: a 2 s timed horizon at 4 Hz plus 20 m of geometry at 1 m
// spacing. Both sequences start at the ego pose the plan was made from.
struct ActionChunk {
  static constexpr double kTimeSpacing = 0.25;  // seconds
  static constexpr int kTimedCount = 8;         // 2 s horizon
  static constexpr double kGeomSpacing = 1.0;   // meters
  static constexpr double kGeomLength = 20.0;   // meters

  std::vector<TimedWaypoint> time_wps;
  std::vector<Point2> geom_wps;

  bool empty() const { return time_wps.size() < 2 || geom_wps.size() < 2; }
};

// Normalized actuator outputs. Throttle and brake never both engage.
struct Controls {
  double throttle = 0.0;  // [0, 1]
  double brake = 0.0;     // [0, 1]
  double steer = 0.0;     // [-1, 1], positive steers right
};

Controls clamp_controls(Controls c);

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading_deg = 0.0;
  double speed_mps = 0.0;
};

// Lane-relative view of the road used for planning: the centerline of the
// lane the ego currently occupies, plus how many lanes exist on each side.
struct RoadContext {
  std::vector<Point2> centerline;
  double lane_width = 3.5;
  int lanes_left = 0;
  int lanes_right = 0;
  double speed_limit_mps = 8.0;
};

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  bool primed = false;

  void reset() { *this = PidState{}; }
};

double pid_step(const PidGains& gains, PidState& state, double error, double dt,
                double integral_limit);

// Tuning constants for planning and tracking. The base accelerations map the
// three intensities; style scales target speed and acceleration.
struct ControllerParams {
  PidGains longitudinal{0.8, 0.05, 0.1};
  PidGains lateral{1.4, 0.0, 0.3};
  double integral_limit = 2.0;
  double lookahead_base_m = 1.5;
  double lookahead_speed_gain = 0.8;  // seconds of look-ahead per m/s
  // Vehicle model assumed when converting lateral error into a normalized
  // steering angle and profile slopes into pedal feedforward; keep in sync
  // with the plant being driven.
  double wheelbase_m = 2.8;
  double max_steer_deg = 35.0;
  double ff_throttle_gain_mps2 = 3.0;
  double ff_brake_gain_mps2 = 6.0;
  double accel_slight_mps2 = 0.5;
  double accel_normal_mps2 = 1.0;
  double accel_rapid_mps2 = 2.0;
  double lane_change_ramp_m = 15.0;      // ramp length at speed
  double lane_change_ramp_min_m = 3.0;   // floor when starting from a crawl
  double lane_change_ramp_time_s = 2.0;  // seconds of travel the ramp spans
  double adjust_offset_slight_m = 0.3;
  double adjust_offset_normal_m = 0.5;
  double turn_radius_normal_m = 8.0;
  double turn_radius_sharp_m = 5.0;
  double turn_radius_wide_m = 12.0;
  double turn_angle_deg = 90.0;
  double turn_angle_slight_deg = 45.0;
  double u_turn_angle_deg = 180.0;
  double stop_decel_mps2 = 2.5;
  double cautious_speed_scale = 0.8;
  double cautious_accel_scale = 0.7;
  double aggressive_speed_scale = 1.2;
  double aggressive_accel_scale = 1.3;
  double smooth_accel_scale = 0.85;
  double assertive_speed_scale = 1.1;
  double assertive_accel_scale = 1.15;
};

// Expands a meta-action into an ActionChunk against the road context. Lane
// changes into a lane that does not exist throw InfeasibleManeuverError.
ActionChunk plan_waypoints(const VehicleState& ego, const MetaAction& action,
                           const RoadContext& road,
                           const ControllerParams& params = {});

// Target speed implied by the first timed gap of the chunk.
double derive_target_speed(const ActionChunk& chunk);

// One PID tracking step against the chunk. An empty chunk fails safe to full
// brake with centered steering.
Controls track_waypoints(const ActionChunk& chunk, const VehicleState& state,
                         PidState& longitudinal, PidState& lateral, double dt,
                         const ControllerParams& params = {});

}  // namespace steerbench
