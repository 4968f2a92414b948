#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace steerbench {

// Headings are compass-like: degrees in [0, 360), 0 along +x, increasing
// clockwise. An increasing course means the vehicle is moving right.
double normalize_heading(double deg);

// Signed shortest rotation from one heading to another, in (-180, 180].
// Positive means the course moved right. The +-180 tie resolves to +180.
double course_delta(double from_deg, double to_deg);

enum class AgentCategory {
  car,
  truck,
  pedestrian,
  cyclist,
  emergency_vehicle,
  static_obstacle,
};

std::string to_string(AgentCategory c);
AgentCategory agent_category_from_string(const std::string& s);

// Oriented box for a non-ego agent, in world coordinates.
struct AgentBox {
  std::string id;
  AgentCategory category = AgentCategory::car;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d(4.5, 2.0, 1.6);  // length, width, height
  double heading_deg = 0.0;
  double speed_mps = 0.0;
  std::optional<std::string> color;
  int relative_lane = 0;  // lane offset from ego; negative = left
};

struct EgoState {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading_deg = 0.0;
  double speed_mps = 0.0;
  std::optional<int> lane_id;
};

// Pinhole camera with world-to-camera extrinsics. The rotation must be
// orthonormal; load and construction validate it.
struct CameraModel {
  double fx = 1266.0;
  double fy = 1266.0;
  double cx = 800.0;
  double cy = 450.0;
  int width = 1600;
  int height = 900;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  void validate() const;  // throws InvalidArgumentError
};

struct TrajectoryLog {
  double rate_hz = 20.0;
  std::optional<CameraModel> camera;
  std::vector<EgoState> states;
  // Per-frame agent boxes; empty or shorter than states when unavailable.
  std::vector<std::vector<AgentBox>> boxes;

  double duration() const;
  const std::vector<AgentBox>* boxes_at(std::size_t frame) const;
};

enum class RoutingKind {
  follow_road,
  turn_left,
  turn_right,
  lane_change_left,
  lane_change_right,
  stop,
};

// Routing command with its canonical English rendering, e.g.
// "Turn left in 30 meters." or "Follow the road."
struct RoutingCommand {
  RoutingKind kind = RoutingKind::follow_road;
  std::optional<double> distance_m;
  std::string text;
};

RoutingCommand make_routing_command(RoutingKind kind,
                                    std::optional<double> distance_m = std::nullopt);
RoutingCommand parse_routing_command(const std::string& text);

// Exactly three (speed, heading) samples at t-4, t-2 and t seconds (0.5 Hz),
// plus the current speed. Sample order is oldest first.
struct HistorySnapshot {
  static constexpr int kSampleCount = 3;
  static constexpr double kSampleSpacing = 2.0;  // seconds

  std::array<double, kSampleCount> speeds_mps{};
  std::array<double, kSampleCount> headings_deg{};
  double current_speed_mps = 0.0;
};

// Nearest-neighbour resample of the log at {t-4, t-2, t}. Throws
// InsufficientHistoryError when the log does not cover the window.
HistorySnapshot resample_history(const TrajectoryLog& log, double t);

// Sum of signed course deltas over the inclusive frame range [first, last].
// A single-frame span has zero change; an out-of-range or inverted span
// throws InvalidArgumentError.
double total_course_change(const TrajectoryLog& log, std::size_t first,
                           std::size_t last);

// JSON-lines serialization: one header object {"rate_hz":..., "camera":...}
// followed by one object per frame.
void save_trajectory_log(const TrajectoryLog& log, const std::string& path);
TrajectoryLog load_trajectory_log(const std::string& path);
void write_trajectory_log(const TrajectoryLog& log, std::ostream& out);
TrajectoryLog read_trajectory_log(std::istream& in);

}  // namespace steerbench
