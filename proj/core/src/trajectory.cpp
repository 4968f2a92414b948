#include "steerbench/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "steerbench/errors.hpp"

namespace steerbench {

using nlohmann::json;

double normalize_heading(double deg) {
  if (!std::isfinite(deg)) {
    throw InvalidArgumentError("normalize_heading: non-finite heading");
  }
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  // fmod rounding can land exactly on 360 after the correction above.
  if (r >= 360.0) r = 0.0;
  return r;
}

double course_delta(double from_deg, double to_deg) {
  double d = normalize_heading(to_deg) - normalize_heading(from_deg);
  if (d > 180.0) d -= 360.0;
  if (d <= -180.0) d += 360.0;
  return d;
}

std::string to_string(AgentCategory c) {
  switch (c) {
    case AgentCategory::car: return "car";
    case AgentCategory::truck: return "truck";
    case AgentCategory::pedestrian: return "pedestrian";
    case AgentCategory::cyclist: return "cyclist";
    case AgentCategory::emergency_vehicle: return "emergency_vehicle";
    case AgentCategory::static_obstacle: return "static_obstacle";
  }
  return "car";
}

AgentCategory agent_category_from_string(const std::string& s) {
  if (s == "car") return AgentCategory::car;
  if (s == "truck") return AgentCategory::truck;
  if (s == "pedestrian") return AgentCategory::pedestrian;
  if (s == "cyclist") return AgentCategory::cyclist;
  if (s == "emergency_vehicle") return AgentCategory::emergency_vehicle;
  if (s == "static_obstacle") return AgentCategory::static_obstacle;
  throw InvalidArgumentError("unknown agent category: " + s);
}

void CameraModel::validate() const {
  if (fx <= 0.0 || fy <= 0.0) {
    throw InvalidArgumentError("camera: focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw InvalidArgumentError("camera: image size must be positive");
  }
  Eigen::Matrix3d gram = rotation * rotation.transpose();
  if ((gram - Eigen::Matrix3d::Identity()).norm() > 1e-6) {
    throw InvalidArgumentError("camera: rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > 1e-6) {
    throw InvalidArgumentError("camera: rotation is not proper (det != 1)");
  }
}

double TrajectoryLog::duration() const {
  if (states.size() < 2) return 0.0;
  return states.back().t - states.front().t;
}

const std::vector<AgentBox>* TrajectoryLog::boxes_at(std::size_t frame) const {
  if (frame < boxes.size()) return &boxes[frame];
  return nullptr;
}

RoutingCommand make_routing_command(RoutingKind kind,
                                    std::optional<double> distance_m) {
  RoutingCommand cmd;
  cmd.kind = kind;
  cmd.distance_m = distance_m;
  std::string head;
  switch (kind) {
    case RoutingKind::follow_road: head = "Follow the road"; break;
    case RoutingKind::turn_left: head = "Turn left"; break;
    case RoutingKind::turn_right: head = "Turn right"; break;
    case RoutingKind::lane_change_left: head = "Change lanes to the left"; break;
    case RoutingKind::lane_change_right: head = "Change lanes to the right"; break;
    case RoutingKind::stop: head = "Stop"; break;
  }
  if (distance_m && kind != RoutingKind::follow_road) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), " in %g meters", *distance_m);
    head += buf;
  }
  cmd.text = head + ".";
  return cmd;
}

RoutingCommand parse_routing_command(const std::string& text) {
  std::string t;
  t.reserve(text.size());
  for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

  RoutingKind kind;
  if (t.find("follow the road") != std::string::npos) {
    kind = RoutingKind::follow_road;
  } else if (t.find("change lanes to the left") != std::string::npos ||
             t.find("lane change left") != std::string::npos) {
    kind = RoutingKind::lane_change_left;
  } else if (t.find("change lanes to the right") != std::string::npos ||
             t.find("lane change right") != std::string::npos) {
    kind = RoutingKind::lane_change_right;
  } else if (t.find("turn left") != std::string::npos) {
    kind = RoutingKind::turn_left;
  } else if (t.find("turn right") != std::string::npos) {
    kind = RoutingKind::turn_right;
  } else if (t.find("stop") != std::string::npos) {
    kind = RoutingKind::stop;
  } else {
    throw ParseError("unrecognized routing command: " + text);
  }

  std::optional<double> distance;
  std::size_t pos = t.find(" in ");
  if (pos != std::string::npos) {
    const char* start = t.c_str() + pos + 4;
    char* end = nullptr;
    double value = std::strtod(start, &end);
    if (end != start && std::isfinite(value)) distance = value;
  }
  return make_routing_command(kind, distance);
}

namespace {

std::size_t nearest_index(const std::vector<EgoState>& states, double t) {
  auto it = std::lower_bound(
      states.begin(), states.end(), t,
      [](const EgoState& s, double value) { return s.t < value; });
  if (it == states.begin()) return 0;
  if (it == states.end()) return states.size() - 1;
  std::size_t hi = static_cast<std::size_t>(it - states.begin());
  std::size_t lo = hi - 1;
  // Ties keep the earlier sample.
  return (t - states[lo].t <= states[hi].t - t) ? lo : hi;
}

}  // namespace

HistorySnapshot resample_history(const TrajectoryLog& log, double t) {
  const auto& states = log.states;
  if (states.empty()) {
    throw InsufficientHistoryError("resample_history: empty log");
  }
  const double window = HistorySnapshot::kSampleSpacing *
                        (HistorySnapshot::kSampleCount - 1);
  if (states.front().t > t - window + 1e-9 || states.back().t < t - 1e-9) {
    std::ostringstream msg;
    msg << "resample_history: log covers [" << states.front().t << ", "
        << states.back().t << "] but needs [" << (t - window) << ", " << t
        << "]";
    throw InsufficientHistoryError(msg.str());
  }
  HistorySnapshot snap;
  for (int k = 0; k < HistorySnapshot::kSampleCount; ++k) {
    double target = t - window + k * HistorySnapshot::kSampleSpacing;
    const EgoState& s = states[nearest_index(states, target)];
    snap.speeds_mps[static_cast<std::size_t>(k)] = s.speed_mps;
    snap.headings_deg[static_cast<std::size_t>(k)] = s.heading_deg;
  }
  snap.current_speed_mps = states[nearest_index(states, t)].speed_mps;
  return snap;
}

double total_course_change(const TrajectoryLog& log, std::size_t first,
                           std::size_t last) {
  if (first > last || last >= log.states.size()) {
    throw InvalidArgumentError("total_course_change: bad span");
  }
  double total = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    total += course_delta(log.states[i].heading_deg,
                          log.states[i + 1].heading_deg);
  }
  return total;
}

namespace {

json camera_to_json(const CameraModel& cam) {
  json j;
  j["fx"] = cam.fx;
  j["fy"] = cam.fy;
  j["cx"] = cam.cx;
  j["cy"] = cam.cy;
  j["width"] = cam.width;
  j["height"] = cam.height;
  std::vector<double> rot(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot[static_cast<std::size_t>(r * 3 + c)] = cam.rotation(r, c);
  j["rotation"] = rot;
  j["translation"] = {cam.translation.x(), cam.translation.y(),
                      cam.translation.z()};
  return j;
}

CameraModel camera_from_json(const json& j) {
  CameraModel cam;
  cam.fx = j.at("fx").get<double>();
  cam.fy = j.at("fy").get<double>();
  cam.cx = j.at("cx").get<double>();
  cam.cy = j.at("cy").get<double>();
  cam.width = j.at("width").get<int>();
  cam.height = j.at("height").get<int>();
  auto rot = j.at("rotation").get<std::vector<double>>();
  if (rot.size() != 9) throw ParseError("camera: rotation must have 9 entries");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cam.rotation(r, c) = rot[static_cast<std::size_t>(r * 3 + c)];
  auto tr = j.at("translation").get<std::vector<double>>();
  if (tr.size() != 3) throw ParseError("camera: translation must have 3 entries");
  cam.translation = Eigen::Vector3d(tr[0], tr[1], tr[2]);
  cam.validate();
  return cam;
}

json box_to_json(const AgentBox& b) {
  json j;
  j["id"] = b.id;
  j["category"] = to_string(b.category);
  j["center"] = {b.center.x(), b.center.y(), b.center.z()};
  j["size"] = {b.size.x(), b.size.y(), b.size.z()};
  j["heading_deg"] = b.heading_deg;
  j["speed_mps"] = b.speed_mps;
  if (b.color) j["color"] = *b.color;
  j["relative_lane"] = b.relative_lane;
  return j;
}

AgentBox box_from_json(const json& j) {
  AgentBox b;
  b.id = j.value("id", std::string());
  b.category = agent_category_from_string(j.at("category").get<std::string>());
  auto c = j.at("center").get<std::vector<double>>();
  auto s = j.at("size").get<std::vector<double>>();
  if (c.size() != 3 || s.size() != 3) {
    throw ParseError("agent box: center/size must have 3 entries");
  }
  b.center = Eigen::Vector3d(c[0], c[1], c[2]);
  b.size = Eigen::Vector3d(s[0], s[1], s[2]);
  b.heading_deg = j.at("heading_deg").get<double>();
  b.speed_mps = j.at("speed_mps").get<double>();
  if (j.contains("color")) b.color = j.at("color").get<std::string>();
  b.relative_lane = j.value("relative_lane", 0);
  return b;
}

}  // namespace

void write_trajectory_log(const TrajectoryLog& log, std::ostream& out) {
  json header;
  header["rate_hz"] = log.rate_hz;
  if (log.camera) header["camera"] = camera_to_json(*log.camera);
  out << header.dump() << "\n";
  for (std::size_t i = 0; i < log.states.size(); ++i) {
    const EgoState& s = log.states[i];
    json j;
    j["t"] = s.t;
    j["x"] = s.x;
    j["y"] = s.y;
    j["heading_deg"] = s.heading_deg;
    j["speed_mps"] = s.speed_mps;
    if (s.lane_id) j["lane_id"] = *s.lane_id;
    if (i < log.boxes.size() && !log.boxes[i].empty()) {
      json arr = json::array();
      for (const AgentBox& b : log.boxes[i]) arr.push_back(box_to_json(b));
      j["boxes"] = arr;
    }
    out << j.dump() << "\n";
  }
}

TrajectoryLog read_trajectory_log(std::istream& in) {
  TrajectoryLog log;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      std::ostringstream msg;
      msg << "trajectory log line " << line_no << ": " << e.what();
      throw ParseError(msg.str());
    }
    if (!have_header) {
      if (!j.contains("rate_hz")) {
        throw ParseError("trajectory log: first line must carry rate_hz");
      }
      log.rate_hz = j.at("rate_hz").get<double>();
      if (log.rate_hz <= 0.0) throw ParseError("trajectory log: rate_hz must be positive");
      if (j.contains("camera")) log.camera = camera_from_json(j.at("camera"));
      have_header = true;
      continue;
    }
    EgoState s;
    s.t = j.at("t").get<double>();
    s.x = j.at("x").get<double>();
    s.y = j.at("y").get<double>();
    s.heading_deg = j.at("heading_deg").get<double>();
    s.speed_mps = j.at("speed_mps").get<double>();
    if (j.contains("lane_id")) s.lane_id = j.at("lane_id").get<int>();
    if (j.contains("boxes")) {
      log.boxes.resize(log.states.size() + 1);
      auto& frame_boxes = log.boxes[log.states.size()];
      for (const json& bj : j.at("boxes")) frame_boxes.push_back(box_from_json(bj));
    } else if (!log.boxes.empty()) {
      log.boxes.resize(log.states.size() + 1);
    }
    log.states.push_back(s);
  }
  if (!have_header) throw ParseError("trajectory log: empty file");
  return log;
}

void save_trajectory_log(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  write_trajectory_log(log, out);
}

TrajectoryLog load_trajectory_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trajectory log: " + path);
  return read_trajectory_log(in);
}

}  // namespace steerbench
