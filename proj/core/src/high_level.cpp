#include "steerbench/high_level.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "steerbench/errors.hpp"
#include "steerbench/prompts.hpp"

namespace steerbench {

namespace {

// printf would round ties to even (11.25 -> "11.2"); scene lines round half
// up instead, so 11.25 reads as 11.3.
std::string format_speed_1dp(double value) {
  double rounded = std::floor(value * 10.0 + 0.5) / 10.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", rounded);
  return buf;
}

std::string category_word(AgentCategory c) {
  switch (c) {
    case AgentCategory::car: return "car";
    case AgentCategory::truck: return "truck";
    case AgentCategory::pedestrian: return "pedestrian";
    case AgentCategory::cyclist: return "cyclist";
    case AgentCategory::emergency_vehicle: return "emergency vehicle";
    case AgentCategory::static_obstacle: return "obstacle";
  }
  return "agent";
}

std::string number_word(int n) {
  switch (n) {
    case 1: return "one";
    case 2: return "two";
    case 3: return "three";
    case 4: return "four";
    case 5: return "five";
    default: return std::to_string(n);
  }
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(s[0]));
  return s;
}

std::string referent_phrase(const AgentBox& box) {
  std::string noun = category_word(box.category);
  if (box.color) return "the " + *box.color + " " + noun;
  return "the " + noun;
}

// "a stopped car", "an accident", "an obstacle" for justifications.
std::string indefinite(const std::string& noun) {
  if (noun.empty()) return noun;
  switch (noun.front()) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return "an " + noun;
    default:
      return "a " + noun;
  }
}

double planar_distance(const EgoState& ego, const AgentBox& box) {
  return std::hypot(box.center.x() - ego.x, box.center.y() - ego.y);
}

bool opposite_direction(double ego_heading_deg, const AgentBox& box) {
  return std::abs(course_delta(ego_heading_deg, box.heading_deg)) > 90.0;
}

}  // namespace

std::string build_agent_line(const AgentBox& box, double ego_heading_deg) {
  std::string head;
  if (box.color) {
    head = capitalize(*box.color) + " " + category_word(box.category);
  } else {
    head = capitalize(category_word(box.category));
  }

  std::string lane;
  if (box.relative_lane == 0) {
    lane = "in the ego lane";
  } else {
    int n = std::abs(box.relative_lane);
    lane = "in " + number_word(n) + (n == 1 ? " lane" : " lanes") + " to the " +
           (box.relative_lane < 0 ? "left" : "right");
  }

  std::string direction =
      opposite_direction(ego_heading_deg, box) ? "opposite" : "same";

  std::string line = head + ", " + lane + ", traveling " + direction +
                     " direction, at " + format_speed_1dp(box.speed_mps) +
                     " m/s";
  if (box.category == AgentCategory::pedestrian) {
    line += ", maybe preparing to cross the street";
  }
  return line + ".";
}

std::vector<std::string> build_scene_lines(const Observation& obs,
                                           std::size_t max_lines) {
  std::vector<const AgentBox*> ranked;
  ranked.reserve(obs.agents.size());
  for (const AgentBox& box : obs.agents) ranked.push_back(&box);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](const AgentBox* a, const AgentBox* b) {
                     bool a_same = a->relative_lane == 0;
                     bool b_same = b->relative_lane == 0;
                     if (a_same != b_same) return a_same;
                     return planar_distance(obs.ego, *a) <
                            planar_distance(obs.ego, *b);
                   });
  std::vector<std::string> lines;
  for (const AgentBox* box : ranked) {
    if (lines.size() >= max_lines) break;
    lines.push_back(build_agent_line(*box, obs.ego.heading_deg));
  }
  return lines;
}

std::string describe_scene(const Observation& obs) {
  std::vector<std::string> lines = build_scene_lines(obs);
  if (lines.empty()) return "No critical agents visible.";
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += " ";
    out += lines[i];
  }
  return out;
}

std::string build_reasoning_label(const MetaAction& action) {
  MetaAction meta = normalize_meta_action(action);
  std::string ref = meta.referent.value_or("");

  if (meta.speed == SpeedBehavior::stationary) {
    if (!ref.empty()) {
      return "The vehicle is stopped, waiting for " + ref + " to clear.";
    }
    return "The vehicle is stopped, waiting for the scene to clear.";
  }
  if (meta.speed == SpeedBehavior::stop) {
    if (!ref.empty()) {
      return "The vehicle comes to a stop for " + ref + ".";
    }
    return "The situation ahead requires a stop, so the vehicle halts.";
  }

  switch (meta.heading) {
    case HeadingBehavior::lane_change_left:
      return "The lane ahead is blocked, so the vehicle changes lanes to the "
             "left to make progress.";
    case HeadingBehavior::lane_change_right:
      return "The lane ahead is blocked, so the vehicle changes lanes to the "
             "right to make progress.";
    case HeadingBehavior::turn_left:
      return "Following the route, the vehicle turns left.";
    case HeadingBehavior::turn_right:
      return "Following the route, the vehicle turns right.";
    case HeadingBehavior::u_turn:
      return "Following the route, the vehicle makes a U-turn.";
    case HeadingBehavior::adjust_left:
      return "The vehicle shifts left within its lane to keep a safe margin.";
    case HeadingBehavior::adjust_right:
      return "The vehicle shifts right within its lane to keep a safe margin.";
    default:
      break;
  }

  if (meta.speed == SpeedBehavior::decelerate) {
    if (!ref.empty()) {
      return "The vehicle slows down before stopping for " + ref + ".";
    }
    return "Conditions ahead require caution, so the vehicle slows down.";
  }
  return "The road ahead is clear, so the vehicle proceeds.";
}

// ---------------------------------------------------------------------------
// Rule-based decision

namespace {

std::string compose_trace(const Observation& obs,
                          const std::string& justification) {
  std::ostringstream out;
  for (const std::string& line : build_scene_lines(obs)) {
    out << line << "\n";
  }
  if (obs.ego.speed_mps < 0.5) {
    out << "I am currently stopped.\n";
  } else {
    out << "I am driving at " << format_speed_1dp(obs.ego.speed_mps)
        << " m/s.\n";
  }
  out << justification;
  return out.str();
}

SpeedIntensity intensity_for_gap(double ego_speed, double agent_speed,
                                 double gap_m) {
  double closing = std::max(0.0, ego_speed - agent_speed);
  double usable = std::max(gap_m - 6.0, 1.0);
  double required = closing * closing / (2.0 * usable);
  if (required >= 1.6) return SpeedIntensity::rapid;
  if (required >= 0.6) return SpeedIntensity::normal;
  return SpeedIntensity::slight;
}

struct BlockerScan {
  const AgentBox* nearest = nullptr;
  double distance = 0.0;
  int stopped_cluster = 0;  // stopped vehicles near the nearest blocker
};

bool is_blocker(const Observation& obs, const AgentBox& box) {
  if (box.relative_lane != 0) return false;
  if (box.category == AgentCategory::pedestrian) return false;
  if (opposite_direction(obs.ego.heading_deg, box) &&
      box.category != AgentCategory::static_obstacle && box.speed_mps > 0.5) {
    return false;  // oncoming traffic in our lane is handled as a crosser
  }
  return box.speed_mps < 1.0 || box.speed_mps < obs.ego.speed_mps - 1.0;
}

BlockerScan find_blocker(const Observation& obs) {
  BlockerScan scan;
  double best = 1e18;
  for (const AgentBox& box : obs.agents) {
    if (!is_blocker(obs, box)) continue;
    double d = planar_distance(obs.ego, box);
    if (d < best) {
      best = d;
      scan.nearest = &box;
      scan.distance = d;
    }
  }
  if (scan.nearest) {
    for (const AgentBox& box : obs.agents) {
      bool vehicle = box.category == AgentCategory::car ||
                     box.category == AgentCategory::truck;
      if (vehicle && box.speed_mps < 0.5 &&
          std::hypot(box.center.x() - scan.nearest->center.x(),
                     box.center.y() - scan.nearest->center.y()) < 15.0) {
        ++scan.stopped_cluster;
      }
    }
  }
  return scan;
}

// A lane is clear when no same-direction agent occupies it within 40 m and
// no oncoming agent is visible in it at any range.
const AgentBox* lane_occupant(const Observation& obs, int relative_lane) {
  const AgentBox* found = nullptr;
  double best = 1e18;
  for (const AgentBox& box : obs.agents) {
    if (box.relative_lane != relative_lane) continue;
    bool oncoming = opposite_direction(obs.ego.heading_deg, box);
    double d = planar_distance(obs.ego, box);
    if (!oncoming && d > 40.0) continue;
    if (d < best) {
      best = d;
      found = &box;
    }
  }
  return found;
}

std::string blocker_noun(const BlockerScan& scan) {
  if (scan.stopped_cluster >= 2) return "an accident";
  const AgentBox& box = *scan.nearest;
  std::string noun = category_word(box.category);
  if (box.category == AgentCategory::static_obstacle) return indefinite(noun);
  if (box.speed_mps < 0.5) return indefinite("stopped " + noun);
  return indefinite("slow " + noun);
}

}  // namespace

DecisionRecord decide_rule_based(const Observation& obs) {
  const double lane_w = obs.road.lane_width;
  const double ego_speed = obs.ego.speed_mps;
  Polyline lane_line(obs.road.centerline);

  MetaAction meta;  // maintain / straight / normally
  std::string justification;
  bool decided = false;

  auto choose = [&](const MetaAction& m, const std::string& j) {
    meta = m;
    justification = j;
    decided = true;
  };

  // 1. Vulnerable road users in or entering the ego lane.
  {
    const AgentBox* ped = nullptr;
    double ped_d = 1e18;
    for (const AgentBox& box : obs.agents) {
      if (box.category != AgentCategory::pedestrian) continue;
      double d = planar_distance(obs.ego, box);
      if (d < ped_d) {
        ped = &box;
        ped_d = d;
      }
    }
    if (ped && ped_d <= 20.0) {
      double offset =
          lane_line.project(Point2{ped->center.x(), ped->center.y()}).offset;
      Point2 vel = heading_direction(ped->heading_deg);
      Point2 lane_dir = lane_line.direction_at(
          lane_line.project(Point2{obs.ego.x, obs.ego.y}).s);
      Point2 lane_right = right_normal(lane_dir);
      double lateral_vel =
          ped->speed_mps * (vel.x * lane_right.x + vel.y * lane_right.y);
      bool approaching = offset * lateral_vel < -0.05;
      MetaAction m;
      m.style = DrivingStyle::cautiously;
      m.referent = "the pedestrian";
      if (std::abs(offset) <= lane_w && ped_d <= 12.0) {
        m.speed = SpeedBehavior::stop;
        choose(m, "A pedestrian is in my lane just ahead, so I should stop "
                  "and wait for them to clear.");
      } else if (std::abs(offset) <= lane_w) {
        m.speed = SpeedBehavior::decelerate;
        m.speed_intensity = SpeedIntensity::rapid;
        choose(m, "A pedestrian is entering my lane ahead, so I should slow "
                  "down and prepare to stop.");
      } else if (std::abs(offset) <= 2.0 * lane_w && approaching) {
        m.speed = SpeedBehavior::decelerate;
        choose(m, "A pedestrian near the roadside may cross, so I should "
                  "slow down and stay alert.");
      }
    }
  }

  // 2. Traffic crossing the ego path.
  if (!decided) {
    const AgentBox* crosser = nullptr;
    double cross_d = 1e18;
    for (const AgentBox& box : obs.agents) {
      bool vehicle = box.category == AgentCategory::car ||
                     box.category == AgentCategory::truck ||
                     box.category == AgentCategory::cyclist;
      if (!vehicle || box.speed_mps < 0.5) continue;
      double cd = std::abs(course_delta(obs.ego.heading_deg, box.heading_deg));
      if (cd < 55.0 || cd > 125.0) continue;
      double d = planar_distance(obs.ego, box);
      if (d <= 35.0 && d < cross_d) {
        crosser = &box;
        cross_d = d;
      }
    }
    if (crosser) {
      MetaAction m;
      m.style = DrivingStyle::cautiously;
      m.referent = referent_phrase(*crosser);
      if (cross_d <= 15.0) {
        m.speed = SpeedBehavior::stop;
      } else {
        m.speed = SpeedBehavior::decelerate;
        m.speed_intensity = SpeedIntensity::rapid;
      }
      choose(m, "A vehicle is crossing my path ahead, so I should slow down "
                "and let it pass.");
    }
  }

  // 3. Emergency vehicles get room.
  if (!decided) {
    for (const AgentBox& box : obs.agents) {
      if (box.category != AgentCategory::emergency_vehicle) continue;
      MetaAction m;
      m.speed = SpeedBehavior::decelerate;
      m.speed_intensity = SpeedIntensity::slight;
      m.heading = HeadingBehavior::adjust_right;
      m.style = DrivingStyle::cautiously;
      choose(m, "An emergency vehicle is approaching, so I should slow down "
                "and keep to the right.");
      break;
    }
  }

  // 4. Same-lane blockers: pass, wait, or slow down.
  if (!decided) {
    BlockerScan scan = find_blocker(obs);
    if (scan.nearest && scan.distance <= 30.0) {
      int target_rel = obs.road.lanes_left >= 1
                           ? -1
                           : (obs.road.lanes_right >= 1 ? 1 : 0);
      const AgentBox* occupant =
          target_rel != 0 ? lane_occupant(obs, target_rel) : nullptr;
      bool clear = target_rel != 0 && occupant == nullptr;
      std::string noun = blocker_noun(scan);

      if (clear && scan.distance <= 20.0) {
        MetaAction m;
        m.heading = target_rel < 0 ? HeadingBehavior::lane_change_left
                                   : HeadingBehavior::lane_change_right;
        m.style = DrivingStyle::smoothly;
        m.speed = ego_speed < 0.7 * obs.speed_limit_mps
                      ? SpeedBehavior::accelerate
                      : SpeedBehavior::maintain;
        m.speed_intensity = SpeedIntensity::slight;
        std::string side = target_rel < 0 ? "left" : "right";
        choose(m, "There is " + noun + " in my lane ahead, so I should "
                  "change lanes to the " + side + " to pass.");
      } else if (ego_speed < 0.5) {
        MetaAction m;
        m.speed = SpeedBehavior::stationary;
        m.style = DrivingStyle::cautiously;
        const AgentBox* oncoming =
            occupant && opposite_direction(obs.ego.heading_deg, *occupant)
                ? occupant
                : nullptr;
        if (oncoming) {
          std::string word = category_word(oncoming->category);
          choose(m, "There is " + indefinite(word) + " in the oncoming lane "
                    "and " + noun + " ahead of me, so I should wait within "
                    "my lane until the oncoming " + word + " is clear.");
        } else if (occupant) {
          choose(m, "I am stopped behind " + noun + " until the adjacent "
                    "lane is clear.");
        } else {
          choose(m, "I am stopped behind " + noun + ", waiting for space to "
                    "continue.");
        }
      } else if (scan.distance <= 12.0) {
        MetaAction m;
        m.speed = SpeedBehavior::stop;
        m.style = DrivingStyle::cautiously;
        m.referent = referent_phrase(*scan.nearest);
        choose(m, "There is " + noun + " in my lane just ahead, so I should "
                  "stop behind it.");
      } else {
        MetaAction m;
        m.speed = SpeedBehavior::decelerate;
        m.speed_intensity =
            intensity_for_gap(ego_speed, scan.nearest->speed_mps, scan.distance);
        m.style = DrivingStyle::cautiously;
        m.referent = referent_phrase(*scan.nearest);
        choose(m, "There is " + noun + " ahead in my lane, so I should slow "
                  "down.");
      }
    }
  }

  // 5. Routing commands when nothing hazardous demands attention.
  if (!decided) {
    switch (obs.routing.kind) {
      case RoutingKind::turn_left:
      case RoutingKind::turn_right: {
        bool near = !obs.routing.distance_m || *obs.routing.distance_m <= 25.0;
        if (near) {
          MetaAction m;
          m.heading = obs.routing.kind == RoutingKind::turn_left
                          ? HeadingBehavior::turn_left
                          : HeadingBehavior::turn_right;
          m.speed = SpeedBehavior::decelerate;
          m.speed_intensity = SpeedIntensity::slight;
          std::string side =
              obs.routing.kind == RoutingKind::turn_left ? "left" : "right";
          choose(m, "The route turns " + side + " ahead, so the vehicle "
                    "prepares to turn.");
        }
        break;
      }
      case RoutingKind::lane_change_left:
      case RoutingKind::lane_change_right: {
        int rel = obs.routing.kind == RoutingKind::lane_change_left ? -1 : 1;
        int available = rel < 0 ? obs.road.lanes_left : obs.road.lanes_right;
        if (available >= 1 && lane_occupant(obs, rel) == nullptr) {
          MetaAction m;
          m.heading = rel < 0 ? HeadingBehavior::lane_change_left
                              : HeadingBehavior::lane_change_right;
          m.style = DrivingStyle::smoothly;
          std::string side = rel < 0 ? "left" : "right";
          choose(m, "The route requires a lane change to the " + side + ".");
        }
        break;
      }
      case RoutingKind::stop: {
        MetaAction m;
        m.speed = ego_speed < 0.3 ? SpeedBehavior::stationary
                                  : SpeedBehavior::stop;
        m.style = DrivingStyle::cautiously;
        choose(m, "The route ends here, so the vehicle comes to a stop.");
        break;
      }
      case RoutingKind::follow_road:
        break;
    }
  }

  // 6. Free road.
  if (!decided) {
    MetaAction m;
    m.speed = ego_speed < 0.9 * obs.speed_limit_mps ? SpeedBehavior::accelerate
                                                    : SpeedBehavior::maintain;
    choose(m, "The road ahead is clear, so the vehicle proceeds.");
  }

  // A commanded stop at standstill is simply holding still.
  if (meta.speed == SpeedBehavior::stop && ego_speed < 0.3) {
    meta.speed = SpeedBehavior::stationary;
  }

  DecisionRecord record;
  record.meta = normalize_meta_action(meta);
  record.reasoning = compose_trace(obs, justification);
  return record;
}

// ---------------------------------------------------------------------------
// Model-backed decision

std::string format_speed_history(const HistorySnapshot& history) {
  std::string out;
  for (double v : history.speeds_mps) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f m/s ", v);
    out += buf;
  }
  return out;
}

std::string format_heading_history(const HistorySnapshot& history) {
  std::string out;
  for (std::size_t i = 0; i < history.headings_deg.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f degrees", history.headings_deg[i]);
    if (i) out += " ";
    out += buf;
  }
  return out;
}

std::map<std::string, std::string> zero_shot_values(const Observation& obs) {
  char current[32];
  std::snprintf(current, sizeof(current), "%.1f m/s", obs.ego.speed_mps);
  return {
      {"image", describe_scene(obs)},
      {"speed_history", format_speed_history(obs.history)},
      {"heading_history", format_heading_history(obs.history)},
      {"current_speed", current},
      {"routing_command", obs.routing.text},
  };
}

namespace {

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Index of the last line starting with the given section marker ("1."/"2.").
std::ptrdiff_t find_section(const std::vector<std::string>& lines,
                            const std::string& marker) {
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(lines.size()) - 1; i >= 0;
       --i) {
    std::string s = strip(lines[static_cast<std::size_t>(i)]);
    if (s.rfind(marker, 0) == 0) return i;
  }
  return -1;
}

bool parses_as_meta(const std::string& sentence) {
  try {
    parse_meta_action(sentence);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

}  // namespace

std::string extract_plan_sentence(const std::string& response) {
  std::vector<std::string> lines = split_lines(response);
  std::ptrdiff_t start = find_section(lines, "2.");
  if (start >= 0) {
    // The marker line itself may carry the sentence after the "2.".
    std::string first = strip(lines[static_cast<std::size_t>(start)]);
    first = unquote(strip(first.substr(2)));
    if (!first.empty() && parses_as_meta(first)) return first;
    for (std::size_t i = static_cast<std::size_t>(start) + 1; i < lines.size();
         ++i) {
      std::string candidate = unquote(strip(lines[i]));
      if (!candidate.empty() && parses_as_meta(candidate)) return candidate;
    }
  }
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    std::string candidate = unquote(strip(*it));
    if (!candidate.empty() && parses_as_meta(candidate)) return candidate;
  }
  throw ParseError("no parseable plan sentence in model response");
}

std::string extract_description(const std::string& response) {
  std::vector<std::string> lines = split_lines(response);
  std::ptrdiff_t one = find_section(lines, "1.");
  std::ptrdiff_t two = find_section(lines, "2.");
  if (one < 0) return strip(response);
  std::ostringstream out;
  std::string head = strip(lines[static_cast<std::size_t>(one)]).substr(2);
  head = unquote(strip(head));
  if (!head.empty()) out << head;
  std::ptrdiff_t end = two > one ? two : static_cast<std::ptrdiff_t>(lines.size());
  for (std::ptrdiff_t i = one + 1; i < end; ++i) {
    std::string s = unquote(strip(lines[static_cast<std::size_t>(i)]));
    if (s.empty()) continue;
    if (out.tellp() > 0) out << " ";
    out << s;
  }
  return out.str();
}

DecisionRecord decide_model_backed(const Observation& obs, VlmClient& client,
                                   const ModelPolicyOptions& options) {
  ChatRequest request;
  request.prompt = build_prompt(PromptKind::zero_shot_plan, zero_shot_values(obs));
  request.model_id = options.model_id;
  request.temperature = options.temperature;
  request.max_tokens = options.max_tokens;

  std::string response = client.complete(request);
  try {
    std::string sentence = extract_plan_sentence(response);
    DecisionRecord record;
    record.meta = normalize_meta_action(parse_meta_action(sentence));
    std::string description = extract_description(response);
    record.reasoning = description.empty() ? sentence : description;
    record.length_warning = word_count(sentence) > 20;
    return record;
  } catch (const ParseError&) {
    DecisionRecord record = decide_rule_based(obs);
    record.fallback_used = true;
    return record;
  }
}

// ---------------------------------------------------------------------------
// Policy stacks

ChunkTracker::ChunkTracker(ControllerParams params) : params_(params) {}

void ChunkTracker::reset() {
  longitudinal_.reset();
  lateral_.reset();
  has_chunk_ = false;
  chunk_age_ = 0.0;
  chunk_ = ActionChunk{};
  last_meta_ = MetaAction{};
}

Controls ChunkTracker::act(const Observation& obs, const MetaAction& meta,
                           double dt) {
  VehicleState state{obs.ego.x, obs.ego.y, obs.ego.heading_deg,
                     obs.ego.speed_mps};
  MetaAction normalized = normalize_meta_action(meta);
  if (!has_chunk_ || !normalized.fields_equal(last_meta_) ||
      chunk_age_ >= replan_period_s_) {
    try {
      chunk_ = plan_waypoints(state, normalized, obs.road, params_);
    } catch (const InfeasibleManeuverError&) {
      MetaAction safe = normalized;
      safe.heading = HeadingBehavior::straight;
      safe.heading_extent = HeadingExtent::normal;
      chunk_ = plan_waypoints(state, safe, obs.road, params_);
    }
    last_meta_ = normalized;
    has_chunk_ = true;
    chunk_age_ = 0.0;
  }

  // Drop consumed timed waypoints so the tracked speed follows the profile.
  ActionChunk view = chunk_;
  auto consumed = static_cast<std::size_t>(chunk_age_ / ActionChunk::kTimeSpacing);
  if (consumed > 0 && view.time_wps.size() >= 2) {
    consumed = std::min(consumed, view.time_wps.size() - 2);
    view.time_wps.erase(view.time_wps.begin(),
                        view.time_wps.begin() +
                            static_cast<std::ptrdiff_t>(consumed));
  }
  Controls controls = track_waypoints(view, state, longitudinal_, lateral_, dt,
                                      params_);
  chunk_age_ += dt;
  return controls;
}

ReferencePolicyStack::ReferencePolicyStack(ControllerParams params)
    : tracker_(params) {}

void ReferencePolicyStack::reset() { tracker_.reset(); }

DecisionRecord ReferencePolicyStack::decide(const Observation& obs) {
  return decide_rule_based(obs);
}

Controls ReferencePolicyStack::act(const Observation& obs,
                                   const MetaAction& meta) {
  return tracker_.act(obs, meta, obs.dt);
}

ModelPolicyStack::ModelPolicyStack(std::shared_ptr<VlmClient> client,
                                   ModelPolicyOptions options,
                                   ControllerParams params)
    : client_(std::move(client)), options_(std::move(options)), tracker_(params) {
  if (!client_) throw InvalidArgumentError("ModelPolicyStack needs a client");
}

void ModelPolicyStack::reset() { tracker_.reset(); }

DecisionRecord ModelPolicyStack::decide(const Observation& obs) {
  return decide_model_backed(obs, *client_, options_);
}

Controls ModelPolicyStack::act(const Observation& obs, const MetaAction& meta) {
  return tracker_.act(obs, meta, obs.dt);
}

}  // namespace steerbench
