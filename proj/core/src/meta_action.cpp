#include "steerbench/meta_action.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

#include "steerbench/errors.hpp"

namespace steerbench {

std::string to_string(SpeedBehavior v) {
  switch (v) {
    case SpeedBehavior::accelerate: return "accelerate";
    case SpeedBehavior::decelerate: return "decelerate";
    case SpeedBehavior::maintain: return "maintain";
    case SpeedBehavior::stop: return "stop";
    case SpeedBehavior::stationary: return "stationary";
  }
  return "maintain";
}

std::string to_string(SpeedIntensity v) {
  switch (v) {
    case SpeedIntensity::slight: return "slight";
    case SpeedIntensity::normal: return "normal";
    case SpeedIntensity::rapid: return "rapid";
  }
  return "normal";
}

std::string to_string(HeadingBehavior v) {
  switch (v) {
    case HeadingBehavior::straight: return "straight";
    case HeadingBehavior::adjust_left: return "adjust_left";
    case HeadingBehavior::adjust_right: return "adjust_right";
    case HeadingBehavior::turn_left: return "turn_left";
    case HeadingBehavior::turn_right: return "turn_right";
    case HeadingBehavior::lane_change_left: return "lane_change_left";
    case HeadingBehavior::lane_change_right: return "lane_change_right";
    case HeadingBehavior::u_turn: return "u_turn";
  }
  return "straight";
}

std::string to_string(HeadingExtent v) {
  switch (v) {
    case HeadingExtent::slight: return "slight";
    case HeadingExtent::normal: return "normal";
    case HeadingExtent::sharp: return "sharp";
    case HeadingExtent::wide: return "wide";
    case HeadingExtent::smooth: return "smooth";
  }
  return "normal";
}

std::string to_string(DrivingStyle v) {
  switch (v) {
    case DrivingStyle::cautiously: return "cautiously";
    case DrivingStyle::normally: return "normally";
    case DrivingStyle::aggressively: return "aggressively";
    case DrivingStyle::smoothly: return "smoothly";
    case DrivingStyle::assertively: return "assertively";
  }
  return "normally";
}

namespace {

template <typename T>
T enum_from_string(const std::string& s,
                   std::initializer_list<std::pair<const char*, T>> table,
                   const char* what) {
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  throw InvalidArgumentError(std::string("unknown ") + what + ": " + s);
}

}  // namespace

SpeedBehavior speed_behavior_from_string(const std::string& s) {
  return enum_from_string<SpeedBehavior>(
      s,
      {{"accelerate", SpeedBehavior::accelerate},
       {"decelerate", SpeedBehavior::decelerate},
       {"maintain", SpeedBehavior::maintain},
       {"stop", SpeedBehavior::stop},
       {"stationary", SpeedBehavior::stationary}},
      "speed behavior");
}

SpeedIntensity speed_intensity_from_string(const std::string& s) {
  return enum_from_string<SpeedIntensity>(
      s,
      {{"slight", SpeedIntensity::slight},
       {"normal", SpeedIntensity::normal},
       {"rapid", SpeedIntensity::rapid}},
      "speed intensity");
}

HeadingBehavior heading_behavior_from_string(const std::string& s) {
  return enum_from_string<HeadingBehavior>(
      s,
      {{"straight", HeadingBehavior::straight},
       {"adjust_left", HeadingBehavior::adjust_left},
       {"adjust_right", HeadingBehavior::adjust_right},
       {"turn_left", HeadingBehavior::turn_left},
       {"turn_right", HeadingBehavior::turn_right},
       {"lane_change_left", HeadingBehavior::lane_change_left},
       {"lane_change_right", HeadingBehavior::lane_change_right},
       {"u_turn", HeadingBehavior::u_turn}},
      "heading behavior");
}

HeadingExtent heading_extent_from_string(const std::string& s) {
  return enum_from_string<HeadingExtent>(
      s,
      {{"slight", HeadingExtent::slight},
       {"normal", HeadingExtent::normal},
       {"sharp", HeadingExtent::sharp},
       {"wide", HeadingExtent::wide},
       {"smooth", HeadingExtent::smooth}},
      "heading extent");
}

DrivingStyle driving_style_from_string(const std::string& s) {
  return enum_from_string<DrivingStyle>(
      s,
      {{"cautiously", DrivingStyle::cautiously},
       {"normally", DrivingStyle::normally},
       {"aggressively", DrivingStyle::aggressively},
       {"smoothly", DrivingStyle::smoothly},
       {"assertively", DrivingStyle::assertively}},
      "driving style");
}

MetaAction normalize_meta_action(MetaAction m) {
  if (m.speed == SpeedBehavior::stationary) {
    m.heading = HeadingBehavior::straight;
    m.speed_intensity = SpeedIntensity::normal;
  }
  if (m.speed == SpeedBehavior::stop) {
    m.heading = HeadingBehavior::straight;
  }
  if (m.speed == SpeedBehavior::maintain) {
    m.speed_intensity = SpeedIntensity::normal;
  }
  if (m.heading == HeadingBehavior::straight) {
    m.heading_extent = HeadingExtent::normal;
  }
  return m;
}

bool is_structurally_valid(const MetaAction& m) {
  return normalize_meta_action(m).fields_equal(m);
}

namespace {

bool is_lane_change(HeadingBehavior h) {
  return h == HeadingBehavior::lane_change_left ||
         h == HeadingBehavior::lane_change_right;
}

const char* intensity_adverb(SpeedIntensity v) {
  switch (v) {
    case SpeedIntensity::slight: return " slightly";
    case SpeedIntensity::rapid: return " rapidly";
    case SpeedIntensity::normal: break;
  }
  return "";
}

const char* extent_adjective(HeadingExtent v) {
  switch (v) {
    case HeadingExtent::slight: return " slight";
    case HeadingExtent::sharp: return " sharp";
    case HeadingExtent::wide: return " wide";
    case HeadingExtent::smooth: return " smooth";
    case HeadingExtent::normal: break;
  }
  return "";
}

const char* extent_adverb(HeadingExtent v) {
  switch (v) {
    case HeadingExtent::slight: return "slightly";
    case HeadingExtent::sharp: return "sharply";
    case HeadingExtent::wide: return "widely";
    case HeadingExtent::smooth: return "smoothly";
    case HeadingExtent::normal: break;
  }
  return "";
}

std::string referent_clause(const MetaAction& m) {
  if (!m.referent || m.referent->empty()) return "";
  if (m.speed == SpeedBehavior::decelerate) {
    return " before stopping for " + *m.referent;
  }
  return " to follow " + *m.referent;
}

std::string heading_phrase(const MetaAction& m, const char*& direction) {
  direction = "";
  switch (m.heading) {
    case HeadingBehavior::straight:
      return "continues straight";
    case HeadingBehavior::adjust_left:
      direction = "left";
      break;
    case HeadingBehavior::adjust_right:
      direction = "right";
      break;
    case HeadingBehavior::turn_left:
      direction = "left";
      break;
    case HeadingBehavior::turn_right:
      direction = "right";
      break;
    case HeadingBehavior::u_turn:
      return std::string("makes a") + extent_adjective(m.heading_extent) + " U-turn";
    default:
      break;
  }
  std::string noun =
      (m.heading == HeadingBehavior::adjust_left ||
       m.heading == HeadingBehavior::adjust_right)
          ? "adjustment"
          : "turn";
  return std::string("makes a") + extent_adjective(m.heading_extent) + " " +
         direction + " " + noun;
}

}  // namespace

std::string render_meta_action(const MetaAction& input) {
  MetaAction m = normalize_meta_action(input);
  const std::string style_adv = to_string(m.style);

  if (m.speed == SpeedBehavior::stationary) {
    std::string s = "The vehicle remains stationary";
    if (m.style != DrivingStyle::normally) s += ", waiting " + style_adv;
    s += ".";
    return s;
  }

  if (m.speed == SpeedBehavior::stop) {
    std::string s = "The vehicle ";
    if (m.style != DrivingStyle::normally) s += style_adv + " ";
    s += "comes to ";
    switch (m.speed_intensity) {
      case SpeedIntensity::slight: s += "a gentle stop"; break;
      case SpeedIntensity::rapid: s += "an abrupt stop"; break;
      case SpeedIntensity::normal: s += "a stop"; break;
    }
    if (m.referent && !m.referent->empty()) s += " for " + *m.referent;
    s += ".";
    return s;
  }

  if (is_lane_change(m.heading)) {
    std::string s = "The vehicle is ";
    if (m.heading_extent != HeadingExtent::normal) {
      s += std::string(extent_adverb(m.heading_extent)) + " ";
    }
    s += "changing lanes ";
    s += (m.heading == HeadingBehavior::lane_change_left) ? "left" : "right";
    s += " " + style_adv;
    if (m.speed == SpeedBehavior::accelerate) {
      s += std::string(" while accelerating") + intensity_adverb(m.speed_intensity);
    } else if (m.speed == SpeedBehavior::decelerate) {
      s += std::string(" while decelerating") + intensity_adverb(m.speed_intensity);
    }
    s += referent_clause(m);
    s += ".";
    return s;
  }

  std::string speed_phrase;
  switch (m.speed) {
    case SpeedBehavior::accelerate:
      speed_phrase = std::string("accelerates") + intensity_adverb(m.speed_intensity);
      break;
    case SpeedBehavior::decelerate:
      speed_phrase = std::string("decelerates") + intensity_adverb(m.speed_intensity);
      break;
    default:
      speed_phrase = "maintains speed";
      break;
  }

  const char* direction = "";
  std::string s = "The vehicle " + speed_phrase + " and ";
  if (m.style != DrivingStyle::normally) s += style_adv + " ";
  s += heading_phrase(m, direction);
  if (m.style == DrivingStyle::normally) s += ", driving normally";
  s += referent_clause(m);
  s += ".";
  return s;
}

namespace {

struct Token {
  std::string text;
  const VocabEntry* entry = nullptr;
};

std::vector<Token> tokenize(const std::string& text, const Vocabulary& vocab) {
  std::vector<Token> tokens;
  std::string current;
  auto flush = [&]() {
    if (!current.empty()) {
      Token tok;
      tok.text = current;
      tok.entry = vocab.match(current);
      tokens.push_back(std::move(tok));
      current.clear();
    }
  };
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (raw == '-' || raw == '\'') {
      // "U-turn" and possessives join into a single token.
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::string to_lower(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

// Referent clauses are cut out before keyword scanning so that e.g.
// "before stopping for a sign" cannot hijack the speed field.
struct ReferentPattern {
  const char* needle;
  std::size_t keep;  // bytes of the needle that stay with the sentence
};

constexpr ReferentPattern kReferentPatterns[] = {
    {" before stopping for ", 0},
    {" to follow ", 0},
    {" to avoid ", 0},
    {" to yield to ", 0},
    {" stopping for ", 9},
    {" stops for ", 6},
    {" stop for ", 5},
};

std::string strip_trailing_punct(std::string s) {
  while (!s.empty()) {
    char c = s.back();
    if (c == '.' || c == '!' || c == '?' || c == ',' || c == ';' ||
        std::isspace(static_cast<unsigned char>(c))) {
      s.pop_back();
    } else {
      break;
    }
  }
  return s;
}

struct HeadingCandidate {
  HeadingBehavior behavior = HeadingBehavior::straight;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;  // inclusive
  bool lane_change = false;
};

bool direction_at(const std::vector<Token>& tokens, std::size_t i,
                  bool& is_left) {
  if (i >= tokens.size()) return false;
  const VocabEntry* e = tokens[i].entry;
  if (!e || e->field != VocabField::direction) return false;
  is_left = (e->value == "left");
  return true;
}

// Nearest direction word: one before the keyword, else up to three after
// ("left turn", "turns left", "turn to the left").
bool find_direction(const std::vector<Token>& tokens, std::size_t i,
                    bool& is_left, std::size_t& dir_index) {
  if (i > 0 && direction_at(tokens, i - 1, is_left)) {
    dir_index = i - 1;
    return true;
  }
  for (std::size_t j = i + 1; j <= i + 3 && j < tokens.size(); ++j) {
    if (direction_at(tokens, j, is_left)) {
      dir_index = j;
      return true;
    }
  }
  return false;
}

}  // namespace

MetaAction parse_meta_action(const std::string& text, const Vocabulary& vocab) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ParseError("parse_meta_action: empty text");
  }

  MetaAction m;
  m.raw_text = text;

  std::string lower = to_lower(text);
  std::string work = text;
  std::size_t best_pos = std::string::npos;
  std::size_t best_end = 0;
  std::size_t best_len = 0;
  const ReferentPattern* best_pattern = nullptr;
  for (const ReferentPattern& p : kReferentPatterns) {
    std::size_t len = std::string(p.needle).size();
    std::size_t pos = lower.rfind(p.needle);
    if (pos == std::string::npos) continue;
    std::size_t end = pos + len;
    // Rightmost clause wins; on a shared end the longer needle is the outer
    // pattern ("before stopping for" contains "stopping for").
    if (best_pattern == nullptr || end > best_end ||
        (end == best_end && len > best_len)) {
      best_pos = pos;
      best_end = end;
      best_len = len;
      best_pattern = &p;
    }
  }
  if (best_pattern) {
    std::string ref = text.substr(best_pos + std::string(best_pattern->needle).size());
    ref = strip_trailing_punct(ref);
    if (!ref.empty()) m.referent = ref;
    work = text.substr(0, best_pos + best_pattern->keep);
  }

  std::vector<Token> tokens = tokenize(work, vocab);
  std::vector<bool> consumed(tokens.size(), false);

  // Speed: the final phase wins in multi-phase sentences.
  std::size_t speed_index = tokens.size();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const VocabEntry* e = tokens[i].entry;
    if (e && e->field == VocabField::speed) speed_index = i;
  }
  bool have_speed = speed_index < tokens.size();
  if (have_speed) {
    m.speed = speed_behavior_from_string(tokens[speed_index].entry->value);
  }

  // Heading: collect candidates, keep the last one.
  std::vector<HeadingCandidate> candidates;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const VocabEntry* e = tokens[i].entry;
    if (!e) continue;
    if (e->field == VocabField::heading) {
      HeadingCandidate cand;
      cand.span_begin = cand.span_end = i;
      bool is_left = false;
      std::size_t dir_index = 0;
      if (e->value == "straight") {
        cand.behavior = HeadingBehavior::straight;
      } else if (e->value == "u_turn") {
        cand.behavior = HeadingBehavior::u_turn;
      } else if (e->value == "turn") {
        if (!find_direction(tokens, i, is_left, dir_index)) continue;
        cand.behavior = is_left ? HeadingBehavior::turn_left
                                : HeadingBehavior::turn_right;
        cand.span_begin = std::min(i, dir_index);
        cand.span_end = std::max(i, dir_index);
      } else if (e->value == "adjust") {
        if (!find_direction(tokens, i, is_left, dir_index)) continue;
        cand.behavior = is_left ? HeadingBehavior::adjust_left
                                : HeadingBehavior::adjust_right;
        cand.span_begin = std::min(i, dir_index);
        cand.span_end = std::max(i, dir_index);
      } else if (e->value == "lane_change") {
        if (!find_direction(tokens, i, is_left, dir_index)) continue;
        cand.behavior = is_left ? HeadingBehavior::lane_change_left
                                : HeadingBehavior::lane_change_right;
        cand.lane_change = true;
        cand.span_begin = std::min(i, dir_index);
        cand.span_end = std::max(i, dir_index);
      }
      candidates.push_back(cand);
    } else if (e->field == VocabField::marker && e->value == "change") {
      // "changing lanes left" / "lane change to the right"
      std::size_t lane_index = tokens.size();
      for (std::size_t j = (i >= 2 ? i - 2 : 0); j <= i + 2 && j < tokens.size(); ++j) {
        const VocabEntry* le = tokens[j].entry;
        if (le && le->field == VocabField::marker && le->value == "lane") {
          lane_index = j;
          break;
        }
      }
      if (lane_index == tokens.size()) continue;
      std::size_t lo = std::min(i, lane_index);
      std::size_t hi = std::max(i, lane_index);
      bool is_left = false;
      std::size_t dir_index = 0;
      bool found = false;
      for (std::size_t j = hi + 1; j <= hi + 3 && j < tokens.size(); ++j) {
        if (direction_at(tokens, j, is_left)) {
          dir_index = j;
          found = true;
          break;
        }
      }
      if (!found && lo > 0 && direction_at(tokens, lo - 1, is_left)) {
        dir_index = lo - 1;
        found = true;
      }
      if (!found) continue;
      HeadingCandidate cand;
      cand.behavior = is_left ? HeadingBehavior::lane_change_left
                              : HeadingBehavior::lane_change_right;
      cand.lane_change = true;
      cand.span_begin = std::min(lo, dir_index);
      cand.span_end = std::max(hi, dir_index);
      candidates.push_back(cand);
    }
  }

  bool have_heading = !candidates.empty();
  HeadingCandidate chosen;
  if (have_heading) {
    chosen = candidates.back();
    m.heading = chosen.behavior;
  }

  if (!have_speed && !have_heading) {
    throw ParseError("parse_meta_action: no motion keywords in: " + text);
  }

  // Intensity: modifier adjacent to the chosen speed verb.
  if (have_speed) {
    const std::size_t slots[2] = {speed_index + 1, speed_index - 1};
    for (std::size_t j : slots) {
      if (j >= tokens.size() || consumed[j]) continue;
      const VocabEntry* e = tokens[j].entry;
      if (!e || e->field != VocabField::modifier) continue;
      if (e->value == "slight" || e->value == "gentle") {
        m.speed_intensity = SpeedIntensity::slight;
      } else if (e->value == "rapid" || e->value == "abrupt") {
        m.speed_intensity = SpeedIntensity::rapid;
      } else {
        continue;
      }
      consumed[j] = true;
      break;
    }
  }

  // Extent: modifier just before the heading span (and just after it for
  // non-lane-change phrases, where the style slot never sits there).
  if (have_heading && m.heading != HeadingBehavior::straight) {
    std::vector<std::size_t> slots;
    if (chosen.span_begin >= 1) slots.push_back(chosen.span_begin - 1);
    if (chosen.span_begin >= 2) slots.push_back(chosen.span_begin - 2);
    if (!chosen.lane_change) slots.push_back(chosen.span_end + 1);
    for (std::size_t j : slots) {
      if (j >= tokens.size() || consumed[j]) continue;
      const VocabEntry* e = tokens[j].entry;
      if (!e || e->field != VocabField::modifier) continue;
      HeadingExtent extent;
      if (e->value == "slight") {
        extent = HeadingExtent::slight;
      } else if (e->value == "sharp") {
        extent = HeadingExtent::sharp;
      } else if (e->value == "wide") {
        extent = HeadingExtent::wide;
      } else if (e->value == "smooth") {
        extent = HeadingExtent::smooth;
      } else {
        continue;
      }
      m.heading_extent = extent;
      consumed[j] = true;
      break;
    }
  }

  // Style: an explicit "driving <adverb>" marker wins, then the last
  // unconsumed style word, then a leftover "smoothly".
  bool style_found = false;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const VocabEntry* e = tokens[i].entry;
    if (!e || e->field != VocabField::marker || e->value != "driving") continue;
    const VocabEntry* next = tokens[i + 1].entry;
    if (!next) continue;
    if (next->field == VocabField::style) {
      m.style = driving_style_from_string(next->value);
      style_found = true;
    } else if (next->field == VocabField::modifier && next->value == "smooth") {
      m.style = DrivingStyle::smoothly;
      style_found = true;
    }
  }
  if (!style_found) {
    for (std::size_t i = tokens.size(); i-- > 0;) {
      if (consumed[i]) continue;
      const VocabEntry* e = tokens[i].entry;
      if (e && e->field == VocabField::style) {
        m.style = driving_style_from_string(e->value);
        style_found = true;
        break;
      }
    }
  }
  if (!style_found) {
    for (std::size_t i = tokens.size(); i-- > 0;) {
      if (consumed[i]) continue;
      const VocabEntry* e = tokens[i].entry;
      if (e && e->field == VocabField::modifier && e->value == "smooth") {
        m.style = DrivingStyle::smoothly;
        break;
      }
    }
  }

  return m;
}

std::string to_string(BaselineAction a) {
  switch (a) {
    case BaselineAction::turning_left: return "turning_left";
    case BaselineAction::turning_right: return "turning_right";
    case BaselineAction::changing_lanes_left: return "changing_lanes_left";
    case BaselineAction::changing_lanes_right: return "changing_lanes_right";
    case BaselineAction::continuing_straight: return "continuing_straight";
    case BaselineAction::completely_stationary: return "completely_stationary";
    case BaselineAction::making_u_turn: return "making_u_turn";
  }
  return "continuing_straight";
}

std::string baseline_phrase(BaselineAction a) {
  switch (a) {
    case BaselineAction::turning_left: return "turning left";
    case BaselineAction::turning_right: return "turning right";
    case BaselineAction::changing_lanes_left: return "changing lanes left";
    case BaselineAction::changing_lanes_right: return "changing lanes right";
    case BaselineAction::continuing_straight: return "continuing straight";
    case BaselineAction::completely_stationary: return "completely stationary";
    case BaselineAction::making_u_turn: return "making a U-Turn";
  }
  return "continuing straight";
}

BaselineAction baseline_action_from_string(const std::string& s) {
  return enum_from_string<BaselineAction>(
      s,
      {{"turning_left", BaselineAction::turning_left},
       {"turning_right", BaselineAction::turning_right},
       {"changing_lanes_left", BaselineAction::changing_lanes_left},
       {"changing_lanes_right", BaselineAction::changing_lanes_right},
       {"continuing_straight", BaselineAction::continuing_straight},
       {"completely_stationary", BaselineAction::completely_stationary},
       {"making_u_turn", BaselineAction::making_u_turn}},
      "baseline action");
}

std::optional<BaselineAction> find_baseline_phrase(const std::string& text) {
  const std::string lower = to_lower(text);
  struct Needle {
    const char* phrase;
    BaselineAction action;
  };
  static const Needle needles[] = {
      {"turning left", BaselineAction::turning_left},
      {"turning right", BaselineAction::turning_right},
      {"changing lanes left", BaselineAction::changing_lanes_left},
      {"changing lanes right", BaselineAction::changing_lanes_right},
      {"continuing straight", BaselineAction::continuing_straight},
      {"completely stationary", BaselineAction::completely_stationary},
      {"making a u-turn", BaselineAction::making_u_turn},
      {"u-turn", BaselineAction::making_u_turn},
  };
  std::optional<BaselineAction> best;
  std::size_t best_pos = 0;
  std::size_t best_len = 0;
  for (const Needle& n : needles) {
    std::size_t pos = lower.rfind(n.phrase);
    if (pos == std::string::npos) continue;
    std::size_t len = std::string(n.phrase).size();
    if (!best || pos > best_pos || (pos == best_pos && len > best_len)) {
      best = n.action;
      best_pos = pos;
      best_len = len;
    }
  }
  return best;
}

BaselineClassification classify_baseline_action(
    const TrajectoryLog& log, std::size_t first, std::size_t last,
    const ClassifierThresholds& th) {
  if (first > last || last >= log.states.size()) {
    throw InvalidArgumentError("classify_baseline_action: bad span");
  }
  double duration = log.states[last].t - log.states[first].t;
  if (duration < 1.0 - 1e-9 || duration > 10.0 + 1e-9) {
    std::ostringstream msg;
    msg << "classify_baseline_action: chunk duration " << duration
        << " s outside [1, 10] s";
    throw InvalidArgumentError(msg.str());
  }

  double max_speed = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    max_speed = std::max(max_speed, log.states[i].speed_mps);
  }
  if (max_speed < th.stationary_speed_mps) {
    return {BaselineAction::completely_stationary, false};
  }

  double course = total_course_change(log, first, last);
  if (std::abs(course) > th.u_turn_course_deg) {
    return {BaselineAction::making_u_turn, false};
  }
  if (std::abs(course) > th.turn_course_deg) {
    return {course > 0.0 ? BaselineAction::turning_right
                         : BaselineAction::turning_left,
            false};
  }

  std::optional<int> first_lane;
  std::optional<int> last_lane;
  for (std::size_t i = first; i <= last; ++i) {
    if (log.states[i].lane_id) {
      if (!first_lane) first_lane = log.states[i].lane_id;
      last_lane = log.states[i].lane_id;
    }
  }
  if (!first_lane) {
    // No lane ids: the lane-change rule cannot fire.
    return {BaselineAction::continuing_straight, true};
  }
  if (*first_lane != *last_lane) {
    bool left;
    if (course != 0.0) {
      left = course < 0.0;
    } else {
      left = *last_lane < *first_lane;  // lane ids grow to the right
    }
    return {left ? BaselineAction::changing_lanes_left
                 : BaselineAction::changing_lanes_right,
            false};
  }
  return {BaselineAction::continuing_straight, false};
}

ChunkStats compute_chunk_stats(const TrajectoryLog& log, std::size_t first,
                               std::size_t last) {
  if (first >= last || last >= log.states.size()) {
    throw InvalidArgumentError("compute_chunk_stats: bad span");
  }
  ChunkStats stats;
  stats.duration_s = log.states[last].t - log.states[first].t;
  if (stats.duration_s <= 0.0) {
    throw InvalidArgumentError("compute_chunk_stats: non-positive duration");
  }
  stats.mean_accel_mps2 =
      (log.states[last].speed_mps - log.states[first].speed_mps) /
      stats.duration_s;
  stats.total_course_change_deg = total_course_change(log, first, last);
  for (std::size_t i = first; i <= last; ++i) {
    stats.max_speed_mps = std::max(stats.max_speed_mps, log.states[i].speed_mps);
  }
  return stats;
}

MetaAction refine_meta_action(BaselineAction base, const ChunkStats& stats,
                              const ClassifierThresholds& th) {
  MetaAction m;
  m.style = DrivingStyle::normally;

  if (base == BaselineAction::completely_stationary) {
    m.speed = SpeedBehavior::stationary;
    m.heading = HeadingBehavior::straight;
    return normalize_meta_action(m);
  }

  const double course = stats.total_course_change_deg;
  const double abs_course = std::abs(course);
  const double rate =
      stats.duration_s > 0.0 ? abs_course / stats.duration_s : 0.0;

  switch (base) {
    case BaselineAction::turning_left:
    case BaselineAction::turning_right:
      m.heading = (base == BaselineAction::turning_left)
                      ? HeadingBehavior::turn_left
                      : HeadingBehavior::turn_right;
      if (rate > th.turn_sharp_rate_deg_s) {
        m.heading_extent = HeadingExtent::sharp;
      } else if (rate < th.turn_wide_rate_deg_s) {
        m.heading_extent = HeadingExtent::wide;
      } else {
        m.heading_extent = HeadingExtent::normal;
      }
      break;
    case BaselineAction::changing_lanes_left:
    case BaselineAction::changing_lanes_right:
      m.heading = (base == BaselineAction::changing_lanes_left)
                      ? HeadingBehavior::lane_change_left
                      : HeadingBehavior::lane_change_right;
      m.heading_extent = (abs_course <= th.lane_change_smooth_max_deg)
                             ? HeadingExtent::smooth
                             : HeadingExtent::normal;
      break;
    case BaselineAction::making_u_turn:
      m.heading = HeadingBehavior::u_turn;
      break;
    case BaselineAction::continuing_straight:
      if (abs_course > th.straight_course_deg) {
        m.heading = (course > 0.0) ? HeadingBehavior::adjust_right
                                   : HeadingBehavior::adjust_left;
        m.heading_extent = (abs_course <= th.adjust_slight_max_deg)
                               ? HeadingExtent::slight
                               : HeadingExtent::normal;
      } else {
        m.heading = HeadingBehavior::straight;
      }
      break;
    case BaselineAction::completely_stationary:
      break;
  }

  const double a = stats.mean_accel_mps2;
  if (a < th.decelerate_below_mps2) {
    m.speed = SpeedBehavior::decelerate;
  } else if (a > th.accelerate_above_mps2) {
    m.speed = SpeedBehavior::accelerate;
  } else {
    m.speed = SpeedBehavior::maintain;
  }
  if (m.speed != SpeedBehavior::maintain) {
    const double mag = std::abs(a);
    if (mag <= th.intensity_tercile_lo_mps2) {
      m.speed_intensity = SpeedIntensity::slight;
    } else if (mag <= th.intensity_tercile_hi_mps2) {
      m.speed_intensity = SpeedIntensity::normal;
    } else {
      m.speed_intensity = SpeedIntensity::rapid;
    }
  }

  return normalize_meta_action(m);
}

std::size_t word_count(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  std::size_t count = 0;
  while (in >> word) ++count;
  return count;
}

}  // namespace steerbench
