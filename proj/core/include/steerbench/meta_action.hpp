#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "steerbench/trajectory.hpp"
#include "steerbench/vocabulary.hpp"

namespace steerbench {

enum class SpeedBehavior { accelerate, decelerate, maintain, stop, stationary };
enum class SpeedIntensity { slight, normal, rapid };
enum class HeadingBehavior {
  straight,
  adjust_left,
  adjust_right,
  turn_left,
  turn_right,
  lane_change_left,
  lane_change_right,
  u_turn,
};
enum class HeadingExtent { slight, normal, sharp, wide, smooth };
enum class DrivingStyle { cautiously, normally, aggressively, smoothly, assertively };

std::string to_string(SpeedBehavior v);
std::string to_string(SpeedIntensity v);
std::string to_string(HeadingBehavior v);
std::string to_string(HeadingExtent v);
std::string to_string(DrivingStyle v);
SpeedBehavior speed_behavior_from_string(const std::string& s);
SpeedIntensity speed_intensity_from_string(const std::string& s);
HeadingBehavior heading_behavior_from_string(const std::string& s);
HeadingExtent heading_extent_from_string(const std::string& s);
DrivingStyle driving_style_from_string(const std::string& s);

struct MetaAction {
  SpeedBehavior speed = SpeedBehavior::maintain;
  SpeedIntensity speed_intensity = SpeedIntensity::normal;
  HeadingBehavior heading = HeadingBehavior::straight;
  HeadingExtent heading_extent = HeadingExtent::normal;
  DrivingStyle style = DrivingStyle::normally;
  std::optional<std::string> referent;  // external object clause, e.g. "the blue SUV"
  std::string raw_text;                 // original input for parsed actions

  bool fields_equal(const MetaAction& other) const {
    return speed == other.speed && speed_intensity == other.speed_intensity &&
           heading == other.heading && heading_extent == other.heading_extent &&
           style == other.style;
  }
};

// The canonical grammar cannot voice an intensity for "maintains speed" or an
// extent for "continues straight", so those combinations normalize away:
//   stationary => straight heading, normal intensity, normal extent
//   stop       => straight heading, normal extent
//   maintain   => normal intensity
//   straight   => normal extent
MetaAction normalize_meta_action(MetaAction m);
bool is_structurally_valid(const MetaAction& m);

// Deterministic canonical sentence: at most 20 words, present tense, third
// person, starting "The vehicle". Normalizes its input first.
std::string render_meta_action(const MetaAction& m);

// Keyword-scan parser over the controlled vocabulary. Multi-phase sentences
// keep the final phase; unknown words are ignored; text without any motion
// keyword (or empty text) throws ParseError.
MetaAction parse_meta_action(const std::string& text,
                             const Vocabulary& vocab = Vocabulary::builtin());

enum class BaselineAction {
  turning_left,
  turning_right,
  changing_lanes_left,
  changing_lanes_right,
  continuing_straight,
  completely_stationary,
  making_u_turn,
};

std::string to_string(BaselineAction a);                 // snake_case id
std::string baseline_phrase(BaselineAction a);           // e.g. "changing lanes left"
BaselineAction baseline_action_from_string(const std::string& s);
// Finds the action phrase in free text (last occurrence wins); nullopt if none.
std::optional<BaselineAction> find_baseline_phrase(const std::string& text);

// Thresholds for classification and refinement. The course and speed cutoffs
// are strict inequalities.
struct ClassifierThresholds {
  double stationary_speed_mps = 1.0;
  double u_turn_course_deg = 150.0;
  double turn_course_deg = 50.0;
  double straight_course_deg = 4.0;
  double adjust_slight_max_deg = 15.0;
  double lane_change_smooth_max_deg = 30.0;
  double decelerate_below_mps2 = -1.5;
  double accelerate_above_mps2 = 1.0;
  double intensity_tercile_lo_mps2 = 1.2;
  double intensity_tercile_hi_mps2 = 2.4;
  double turn_sharp_rate_deg_s = 20.0;
  double turn_wide_rate_deg_s = 9.0;
};

struct BaselineClassification {
  BaselineAction action = BaselineAction::continuing_straight;
  bool low_confidence = false;  // set when lane ids were unavailable
};

// Decision ladder over a log segment of 1-10 s duration (inclusive frame
// range): stationary, then U-turn, then turn, then lane change, else straight.
BaselineClassification classify_baseline_action(
    const TrajectoryLog& log, std::size_t first, std::size_t last,
    const ClassifierThresholds& thresholds = {});

struct ChunkStats {
  double duration_s = 0.0;
  double mean_accel_mps2 = 0.0;        // (last speed - first speed) / duration
  double total_course_change_deg = 0.0;
  double max_speed_mps = 0.0;
};

ChunkStats compute_chunk_stats(const TrajectoryLog& log, std::size_t first,
                               std::size_t last);

// Specializes a baseline action into a full MetaAction from chunk statistics.
// Style stays "normally"; only the model-backed path raises other styles.
MetaAction refine_meta_action(BaselineAction base, const ChunkStats& stats,
                              const ClassifierThresholds& thresholds = {});

// Number of whitespace-separated words in a sentence.
std::size_t word_count(const std::string& text);

}  // namespace steerbench
