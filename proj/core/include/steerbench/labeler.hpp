#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "steerbench/meta_action.hpp"
#include "steerbench/trajectory.hpp"
#include "steerbench/vlm_client.hpp"

namespace steerbench {

// ---------------------------------------------------------------------------
// Trajectory chunking

// Why a chunk ends where it does. Interior subdivision cuts are max_duration;
// the final chunk of a log inherits the reason of the cut to its left.
enum class ChunkTrigger {
  log_start,
  log_end,
  max_duration,
  stopped_entry,
  stopped_exit,
  accel_onset,
  turn_onset,
};

std::string to_string(ChunkTrigger trigger);
ChunkTrigger chunk_trigger_from_string(const std::string& s);

struct Chunk {
  std::size_t first_frame = 0;
  std::size_t last_frame = 0;  // inclusive; shared with the next chunk
  double t_begin = 0.0;
  double t_end = 0.0;
  ChunkTrigger trigger = ChunkTrigger::max_duration;
  bool flagged_short = false;  // log-terminal remainder shorter than min length
};

struct ChunkerParams {
  double smoothing_sigma_s = 0.5;
  double stop_speed_mps = 1.0;
  double accel_onset_mps2 = 1.5;
  double yaw_onset_deg_s = 10.0;
  double sustain_s = 0.5;        // an onset must hold this long to count
  double min_separation_s = 2.0; // between hard boundaries and from log ends
  double max_chunk_s = 5.0;
  double min_chunk_s = 2.0;
  double short_terminal_s = 1.0; // floor for the flagged terminal remainder
};

// Gaussian smoothing with a kernel truncated at 3 sigma and replicated edges.
// A non-positive sigma returns the input unchanged.
std::vector<double> gaussian_smooth(const std::vector<double>& values,
                                    double sigma_samples);

// Splits a log into contiguous chunks: hard boundaries at stop entry/exit and
// sustained acceleration/yaw onsets, then greedy subdivision to the maximum
// length. Logs shorter than min_chunk_s throw InsufficientChunkError.
std::vector<Chunk> chunk_trajectory(const TrajectoryLog& log,
                                    const ChunkerParams& params = {});

// ---------------------------------------------------------------------------
// Trajectory projection overlays

struct ProjectedPoint {
  double u = 0.0;
  double v = 0.0;
  std::size_t index = 0;  // index into the input point list
};

struct ProjectionResult {
  std::vector<ProjectedPoint> points;
  bool clipped = false;  // some input points were behind or out of frame
};

// Pinhole projection; points with camera-frame depth <= 0.1 m or landing
// outside the image are discarded and set the clipped flag.
ProjectionResult project_points(const CameraModel& camera,
                                const std::vector<Eigen::Vector3d>& world);

struct Overlay {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
  bool clipped = false;
  std::size_t retained = 0;  // projected points that survived

  std::array<std::uint8_t, 3> pixel(int x, int y) const;
};

// Renders the future ground trajectory from `frame` to `frame + horizon`
// (clamped to the log end) through the log's camera: a polyline in ordered
// thirds green/yellow/red plus a cyan disc at the endpoint. Throws
// EmptyOverlayError when nothing projects into the image.
Overlay render_trajectory_overlay(const TrajectoryLog& log, std::size_t frame,
                                  std::size_t horizon_frames);

std::string encode_ppm(const Overlay& overlay);  // binary P6
void write_ppm(const Overlay& overlay, const std::string& path);
std::string overlay_file_name(const std::string& log_id, std::size_t frame);

// ---------------------------------------------------------------------------
// Label records

enum class LabelProvenance { deterministic, model_refined };
std::string to_string(LabelProvenance p);
LabelProvenance label_provenance_from_string(const std::string& s);

struct LabelRecord {
  std::string log_id;
  int chunk_index = 0;
  std::size_t first_frame = 0;
  std::size_t last_frame = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
  ChunkTrigger trigger = ChunkTrigger::max_duration;
  bool flagged_short = false;
  BaselineAction baseline = BaselineAction::continuing_straight;
  bool baseline_low_confidence = false;
  MetaAction meta;
  std::string description;  // canonical rendered sentence for meta
  std::string reasoning;
  LabelProvenance provenance = LabelProvenance::deterministic;
  bool fell_back = false;  // a model stage failed and rules took over
  std::optional<std::string> prompt_hash;  // set whenever a model was queried
  ChunkStats stats;
};

struct LabelerOptions {
  bool use_model = false;
  std::string model_id;
  double temperature = 0.0;
  int max_tokens = 512;
  ClassifierThresholds thresholds;
  ChunkerParams chunker;
};

// Prompt ingredients (exposed for tests).
std::string ego_states_text(const TrajectoryLog& log, const Chunk& chunk);
std::string lane_information_text(const TrajectoryLog& log, const Chunk& chunk);

// Pulls the refined sentence out of a stage-2 response: the first line after
// the last "2." section heading that parses as a meta-action. ParseError if
// none does.
std::string extract_refined_sentence(const std::string& response);

// Baseline category a refined meta-action implies; used to reject stage-2
// responses that drift across categories.
BaselineAction implied_baseline(const MetaAction& meta);

// Deterministic path: classify, compute stats, refine.
LabelRecord label_chunk(const TrajectoryLog& log, const std::string& log_id,
                        int chunk_index, const Chunk& chunk,
                        const LabelerOptions& options = {});

// Model path: stage 1 picks the baseline action from two overlay frames,
// stage 2 refines it into a full meta-action. Any stage failing (no camera,
// empty overlay, unusable response, category drift) falls back to the
// deterministic refinement with fell_back set.
LabelRecord label_chunk_model(const TrajectoryLog& log, const std::string& log_id,
                              int chunk_index, const Chunk& chunk,
                              VlmClient& client, const LabelerOptions& options);

// Chunk and label a whole log. The client may be null unless use_model is set.
std::vector<LabelRecord> label_trajectory(const TrajectoryLog& log,
                                          const std::string& log_id,
                                          const LabelerOptions& options = {},
                                          VlmClient* client = nullptr);

// JSON-lines with a {"schema":"steerbench.labels/1"} header object.
void write_label_records(std::ostream& out,
                         const std::vector<LabelRecord>& records);
std::vector<LabelRecord> read_label_records(std::istream& in);
void save_label_records(const std::vector<LabelRecord>& records,
                        const std::string& path);
std::vector<LabelRecord> load_label_records(const std::string& path);

}  // namespace steerbench
