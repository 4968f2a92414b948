#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "steerbench/errors.hpp"
#include "steerbench/geometry.hpp"
#include "steerbench/high_level.hpp"
#include "steerbench/labeler.hpp"
#include "steerbench/meta_action.hpp"
#include "steerbench/vlm_client.hpp"

namespace steerbench {
namespace {

constexpr double kRate = 20.0;
constexpr double kDt = 1.0 / kRate;

TrajectoryLog make_log(double duration_s,
                       const std::function<double(double)>& speed,
                       const std::function<double(double)>& heading) {
  TrajectoryLog log;
  log.rate_hz = kRate;
  const int n = static_cast<int>(std::lround(duration_s * kRate)) + 1;
  double x = 0.0;
  double y = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = i * kDt;
    EgoState s;
    s.t = t;
    s.x = x;
    s.y = y;
    s.heading_deg = heading(t);
    s.speed_mps = speed(t);
    log.states.push_back(s);
    Point2 dir = heading_direction(s.heading_deg);
    x += s.speed_mps * dir.x * kDt;
    y += s.speed_mps * dir.y * kDt;
  }
  return log;
}

TrajectoryLog steady_log(double duration_s, double speed = 6.0) {
  return make_log(
      duration_s, [speed](double) { return speed; }, [](double) { return 0.0; });
}

// Hard brake: 8 m/s until t=6, -4 m/s^2 down to zero, stopped afterwards.
double brake_profile(double t) {
  if (t < 6.0) return 8.0;
  return std::max(0.0, 8.0 - 4.0 * (t - 6.0));
}

// Camera 5 m behind the origin, 1.5 m up, looking along world +x.
CameraModel forward_camera() {
  CameraModel camera;
  Eigen::Matrix3d r;
  r << 0, -1, 0,
       0, 0, -1,
       1, 0, 0;
  camera.rotation = r;
  camera.translation = Eigen::Vector3d(0.0, 1.5, 5.0);
  return camera;
}

struct TempDir {
  std::string path;
  TempDir() {
    char buf[] = "/tmp/steerbench-labeler-XXXXXX";
    path = ::mkdtemp(buf);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

std::string serialize(const std::vector<LabelRecord>& records) {
  std::ostringstream out;
  write_label_records(out, records);
  return out.str();
}

// ---------------------------------------------------------------------------
// Gaussian smoothing

TEST(GaussianSmooth, NonPositiveSigmaIsIdentity) {
  std::vector<double> values{1.0, -2.0, 3.0, 0.5};
  EXPECT_EQ(gaussian_smooth(values, 0.0), values);
  EXPECT_EQ(gaussian_smooth(values, -1.0), values);
}

TEST(GaussianSmooth, ConstantSignalIsPreserved) {
  std::vector<double> values(50, 3.25);
  std::vector<double> out = gaussian_smooth(values, 4.0);
  ASSERT_EQ(out.size(), values.size());
  for (double v : out) EXPECT_NEAR(v, 3.25, 1e-12);
}

TEST(GaussianSmooth, ImpulseSpreadsSymmetrically) {
  std::vector<double> values(41, 0.0);
  values[20] = 1.0;
  std::vector<double> out = gaussian_smooth(values, 3.0);
  EXPECT_LT(out[20], 1.0);
  EXPECT_GT(out[20], out[19]);
  for (int d = 1; d <= 9; ++d) {
    EXPECT_NEAR(out[20 - d], out[20 + d], 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Chunking

TEST(Chunker, TwelveSecondSteadyLogSplitsFiveFiveTwo) {
  TrajectoryLog log = steady_log(12.0);
  std::vector<Chunk> chunks = chunk_trajectory(log);
  ASSERT_EQ(chunks.size(), 3u);
  EXPECT_NEAR(chunks[0].t_end - chunks[0].t_begin, 5.0, 1e-9);
  EXPECT_NEAR(chunks[1].t_end - chunks[1].t_begin, 5.0, 1e-9);
  EXPECT_NEAR(chunks[2].t_end - chunks[2].t_begin, 2.0, 1e-9);
  EXPECT_EQ(chunks[0].trigger, ChunkTrigger::max_duration);
  EXPECT_FALSE(chunks[2].flagged_short);
}

TEST(Chunker, ChunksTileTheLogWithSharedBoundaryFrames) {
  std::mt19937 rng(20240818);
  std::uniform_real_distribution<double> dur(2.2, 30.0);
  std::uniform_real_distribution<double> base(0.0, 9.0);
  std::uniform_real_distribution<double> swing(0.0, 4.0);
  std::uniform_real_distribution<double> period(2.0, 9.0);
  std::uniform_real_distribution<double> yaw(0.0, 25.0);

  ChunkerParams params;
  for (int it = 0; it < 100; ++it) {
    double b = base(rng), a = swing(rng), p = period(rng), w = yaw(rng);
    TrajectoryLog log = make_log(
        dur(rng),
        [=](double t) { return std::max(0.0, b + a * std::sin(t * 6.28 / p)); },
        [=](double t) { return w * std::sin(t * 6.28 / (p + 1.0)); });
    std::vector<Chunk> chunks = chunk_trajectory(log, params);
    ASSERT_FALSE(chunks.empty());
    EXPECT_EQ(chunks.front().first_frame, 0u);
    EXPECT_EQ(chunks.back().last_frame, log.states.size() - 1);
    for (std::size_t i = 0; i + 1 < chunks.size(); ++i) {
      EXPECT_EQ(chunks[i].last_frame, chunks[i + 1].first_frame);
      double len = chunks[i].t_end - chunks[i].t_begin;
      EXPECT_GE(len, params.min_chunk_s - 1e-9);
      EXPECT_LE(len, params.max_chunk_s + 1e-9);
      EXPECT_FALSE(chunks[i].flagged_short);
    }
    double tail = chunks.back().t_end - chunks.back().t_begin;
    EXPECT_GE(tail, params.short_terminal_s - 1e-9);
    EXPECT_LE(tail, params.max_chunk_s + 1e-9);
    EXPECT_EQ(chunks.back().flagged_short, tail < params.min_chunk_s - 1e-9);
  }
}

TEST(Chunker, HardBrakeCreatesABoundaryNearTheOnset) {
  TrajectoryLog log = make_log(12.0, brake_profile, [](double) { return 0.0; });
  std::vector<Chunk> chunks = chunk_trajectory(log);
  bool found = false;
  for (const Chunk& c : chunks) {
    if (c.trigger == ChunkTrigger::accel_onset &&
        std::abs(c.t_end - 6.0) <= 0.5) {
      found = true;
    }
  }
  EXPECT_TRUE(found) << "no acceleration-onset boundary within 0.5 s of t=6";
}

TEST(Chunker, SingleFrameImpulseDoesNotMoveBoundaries) {
  TrajectoryLog a = make_log(12.0, brake_profile, [](double) { return 0.0; });
  TrajectoryLog b = a;
  b.states[60].speed_mps += 0.4;  // one-frame glitch at t=3

  std::vector<Chunk> ca = chunk_trajectory(a);
  std::vector<Chunk> cb = chunk_trajectory(b);
  ASSERT_EQ(ca.size(), cb.size());
  for (std::size_t i = 0; i < ca.size(); ++i) {
    EXPECT_EQ(ca[i].first_frame, cb[i].first_frame);
    EXPECT_EQ(ca[i].last_frame, cb[i].last_frame);
    EXPECT_EQ(ca[i].trigger, cb[i].trigger);
  }
}

TEST(Chunker, StopEntryAndExitBecomeBoundaries) {
  auto speed = [](double t) {
    if (t < 4.0) return 6.0;
    if (t < 10.0) return std::max(0.0, 6.0 - 1.0 * (t - 4.0));
    if (t < 14.0) return 0.0;
    if (t < 20.0) return std::min(6.0, 1.0 * (t - 14.0));
    return 6.0;
  };
  TrajectoryLog log = make_log(24.0, speed, [](double) { return 0.0; });
  std::vector<Chunk> chunks = chunk_trajectory(log);

  bool entry = false, exit = false;
  for (const Chunk& c : chunks) {
    if (c.trigger == ChunkTrigger::stopped_entry && std::abs(c.t_end - 9.0) <= 0.5) {
      entry = true;
    }
    if (c.trigger == ChunkTrigger::stopped_exit && std::abs(c.t_end - 15.0) <= 0.5) {
      exit = true;
    }
  }
  EXPECT_TRUE(entry);
  EXPECT_TRUE(exit);
}

TEST(Chunker, RejectsUnusableLogs) {
  EXPECT_THROW(chunk_trajectory(steady_log(1.5)), InsufficientChunkError);
  TrajectoryLog bad = steady_log(10.0);
  bad.rate_hz = 0.0;
  EXPECT_THROW(chunk_trajectory(bad), InvalidArgumentError);
}

// ---------------------------------------------------------------------------
// Projection and overlays

TEST(Projection, MatchesThePinholeOracle) {
  CameraModel camera = forward_camera();
  std::vector<Eigen::Vector3d> world{{2.0, 1.0, 0.0}, {10.0, -2.0, 0.5}};
  ProjectionResult result = project_points(camera, world);
  ASSERT_EQ(result.points.size(), 2u);
  EXPECT_FALSE(result.clipped);

  for (std::size_t i = 0; i < world.size(); ++i) {
    Eigen::Vector3d cam = camera.rotation * world[i] + camera.translation;
    double u = camera.fx * cam.x() / cam.z() + camera.cx;
    double v = camera.fy * cam.y() / cam.z() + camera.cy;
    EXPECT_EQ(result.points[i].index, i);
    EXPECT_NEAR(result.points[i].u, u, 1e-12);
    EXPECT_NEAR(result.points[i].v, v, 1e-12);
  }
}

TEST(Projection, DiscardsBehindCameraAndOutOfFrame) {
  CameraModel camera = forward_camera();
  std::vector<Eigen::Vector3d> world{
      {-5.5, 0.0, 0.0},   // depth -0.5: behind
      {-4.95, 0.0, 0.0},  // depth 0.05: grazing, still discarded
      {5.0, 50.0, 0.0},   // far left of the frustum
      {10.0, 0.0, 0.0},   // visible
  };
  ProjectionResult result = project_points(camera, world);
  EXPECT_TRUE(result.clipped);
  ASSERT_EQ(result.points.size(), 1u);
  EXPECT_EQ(result.points[0].index, 3u);
}

TEST(Projection, ValidatesTheCamera) {
  CameraModel camera = forward_camera();
  camera.fx = 0.0;
  EXPECT_THROW(project_points(camera, {{1.0, 0.0, 0.0}}), InvalidArgumentError);
}

TEST(Overlay, DrawsThirdsAndACyanEndpoint) {
  TrajectoryLog log = steady_log(4.0);
  log.camera = forward_camera();
  Overlay overlay = render_trajectory_overlay(log, 0, 60);

  EXPECT_EQ(overlay.width, 1600);
  EXPECT_EQ(overlay.height, 900);
  EXPECT_EQ(overlay.retained, 61u);
  EXPECT_FALSE(overlay.clipped);

  // The endpoint disc is cyan at the last projected point.
  const CameraModel& camera = *log.camera;
  Eigen::Vector3d cam = camera.rotation *
                            Eigen::Vector3d(log.states[60].x, log.states[60].y,
                                            0.0) +
                        camera.translation;
  int u = static_cast<int>(std::lround(camera.fx * cam.x() / cam.z() + camera.cx));
  int v = static_cast<int>(std::lround(camera.fy * cam.y() / cam.z() + camera.cy));
  std::array<std::uint8_t, 3> cyan{0, 220, 220};
  EXPECT_EQ(overlay.pixel(u, v), cyan);

  // The near end starts green; yellow and red both appear along the path.
  Eigen::Vector3d cam0 = camera.rotation * Eigen::Vector3d(0, 0, 0) +
                         camera.translation;
  int u0 = static_cast<int>(std::lround(camera.fx * cam0.x() / cam0.z() + camera.cx));
  int v0 = static_cast<int>(std::lround(camera.fy * cam0.y() / cam0.z() + camera.cy));
  std::array<std::uint8_t, 3> green{0, 200, 0};
  EXPECT_EQ(overlay.pixel(u0, v0), green);

  bool has_yellow = false, has_red = false;
  for (std::size_t i = 0; i + 2 < overlay.rgb.size(); i += 3) {
    if (overlay.rgb[i] == 230 && overlay.rgb[i + 1] == 200) has_yellow = true;
    if (overlay.rgb[i] == 220 && overlay.rgb[i + 1] == 30) has_red = true;
  }
  EXPECT_TRUE(has_yellow);
  EXPECT_TRUE(has_red);
}

TEST(Overlay, RejectsBadInputs) {
  TrajectoryLog log = steady_log(4.0);
  EXPECT_THROW(render_trajectory_overlay(log, 0, 10), InvalidArgumentError);

  log.camera = forward_camera();
  EXPECT_THROW(render_trajectory_overlay(log, 500, 10), InvalidArgumentError);

  // Camera looking along world -x: the forward trajectory never projects.
  CameraModel away;
  Eigen::Matrix3d r;
  r << 0, 1, 0,
       0, 0, -1,
       -1, 0, 0;
  away.rotation = r;
  away.translation = Eigen::Vector3d(0.0, 1.5, -5.0);
  log.camera = away;
  EXPECT_THROW(render_trajectory_overlay(log, 20, 40), EmptyOverlayError);
}

TEST(Overlay, PpmEncodingAndFileNaming) {
  Overlay overlay;
  overlay.width = 2;
  overlay.height = 2;
  overlay.rgb = {255, 0, 0, 0, 255, 0, 0, 0, 255, 9, 9, 9};
  std::string bytes = encode_ppm(overlay);
  EXPECT_EQ(bytes.substr(0, 11), "P6\n2 2\n255\n");
  EXPECT_EQ(bytes.size(), 11u + 12u);

  overlay.rgb.pop_back();
  EXPECT_THROW(encode_ppm(overlay), InvalidArgumentError);

  EXPECT_EQ(overlay_file_name("log7", 42), "log7_42_overlay.ppm");

  overlay.rgb.push_back(9);
  TempDir dir;
  std::string path = dir.path + "/" + overlay_file_name("log7", 42);
  write_ppm(overlay, path);
  std::ifstream in(path, std::ios::binary);
  std::stringstream read;
  read << in.rdbuf();
  EXPECT_EQ(read.str(), bytes);
}

TEST(Overlay, PixelAccessorBoundsChecks) {
  Overlay overlay;
  overlay.width = 1;
  overlay.height = 1;
  overlay.rgb = {1, 2, 3};
  std::array<std::uint8_t, 3> expected{1, 2, 3};
  EXPECT_EQ(overlay.pixel(0, 0), expected);
  EXPECT_THROW(overlay.pixel(1, 0), InvalidArgumentError);
  EXPECT_THROW(overlay.pixel(0, -1), InvalidArgumentError);
}

// ---------------------------------------------------------------------------
// Prompt ingredients

TEST(PromptText, EgoStatesSampleEveryHalfSecond) {
  TrajectoryLog log = steady_log(4.0);
  Chunk chunk;
  chunk.first_frame = 0;
  chunk.last_frame = 20;
  chunk.t_begin = 0.0;
  chunk.t_end = 1.0;
  EXPECT_EQ(ego_states_text(log, chunk),
            "t=0.0s speed=6.00 m/s course=0.0 deg\n"
            "t=0.5s speed=6.00 m/s course=0.0 deg\n"
            "t=1.0s speed=6.00 m/s course=0.0 deg");

  chunk.last_frame = 15;  // uneven stride: the last frame is always included
  EXPECT_EQ(ego_states_text(log, chunk),
            "t=0.0s speed=6.00 m/s course=0.0 deg\n"
            "t=0.5s speed=6.00 m/s course=0.0 deg\n"
            "t=0.8s speed=6.00 m/s course=0.0 deg");

  chunk.last_frame = 500;
  EXPECT_THROW(ego_states_text(log, chunk), InvalidArgumentError);
}

TEST(PromptText, LaneInformationBbranches) {
  TrajectoryLog log = steady_log(4.0);
  Chunk chunk;
  chunk.first_frame = 0;
  chunk.last_frame = 20;
  EXPECT_EQ(lane_information_text(log, chunk), "Lane ids are unavailable.");

  for (std::size_t i = 0; i < log.states.size(); ++i) {
    log.states[i].lane_id = i < 15 ? 0 : 1;
  }
  EXPECT_EQ(lane_information_text(log, chunk),
            "Lane id sequence (sampled): 0 0 1; lane ids grow to the right.");
}

// ---------------------------------------------------------------------------
// Refined-sentence extraction and category mapping

TEST(RefinedSentence, ExtractsFromSectionHeadings) {
  MetaAction m;
  m.speed = SpeedBehavior::decelerate;
  std::string plan = render_meta_action(m);

  EXPECT_EQ(extract_refined_sentence("1. Context.\n2. " + plan), plan);
  EXPECT_EQ(extract_refined_sentence("## 1. Context\nblah\n## 2.\n'" + plan + "'"),
            plan);
  EXPECT_EQ(extract_refined_sentence("no sections at all\n" + plan + "\nbye"),
            plan);
  EXPECT_THROW(extract_refined_sentence("2. nothing that parses"), ParseError);
}

TEST(ImpliedBaseline, StationaryDominatesThenHeadingDecides) {
  MetaAction m;
  m.speed = SpeedBehavior::stationary;
  m.heading = HeadingBehavior::turn_left;
  EXPECT_EQ(implied_baseline(m), BaselineAction::completely_stationary);

  m.speed = SpeedBehavior::maintain;
  EXPECT_EQ(implied_baseline(m), BaselineAction::turning_left);
  m.heading = HeadingBehavior::lane_change_right;
  EXPECT_EQ(implied_baseline(m), BaselineAction::changing_lanes_right);
  m.heading = HeadingBehavior::u_turn;
  EXPECT_EQ(implied_baseline(m), BaselineAction::making_u_turn);
  m.heading = HeadingBehavior::adjust_left;
  EXPECT_EQ(implied_baseline(m), BaselineAction::continuing_straight);
}

// ---------------------------------------------------------------------------
// Label records

Chunk whole_log_chunk(const TrajectoryLog& log) {
  Chunk chunk;
  chunk.first_frame = 0;
  chunk.last_frame = log.states.size() - 1;
  chunk.t_begin = log.states.front().t;
  chunk.t_end = log.states.back().t;
  chunk.trigger = ChunkTrigger::max_duration;
  return chunk;
}

TEST(LabelChunk, DeterministicPathIsIdempotent) {
  TrajectoryLog log = steady_log(4.0);
  Chunk chunk = whole_log_chunk(log);
  LabelRecord a = label_chunk(log, "log-a", 0, chunk);
  LabelRecord b = label_chunk(log, "log-a", 0, chunk);

  EXPECT_EQ(a.baseline, BaselineAction::continuing_straight);
  EXPECT_EQ(a.meta.speed, SpeedBehavior::maintain);
  EXPECT_EQ(a.provenance, LabelProvenance::deterministic);
  EXPECT_FALSE(a.fell_back);
  EXPECT_FALSE(a.prompt_hash.has_value());
  EXPECT_EQ(a.description, render_meta_action(a.meta));
  EXPECT_EQ(a.reasoning, build_reasoning_label(a.meta));
  EXPECT_NEAR(a.stats.duration_s, 4.0, 1e-9);
  EXPECT_NEAR(a.stats.max_speed_mps, 6.0, 1e-9);
  EXPECT_EQ(serialize({a}), serialize({b}));
}

TEST(LabelTrajectory, ModelPathRequiresAClient) {
  TrajectoryLog log = steady_log(4.0);
  LabelerOptions options;
  options.use_model = true;
  EXPECT_THROW(label_trajectory(log, "log-a", options, nullptr), ConfigError);
}

LabelerOptions model_options() {
  LabelerOptions options;
  options.use_model = true;
  options.model_id = "test-model";
  return options;
}

TEST(LabelChunkModel, TwoStageSuccess) {
  TrajectoryLog log = steady_log(4.0);
  log.camera = forward_camera();
  Chunk chunk = whole_log_chunk(log);

  MetaAction refined;
  refined.speed = SpeedBehavior::maintain;
  auto transport = std::make_shared<ScriptedTransport>();
  transport->push_response("The vehicle is continuing straight.");
  transport->push_response("1. Steady cruise.\n2. " + render_meta_action(refined));
  VlmClient client(ClientMode::live, transport, nullptr);

  LabelRecord rec = label_chunk_model(log, "log-a", 0, chunk, client,
                                      model_options());
  EXPECT_EQ(transport->calls(), 2);
  EXPECT_EQ(rec.provenance, LabelProvenance::model_refined);
  EXPECT_FALSE(rec.fell_back);
  EXPECT_EQ(rec.baseline, BaselineAction::continuing_straight);
  EXPECT_FALSE(rec.baseline_low_confidence);
  EXPECT_TRUE(rec.meta.fields_equal(normalize_meta_action(refined)));
  ASSERT_TRUE(rec.prompt_hash.has_value());
  EXPECT_EQ(*rec.prompt_hash, request_hash(transport->requests()[1]));

  // Stage 1 carried the two overlay frames as image attachments.
  EXPECT_EQ(transport->requests()[0].images.size(), 2u);
  EXPECT_TRUE(transport->requests()[1].images.empty());
}

TEST(LabelChunkModel, CategoryDriftFallsBackDeterministically) {
  TrajectoryLog log = steady_log(4.0);
  log.camera = forward_camera();
  Chunk chunk = whole_log_chunk(log);

  MetaAction drifted;
  drifted.heading = HeadingBehavior::turn_left;
  auto transport = std::make_shared<ScriptedTransport>();
  transport->push_response("The vehicle is continuing straight.");
  transport->push_response("2. " + render_meta_action(drifted));
  VlmClient client(ClientMode::live, transport, nullptr);

  LabelRecord rec = label_chunk_model(log, "log-a", 0, chunk, client,
                                      model_options());
  EXPECT_EQ(transport->calls(), 2);
  EXPECT_TRUE(rec.fell_back);
  EXPECT_EQ(rec.provenance, LabelProvenance::deterministic);
  EXPECT_NE(rec.meta.heading, HeadingBehavior::turn_left);
  EXPECT_TRUE(rec.prompt_hash.has_value());
}

TEST(LabelChunkModel, UnusableStageOneSkipsStageTwo) {
  TrajectoryLog log = steady_log(4.0);
  log.camera = forward_camera();
  Chunk chunk = whole_log_chunk(log);

  auto transport = std::make_shared<ScriptedTransport>();
  transport->push_response("I see a road. No category comes to mind.");
  VlmClient client(ClientMode::live, transport, nullptr);

  LabelRecord rec = label_chunk_model(log, "log-a", 0, chunk, client,
                                      model_options());
  EXPECT_EQ(transport->calls(), 1);
  EXPECT_TRUE(rec.fell_back);
  EXPECT_EQ(rec.provenance, LabelProvenance::deterministic);
  EXPECT_TRUE(rec.prompt_hash.has_value());
}

TEST(LabelChunkModel, MissingCameraFallsBackWithoutQueries) {
  TrajectoryLog log = steady_log(4.0);
  Chunk chunk = whole_log_chunk(log);
  auto transport = std::make_shared<ScriptedTransport>();
  VlmClient client(ClientMode::live, transport, nullptr);

  LabelRecord rec = label_chunk_model(log, "log-a", 0, chunk, client,
                                      model_options());
  EXPECT_EQ(transport->calls(), 0);
  EXPECT_TRUE(rec.fell_back);
  EXPECT_FALSE(rec.prompt_hash.has_value());
}

TEST(LabelRecords, JsonlRoundTripWithSchemaHeader) {
  TrajectoryLog log = steady_log(6.0);
  std::vector<LabelRecord> records;
  for (const Chunk& chunk : chunk_trajectory(log)) {
    records.push_back(label_chunk(log, "log-rt", records.empty() ? 0 : 1, chunk));
  }
  records[0].prompt_hash = sha256_hex("some prompt");
  records[0].provenance = LabelProvenance::model_refined;

  std::string bytes = serialize(records);
  std::string header = bytes.substr(0, bytes.find('\n'));
  EXPECT_EQ(header, "{\"schema\":\"steerbench.labels/1\"}");

  std::istringstream in(bytes);
  std::vector<LabelRecord> back = read_label_records(in);
  ASSERT_EQ(back.size(), records.size());
  EXPECT_EQ(serialize(back), bytes);
  EXPECT_EQ(back[0].log_id, "log-rt");
  EXPECT_TRUE(back[0].prompt_hash.has_value());
  EXPECT_EQ(back[0].provenance, LabelProvenance::model_refined);
  EXPECT_EQ(back[1].trigger, records[1].trigger);
  EXPECT_NEAR(back[1].stats.max_speed_mps, records[1].stats.max_speed_mps, 1e-12);
}

TEST(LabelRecords, SaveAndLoadFiles) {
  TrajectoryLog log = steady_log(4.0);
  std::vector<LabelRecord> records{
      label_chunk(log, "log-file", 0, whole_log_chunk(log))};
  TempDir dir;
  std::string path = dir.path + "/labels.jsonl";
  save_label_records(records, path);
  std::vector<LabelRecord> back = load_label_records(path);
  EXPECT_EQ(serialize(back), serialize(records));
  EXPECT_THROW(load_label_records(dir.path + "/absent.jsonl"), Error);
}

TEST(LabelTrajectory, RecordThenReplayReproducesRecordsExactly) {
  TrajectoryLog log = steady_log(8.0);
  log.camera = forward_camera();

  MetaAction refined;
  refined.speed = SpeedBehavior::maintain;
  std::string stage2 = "2. " + render_meta_action(refined);

  TempDir dir;
  auto store = std::make_shared<FixtureStore>(dir.path);
  std::string recorded_bytes;
  {
    auto transport = std::make_shared<ScriptedTransport>();
    for (int i = 0; i < 2; ++i) {  // two chunks, two stages each
      transport->push_response("The vehicle is continuing straight.");
      transport->push_response(stage2);
    }
    VlmClient recorder(ClientMode::record, transport, store);
    std::vector<LabelRecord> records =
        label_trajectory(log, "log-replay", model_options(), &recorder);
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].provenance, LabelProvenance::model_refined);
    recorded_bytes = serialize(records);
  }

  VlmClient replayer(ClientMode::replay, std::make_shared<NullTransport>(),
                     store);
  std::vector<LabelRecord> replayed =
      label_trajectory(log, "log-replay", model_options(), &replayer);
  EXPECT_EQ(serialize(replayed), recorded_bytes);
}

}  // namespace
}  // namespace steerbench
