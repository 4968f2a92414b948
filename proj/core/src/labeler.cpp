#include "steerbench/labeler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "steerbench/errors.hpp"
#include "steerbench/high_level.hpp"
#include "steerbench/prompts.hpp"

namespace steerbench {

namespace {

std::size_t frames_for(double seconds, double rate_hz) {
  return static_cast<std::size_t>(std::llround(seconds * rate_hz));
}

}  // namespace

// ---------------------------------------------------------------------------
// Chunking

std::string to_string(ChunkTrigger trigger) {
  switch (trigger) {
    case ChunkTrigger::log_start: return "log_start";
    case ChunkTrigger::log_end: return "log_end";
    case ChunkTrigger::max_duration: return "max_duration";
    case ChunkTrigger::stopped_entry: return "stopped_entry";
    case ChunkTrigger::stopped_exit: return "stopped_exit";
    case ChunkTrigger::accel_onset: return "accel_onset";
    case ChunkTrigger::turn_onset: return "turn_onset";
  }
  throw InvalidArgumentError("unknown chunk trigger");
}

ChunkTrigger chunk_trigger_from_string(const std::string& s) {
  for (ChunkTrigger t : {ChunkTrigger::log_start, ChunkTrigger::log_end,
                         ChunkTrigger::max_duration, ChunkTrigger::stopped_entry,
                         ChunkTrigger::stopped_exit, ChunkTrigger::accel_onset,
                         ChunkTrigger::turn_onset}) {
    if (to_string(t) == s) return t;
  }
  throw ParseError("unknown chunk trigger: " + s);
}

std::vector<double> gaussian_smooth(const std::vector<double>& values,
                                    double sigma_samples) {
  if (sigma_samples <= 0.0 || values.size() < 2) return values;
  const int half = static_cast<int>(std::ceil(3.0 * sigma_samples));
  std::vector<double> kernel(2 * half + 1);
  double sum = 0.0;
  for (int k = -half; k <= half; ++k) {
    double w = std::exp(-(k * k) / (2.0 * sigma_samples * sigma_samples));
    kernel[k + half] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;

  const int n = static_cast<int>(values.size());
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -half; k <= half; ++k) {
      int j = std::clamp(i + k, 0, n - 1);  // edge replication
      acc += kernel[k + half] * values[j];
    }
    out[i] = acc;
  }
  return out;
}

namespace {

struct Boundary {
  std::size_t frame = 0;
  ChunkTrigger trigger = ChunkTrigger::max_duration;
};

int trigger_priority(ChunkTrigger t) {
  switch (t) {
    case ChunkTrigger::stopped_entry: return 0;
    case ChunkTrigger::stopped_exit: return 1;
    case ChunkTrigger::accel_onset: return 2;
    case ChunkTrigger::turn_onset: return 3;
    default: return 4;
  }
}

// Even split of a frame span into two pieces, the first taking the extra
// frame when the span is odd.
std::pair<std::size_t, std::size_t> split_span(std::size_t span) {
  std::size_t a = (span + 1) / 2;
  return {a, span - a};
}

}  // namespace

std::vector<Chunk> chunk_trajectory(const TrajectoryLog& log,
                                    const ChunkerParams& params) {
  const std::size_t n = log.states.size();
  const double rate = log.rate_hz;
  if (rate <= 0.0) throw InvalidArgumentError("trajectory rate must be positive");
  if (n < 2 || log.duration() < params.min_chunk_s) {
    throw InsufficientChunkError("trajectory shorter than the minimum chunk length");
  }

  const double sigma = params.smoothing_sigma_s * rate;
  std::vector<double> speed(n), dpsi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) speed[i] = log.states[i].speed_mps;
  for (std::size_t i = 1; i < n; ++i) {
    dpsi[i] = course_delta(log.states[i - 1].heading_deg, log.states[i].heading_deg);
  }
  std::vector<double> v = gaussian_smooth(speed, sigma);
  std::vector<double> dpsi_s = gaussian_smooth(dpsi, sigma);

  std::vector<double> accel(n, 0.0), yaw_rate(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      accel[i] = (v[1] - v[0]) * rate;
    } else if (i == n - 1) {
      accel[i] = (v[i] - v[i - 1]) * rate;
    } else {
      accel[i] = (v[i + 1] - v[i - 1]) * rate / 2.0;
    }
    yaw_rate[i] = dpsi_s[i] * rate;
  }

  const std::size_t sustain = std::max<std::size_t>(1, frames_for(params.sustain_s, rate));
  auto sustained = [&](const std::vector<double>& sig, std::size_t i, double thr) {
    if (i + sustain > n) return false;
    for (std::size_t j = i; j < i + sustain; ++j) {
      if (std::abs(sig[j]) <= thr) return false;
    }
    return true;
  };

  std::vector<Boundary> candidates;
  for (std::size_t i = 1; i < n; ++i) {
    bool below_prev = v[i - 1] < params.stop_speed_mps;
    bool below_now = v[i] < params.stop_speed_mps;
    if (!below_prev && below_now) candidates.push_back({i, ChunkTrigger::stopped_entry});
    if (below_prev && !below_now) candidates.push_back({i, ChunkTrigger::stopped_exit});
    if (std::abs(accel[i]) > params.accel_onset_mps2 &&
        std::abs(accel[i - 1]) <= params.accel_onset_mps2 &&
        sustained(accel, i, params.accel_onset_mps2)) {
      candidates.push_back({i, ChunkTrigger::accel_onset});
    }
    if (std::abs(yaw_rate[i]) > params.yaw_onset_deg_s &&
        std::abs(yaw_rate[i - 1]) <= params.yaw_onset_deg_s &&
        sustained(yaw_rate, i, params.yaw_onset_deg_s)) {
      candidates.push_back({i, ChunkTrigger::turn_onset});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Boundary& a, const Boundary& b) {
                     if (a.frame != b.frame) return a.frame < b.frame;
                     return trigger_priority(a.trigger) < trigger_priority(b.trigger);
                   });

  const std::size_t margin = frames_for(params.min_separation_s, rate);
  std::vector<Boundary> cuts;
  cuts.push_back({0, ChunkTrigger::log_start});
  for (const Boundary& c : candidates) {
    if (c.frame + margin > n - 1) continue;              // too close to the end
    if (c.frame - cuts.back().frame < margin) continue;  // crowds the previous cut
    cuts.push_back(c);
  }
  cuts.push_back({n - 1, ChunkTrigger::log_end});

  const std::size_t max_f = frames_for(params.max_chunk_s, rate);
  const std::size_t min_f = frames_for(params.min_chunk_s, rate);
  const std::size_t short_f = frames_for(params.short_terminal_s, rate);

  // Subdivide each hard segment into piece lengths (in frames).
  std::vector<Boundary> edges;  // cut after each piece, carrying its reason
  edges.push_back(cuts.front());
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const std::size_t a = cuts[s].frame;
    const std::size_t b = cuts[s + 1].frame;
    const bool terminal = (s + 2 == cuts.size());
    const std::size_t span = b - a;
    std::vector<std::size_t> lens;
    std::size_t k = span / max_f;
    std::size_t r = span - k * max_f;
    if (r == 0) {
      lens.assign(k, max_f);
    } else if (k == 0) {
      lens.push_back(span);
    } else if (r >= min_f || (terminal && r >= short_f)) {
      lens.assign(k, max_f);
      lens.push_back(r);
    } else {
      // Remainder too small to stand alone: rebalance it with the last full
      // piece so both halves stay at least the minimum length.
      lens.assign(k - 1, max_f);
      auto [p, q] = split_span(max_f + r);
      lens.push_back(p);
      lens.push_back(q);
    }
    std::size_t pos = a;
    for (std::size_t i = 0; i < lens.size(); ++i) {
      pos += lens[i];
      Boundary edge;
      edge.frame = pos;
      edge.trigger = (i + 1 == lens.size()) ? cuts[s + 1].trigger
                                            : ChunkTrigger::max_duration;
      edges.push_back(edge);
    }
  }

  std::vector<Chunk> chunks;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Chunk c;
    c.first_frame = edges[i].frame;
    c.last_frame = edges[i + 1].frame;
    c.t_begin = log.states[c.first_frame].t;
    c.t_end = log.states[c.last_frame].t;
    // The final chunk's right edge is just "the log ended"; report the reason
    // of the boundary to its left instead.
    c.trigger = (i + 2 == edges.size()) ? edges[i].trigger : edges[i + 1].trigger;
    c.flagged_short = (i + 2 == edges.size()) &&
                      (c.last_frame - c.first_frame < min_f);
    chunks.push_back(c);
  }
  return chunks;
}

// ---------------------------------------------------------------------------
// Projection overlays

ProjectionResult project_points(const CameraModel& camera,
                                const std::vector<Eigen::Vector3d>& world) {
  camera.validate();
  ProjectionResult result;
  for (std::size_t i = 0; i < world.size(); ++i) {
    Eigen::Vector3d cam = camera.rotation * world[i] + camera.translation;
    if (cam.z() <= 0.1) {  // behind or grazing the image plane
      result.clipped = true;
      continue;
    }
    double u = camera.fx * cam.x() / cam.z() + camera.cx;
    double v = camera.fy * cam.y() / cam.z() + camera.cy;
    if (u < 0.0 || u >= camera.width || v < 0.0 || v >= camera.height) {
      result.clipped = true;
      continue;
    }
    result.points.push_back({u, v, i});
  }
  return result;
}

std::array<std::uint8_t, 3> Overlay::pixel(int x, int y) const {
  if (x < 0 || y < 0 || x >= width || y >= height) {
    throw InvalidArgumentError("overlay pixel out of range");
  }
  std::size_t idx = (static_cast<std::size_t>(y) * width + x) * 3;
  return {rgb[idx], rgb[idx + 1], rgb[idx + 2]};
}

namespace {

using Color = std::array<std::uint8_t, 3>;
constexpr Color kGreen{0, 200, 0};
constexpr Color kYellow{230, 200, 0};
constexpr Color kRed{220, 30, 30};
constexpr Color kCyan{0, 220, 220};

void put_pixel(Overlay& o, int x, int y, const Color& c) {
  if (x < 0 || y < 0 || x >= o.width || y >= o.height) return;
  std::size_t idx = (static_cast<std::size_t>(y) * o.width + x) * 3;
  o.rgb[idx] = c[0];
  o.rgb[idx + 1] = c[1];
  o.rgb[idx + 2] = c[2];
}

void put_dot(Overlay& o, int x, int y, const Color& c) {
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) put_pixel(o, x + dx, y + dy, c);
}

void draw_segment(Overlay& o, double u0, double v0, double u1, double v1,
                  const Color& c) {
  double du = u1 - u0;
  double dv = v1 - v0;
  int steps = static_cast<int>(std::ceil(std::max(std::abs(du), std::abs(dv)))) + 1;
  for (int i = 0; i <= steps; ++i) {
    double t = static_cast<double>(i) / steps;
    put_dot(o, static_cast<int>(std::lround(u0 + t * du)),
            static_cast<int>(std::lround(v0 + t * dv)), c);
  }
}

void draw_disc(Overlay& o, int cx, int cy, int radius, const Color& c) {
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) put_pixel(o, cx + dx, cy + dy, c);
    }
  }
}

}  // namespace

Overlay render_trajectory_overlay(const TrajectoryLog& log, std::size_t frame,
                                  std::size_t horizon_frames) {
  if (!log.camera) throw InvalidArgumentError("trajectory log carries no camera");
  if (frame >= log.states.size()) throw InvalidArgumentError("frame out of range");
  const CameraModel& camera = *log.camera;
  camera.validate();

  std::size_t last = std::min(frame + horizon_frames, log.states.size() - 1);
  std::vector<Eigen::Vector3d> world;
  for (std::size_t i = frame; i <= last; ++i) {
    world.emplace_back(log.states[i].x, log.states[i].y, 0.0);
  }
  ProjectionResult proj = project_points(camera, world);
  if (proj.points.empty()) {
    throw EmptyOverlayError("no trajectory point projects into the image");
  }

  Overlay overlay;
  overlay.width = camera.width;
  overlay.height = camera.height;
  overlay.rgb.assign(static_cast<std::size_t>(camera.width) * camera.height * 3, 0);
  overlay.clipped = proj.clipped;
  overlay.retained = proj.points.size();

  const std::size_t count = proj.points.size();
  const std::size_t third = (count + 2) / 3;
  auto color_at = [&](std::size_t i) -> const Color& {
    if (i < third) return kGreen;
    if (i < 2 * third) return kYellow;
    return kRed;
  };
  for (std::size_t i = 0; i + 1 < count; ++i) {
    draw_segment(overlay, proj.points[i].u, proj.points[i].v,
                 proj.points[i + 1].u, proj.points[i + 1].v, color_at(i));
  }
  if (count == 1) {
    put_dot(overlay, static_cast<int>(std::lround(proj.points[0].u)),
            static_cast<int>(std::lround(proj.points[0].v)), kGreen);
  }
  draw_disc(overlay, static_cast<int>(std::lround(proj.points.back().u)),
            static_cast<int>(std::lround(proj.points.back().v)), 6, kCyan);
  return overlay;
}

std::string encode_ppm(const Overlay& overlay) {
  if (overlay.width <= 0 || overlay.height <= 0 ||
      overlay.rgb.size() !=
          static_cast<std::size_t>(overlay.width) * overlay.height * 3) {
    throw InvalidArgumentError("overlay buffer does not match its dimensions");
  }
  std::ostringstream out;
  out << "P6\n" << overlay.width << " " << overlay.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(overlay.rgb.data()),
            static_cast<std::streamsize>(overlay.rgb.size()));
  return out.str();
}

void write_ppm(const Overlay& overlay, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  std::string bytes = encode_ppm(overlay);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path);
}

std::string overlay_file_name(const std::string& log_id, std::size_t frame) {
  return log_id + "_" + std::to_string(frame) + "_overlay.ppm";
}

// ---------------------------------------------------------------------------
// Labels

std::string to_string(LabelProvenance p) {
  switch (p) {
    case LabelProvenance::deterministic: return "deterministic";
    case LabelProvenance::model_refined: return "model_refined";
  }
  throw InvalidArgumentError("unknown label provenance");
}

LabelProvenance label_provenance_from_string(const std::string& s) {
  if (s == "deterministic") return LabelProvenance::deterministic;
  if (s == "model_refined") return LabelProvenance::model_refined;
  throw ParseError("unknown label provenance: " + s);
}

namespace {

std::string format_1f(double value, const char* unit) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f%s", value, unit);
  return buf;
}

std::string format_2f(double value, const char* unit) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f%s", value, unit);
  return buf;
}

std::vector<std::size_t> sample_frames(const Chunk& chunk, double rate_hz) {
  std::size_t stride = std::max<std::size_t>(1, frames_for(0.5, rate_hz));
  std::vector<std::size_t> frames;
  for (std::size_t f = chunk.first_frame; f <= chunk.last_frame; f += stride) {
    frames.push_back(f);
  }
  if (frames.back() != chunk.last_frame) frames.push_back(chunk.last_frame);
  return frames;
}

}  // namespace

std::string ego_states_text(const TrajectoryLog& log, const Chunk& chunk) {
  if (chunk.last_frame >= log.states.size() || chunk.first_frame > chunk.last_frame) {
    throw InvalidArgumentError("chunk frames out of range");
  }
  std::vector<std::string> lines;
  for (std::size_t f : sample_frames(chunk, log.rate_hz)) {
    const EgoState& s = log.states[f];
    std::string line = "t=" + format_1f(s.t - chunk.t_begin, "s") +
                       " speed=" + format_2f(s.speed_mps, " m/s") +
                       " course=" + format_1f(s.heading_deg, " deg");
    lines.push_back(line);
  }
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += "\n";
    out += lines[i];
  }
  return out;
}

std::string lane_information_text(const TrajectoryLog& log, const Chunk& chunk) {
  if (chunk.last_frame >= log.states.size() || chunk.first_frame > chunk.last_frame) {
    throw InvalidArgumentError("chunk frames out of range");
  }
  std::vector<int> ids;
  bool any = false;
  for (std::size_t f : sample_frames(chunk, log.rate_hz)) {
    if (log.states[f].lane_id) {
      ids.push_back(*log.states[f].lane_id);
      any = true;
    }
  }
  if (!any) return "Lane ids are unavailable.";
  std::string out = "Lane id sequence (sampled):";
  for (int id : ids) out += " " + std::to_string(id);
  out += "; lane ids grow to the right.";
  return out;
}

std::string extract_refined_sentence(const std::string& response) {
  std::vector<std::string> lines;
  {
    std::istringstream in(response);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  auto strip = [](const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return std::string();
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
  };
  // A section heading is "2." optionally prefixed by markdown hashes.
  auto is_section2 = [&](const std::string& raw) {
    std::string s = strip(raw);
    std::size_t i = 0;
    while (i < s.size() && s[i] == '#') ++i;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.compare(i, 2, "2.") == 0;
  };
  auto try_parse = [&](std::string text) -> std::optional<std::string> {
    text = strip(text);
    while (text.size() >= 2 && (text.front() == '"' || text.front() == '\'') &&
           text.back() == text.front()) {
      text = strip(text.substr(1, text.size() - 2));
    }
    if (text.empty()) return std::nullopt;
    try {
      parse_meta_action(text);
      return text;
    } catch (const ParseError&) {
      return std::nullopt;
    }
  };

  std::ptrdiff_t section = -1;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_section2(lines[i])) section = static_cast<std::ptrdiff_t>(i);
  }
  if (section >= 0) {
    // Text may share the heading line after the marker.
    std::string head = strip(lines[section]);
    std::size_t i = 0;
    while (i < head.size() && head[i] == '#') ++i;
    while (i < head.size() && (head[i] == ' ' || head[i] == '\t')) ++i;
    std::string rest = head.substr(i + 2);
    if (auto got = try_parse(rest)) return *got;
    for (std::size_t j = section + 1; j < lines.size(); ++j) {
      if (auto got = try_parse(lines[j])) return *got;
    }
  }
  // No usable section: scan every line from the end.
  for (std::size_t j = lines.size(); j-- > 0;) {
    if (auto got = try_parse(lines[j])) return *got;
  }
  throw ParseError("no refined behavior sentence found in response");
}

BaselineAction implied_baseline(const MetaAction& meta) {
  if (meta.speed == SpeedBehavior::stationary) {
    return BaselineAction::completely_stationary;
  }
  switch (meta.heading) {
    case HeadingBehavior::u_turn: return BaselineAction::making_u_turn;
    case HeadingBehavior::turn_left: return BaselineAction::turning_left;
    case HeadingBehavior::turn_right: return BaselineAction::turning_right;
    case HeadingBehavior::lane_change_left: return BaselineAction::changing_lanes_left;
    case HeadingBehavior::lane_change_right: return BaselineAction::changing_lanes_right;
    default: return BaselineAction::continuing_straight;
  }
}

namespace {

LabelRecord base_record(const TrajectoryLog& log, const std::string& log_id,
                        int chunk_index, const Chunk& chunk,
                        const LabelerOptions& options) {
  LabelRecord rec;
  rec.log_id = log_id;
  rec.chunk_index = chunk_index;
  rec.first_frame = chunk.first_frame;
  rec.last_frame = chunk.last_frame;
  rec.t_begin = chunk.t_begin;
  rec.t_end = chunk.t_end;
  rec.trigger = chunk.trigger;
  rec.flagged_short = chunk.flagged_short;
  rec.stats = compute_chunk_stats(log, chunk.first_frame, chunk.last_frame);
  BaselineClassification cls = classify_baseline_action(
      log, chunk.first_frame, chunk.last_frame, options.thresholds);
  rec.baseline = cls.action;
  rec.baseline_low_confidence = cls.low_confidence;
  return rec;
}

void finish_deterministic(LabelRecord& rec, const LabelerOptions& options) {
  rec.meta = refine_meta_action(rec.baseline, rec.stats, options.thresholds);
  rec.description = render_meta_action(rec.meta);
  rec.reasoning = build_reasoning_label(rec.meta);
  rec.provenance = LabelProvenance::deterministic;
}

ChatRequest make_request(const LabelerOptions& options, std::string prompt,
                         std::vector<std::string> images = {}) {
  ChatRequest req;
  req.model_id = options.model_id;
  req.prompt = std::move(prompt);
  req.images = std::move(images);
  req.temperature = options.temperature;
  req.max_tokens = options.max_tokens;
  return req;
}

}  // namespace

LabelRecord label_chunk(const TrajectoryLog& log, const std::string& log_id,
                        int chunk_index, const Chunk& chunk,
                        const LabelerOptions& options) {
  LabelRecord rec = base_record(log, log_id, chunk_index, chunk, options);
  finish_deterministic(rec, options);
  return rec;
}

LabelRecord label_chunk_model(const TrajectoryLog& log, const std::string& log_id,
                              int chunk_index, const Chunk& chunk,
                              VlmClient& client, const LabelerOptions& options) {
  LabelRecord rec = base_record(log, log_id, chunk_index, chunk, options);

  auto fall_back = [&]() -> LabelRecord {
    finish_deterministic(rec, options);
    rec.fell_back = true;
    return rec;
  };

  // Stage 1: pick the coarse action from two overlay frames.
  std::string ego_text = ego_states_text(log, chunk);
  std::optional<BaselineAction> stage1;
  if (!log.camera) return fall_back();
  try {
    std::size_t mid = chunk.first_frame + (chunk.last_frame - chunk.first_frame) / 2;
    std::string img_first = encode_ppm(render_trajectory_overlay(
        log, chunk.first_frame, chunk.last_frame - chunk.first_frame));
    std::string img_mid = encode_ppm(
        render_trajectory_overlay(log, mid, chunk.last_frame - mid));
    std::string prompt = build_prompt(
        PromptKind::baseline_nuscenes,
        {{"ego_states_text", ego_text},
         {"lane_information", lane_information_text(log, chunk)}});
    ChatRequest req = make_request(options, prompt, {img_first, img_mid});
    rec.prompt_hash = request_hash(req);
    std::string resp = client.complete(req);
    stage1 = find_baseline_phrase(resp);
  } catch (const EmptyOverlayError&) {
    return fall_back();
  }
  if (!stage1) return fall_back();
  rec.baseline = *stage1;
  rec.baseline_low_confidence = false;

  // Stage 2: refine the phrase into a full meta-action sentence.
  std::string described = "The vehicle is " + baseline_phrase(*stage1) + ".";
  std::string prompt2 = build_prompt(PromptKind::stage2_refine,
                                     {{"driving_description", described},
                                      {"ego_state_sequence", ego_text}});
  ChatRequest req2 = make_request(options, prompt2);
  rec.prompt_hash = request_hash(req2);
  std::string resp2 = client.complete(req2);
  MetaAction meta;
  try {
    meta = parse_meta_action(extract_refined_sentence(resp2));
  } catch (const ParseError&) {
    return fall_back();
  }
  if (implied_baseline(meta) != *stage1) return fall_back();

  rec.meta = normalize_meta_action(meta);
  rec.description = render_meta_action(rec.meta);
  rec.reasoning = build_reasoning_label(rec.meta);
  rec.provenance = LabelProvenance::model_refined;
  return rec;
}

std::vector<LabelRecord> label_trajectory(const TrajectoryLog& log,
                                          const std::string& log_id,
                                          const LabelerOptions& options,
                                          VlmClient* client) {
  if (options.use_model && !client) {
    throw ConfigError("model labeling requested without a client");
  }
  std::vector<Chunk> chunks = chunk_trajectory(log, options.chunker);
  std::vector<LabelRecord> records;
  records.reserve(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    int idx = static_cast<int>(i);
    if (options.use_model) {
      records.push_back(label_chunk_model(log, log_id, idx, chunks[i], *client, options));
    } else {
      records.push_back(label_chunk(log, log_id, idx, chunks[i], options));
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// JSONL serialization

namespace {

constexpr const char* kLabelSchema = "steerbench.labels/1";

nlohmann::ordered_json meta_to_json(const MetaAction& meta) {
  nlohmann::ordered_json j;
  j["speed"] = to_string(meta.speed);
  j["speed_intensity"] = to_string(meta.speed_intensity);
  j["heading"] = to_string(meta.heading);
  j["heading_extent"] = to_string(meta.heading_extent);
  j["style"] = to_string(meta.style);
  if (meta.referent) j["referent"] = *meta.referent;
  return j;
}

MetaAction meta_from_json(const nlohmann::json& j) {
  MetaAction meta;
  meta.speed = speed_behavior_from_string(j.at("speed").get<std::string>());
  meta.speed_intensity =
      speed_intensity_from_string(j.at("speed_intensity").get<std::string>());
  meta.heading = heading_behavior_from_string(j.at("heading").get<std::string>());
  meta.heading_extent =
      heading_extent_from_string(j.at("heading_extent").get<std::string>());
  meta.style = driving_style_from_string(j.at("style").get<std::string>());
  if (j.contains("referent")) meta.referent = j.at("referent").get<std::string>();
  return meta;
}

}  // namespace

void write_label_records(std::ostream& out,
                         const std::vector<LabelRecord>& records) {
  nlohmann::ordered_json header;
  header["schema"] = kLabelSchema;
  out << header.dump() << "\n";
  for (const LabelRecord& rec : records) {
    nlohmann::ordered_json j;
    j["log_id"] = rec.log_id;
    j["chunk_index"] = rec.chunk_index;
    j["first_frame"] = rec.first_frame;
    j["last_frame"] = rec.last_frame;
    j["t_begin"] = rec.t_begin;
    j["t_end"] = rec.t_end;
    j["trigger"] = to_string(rec.trigger);
    j["flagged_short"] = rec.flagged_short;
    j["baseline"] = to_string(rec.baseline);
    j["baseline_low_confidence"] = rec.baseline_low_confidence;
    j["meta"] = meta_to_json(rec.meta);
    j["description"] = rec.description;
    j["reasoning"] = rec.reasoning;
    j["provenance"] = to_string(rec.provenance);
    j["fell_back"] = rec.fell_back;
    if (rec.prompt_hash) j["prompt_hash"] = *rec.prompt_hash;
    nlohmann::ordered_json stats;
    stats["duration_s"] = rec.stats.duration_s;
    stats["mean_accel_mps2"] = rec.stats.mean_accel_mps2;
    stats["total_course_change_deg"] = rec.stats.total_course_change_deg;
    stats["max_speed_mps"] = rec.stats.max_speed_mps;
    j["stats"] = stats;
    out << j.dump() << "\n";
  }
}

std::vector<LabelRecord> read_label_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("label file is empty");
  nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.contains("schema") ||
      header.at("schema") != kLabelSchema) {
    throw ParseError("label file missing schema header");
  }
  std::vector<LabelRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ParseError("label file line " + std::to_string(line_no) +
                       " is not valid JSON");
    }
    LabelRecord rec;
    rec.log_id = j.at("log_id").get<std::string>();
    rec.chunk_index = j.at("chunk_index").get<int>();
    rec.first_frame = j.at("first_frame").get<std::size_t>();
    rec.last_frame = j.at("last_frame").get<std::size_t>();
    rec.t_begin = j.at("t_begin").get<double>();
    rec.t_end = j.at("t_end").get<double>();
    rec.trigger = chunk_trigger_from_string(j.at("trigger").get<std::string>());
    rec.flagged_short = j.at("flagged_short").get<bool>();
    rec.baseline = baseline_action_from_string(j.at("baseline").get<std::string>());
    rec.baseline_low_confidence = j.at("baseline_low_confidence").get<bool>();
    rec.meta = meta_from_json(j.at("meta"));
    rec.description = j.at("description").get<std::string>();
    rec.reasoning = j.at("reasoning").get<std::string>();
    rec.provenance =
        label_provenance_from_string(j.at("provenance").get<std::string>());
    rec.fell_back = j.at("fell_back").get<bool>();
    if (j.contains("prompt_hash")) {
      rec.prompt_hash = j.at("prompt_hash").get<std::string>();
    }
    const nlohmann::json& stats = j.at("stats");
    rec.stats.duration_s = stats.at("duration_s").get<double>();
    rec.stats.mean_accel_mps2 = stats.at("mean_accel_mps2").get<double>();
    rec.stats.total_course_change_deg =
        stats.at("total_course_change_deg").get<double>();
    rec.stats.max_speed_mps = stats.at("max_speed_mps").get<double>();
    records.push_back(std::move(rec));
  }
  return records;
}

void save_label_records(const std::vector<LabelRecord>& records,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_label_records(out, records);
  if (!out) throw Error("failed writing " + path);
}

std::vector<LabelRecord> load_label_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_label_records(in);
}

}  // namespace steerbench
