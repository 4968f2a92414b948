// steerbench: evaluate driving policies on scripted scenarios, label logged
// trajectories, and inspect the artifacts both produce.
//
// Exit codes: 0 success, 2 configuration or input error, 3 missing fixtures
// (replay asked for requests that were never recorded), 4 internal error.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "steerbench/errors.hpp"
#include "steerbench/high_level.hpp"
#include "steerbench/labeler.hpp"
#include "steerbench/metrics.hpp"
#include "steerbench/sim.hpp"
#include "steerbench/vlm_client.hpp"

namespace fs = std::filesystem;
using namespace steerbench;

namespace {

constexpr const char* kMissingFixturePrefix = "no fixture for request hash ";

struct ModelFlags {
  bool use_model = false;
  std::string mode = "replay";
  bool replay_shortcut = false;
  std::string endpoint;
  std::string model_id;
  std::string fixture_dir = "./fixtures";
  double temperature = 0.0;
  int max_tokens = 256;
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags, const char* use_desc) {
  cmd->add_flag("--model", flags.use_model, use_desc);
  cmd->add_option("--mode", flags.mode, "Client mode: live, record, or replay")
      ->check(CLI::IsMember({"live", "record", "replay"}));
  cmd->add_flag("--replay", flags.replay_shortcut, "Shorthand for --mode replay");
  cmd->add_option("--endpoint", flags.endpoint,
                  "Chat-completions base URL (live and record modes)");
  cmd->add_option("--model-id", flags.model_id, "Model identifier to request");
  cmd->add_option("--fixture-dir", flags.fixture_dir,
                  "Directory of recorded request fixtures");
  cmd->add_option("--temperature", flags.temperature, "Sampling temperature");
  cmd->add_option("--max-tokens", flags.max_tokens, "Response token budget");
}

std::shared_ptr<VlmClient> make_client(const ModelFlags& flags) {
  ClientMode mode = client_mode_from_string(
      flags.replay_shortcut ? "replay" : flags.mode);
  std::shared_ptr<Transport> transport;
  if (mode == ClientMode::replay) {
    transport = std::make_shared<NullTransport>();
  } else {
    if (flags.endpoint.empty()) {
      throw ConfigError("--endpoint is required for live and record modes");
    }
    EndpointConfig endpoint;
    endpoint.base_url = flags.endpoint;
    if (!std::getenv(endpoint.api_key_env.c_str())) {
      throw ConfigError("environment variable " + endpoint.api_key_env +
                        " is not set; it must hold the endpoint credential");
    }
    transport = std::make_shared<HttpTransport>(endpoint);
  }
  auto store = std::make_shared<FixtureStore>(flags.fixture_dir);
  return std::make_shared<VlmClient>(mode, transport, store);
}

std::optional<std::string> missing_fixture_hash(const std::string& reason) {
  if (reason.rfind(kMissingFixturePrefix, 0) != 0) return std::nullopt;
  std::string rest = reason.substr(std::string(kMissingFixturePrefix).size());
  std::size_t end = rest.find_first_not_of("0123456789abcdef");
  return rest.substr(0, end);
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string scenario_dir = "./data/scenarios";
  std::vector<std::string> scenarios;
  std::string suite;
  std::uint64_t seed = 0;
  int repeats = 1;
  int jobs = 1;
  std::string policy = "rule";
  ModelFlags model;
  std::string out_dir;
  std::string csv_path;
  bool plot = false;
  bool dry_run = false;
};

std::vector<std::string> resolve_scenarios(const EvaluateArgs& args) {
  std::vector<std::string> paths;
  if (!args.suite.empty()) {
    if (args.suite != "longtail") {
      throw ConfigError("unknown suite '" + args.suite + "' (valid: longtail)");
    }
    if (!fs::is_directory(args.scenario_dir)) {
      throw ConfigError("scenario directory not found: " + args.scenario_dir);
    }
    for (const auto& entry : fs::directory_iterator(args.scenario_dir)) {
      if (entry.path().extension() == ".json") {
        paths.push_back(entry.path().string());
      }
    }
    std::sort(paths.begin(), paths.end());
  }
  for (const std::string& s : args.scenarios) {
    if (s.find('/') != std::string::npos ||
        fs::path(s).extension() == ".json") {
      paths.push_back(s);
    } else {
      paths.push_back((fs::path(args.scenario_dir) / (s + ".json")).string());
    }
  }
  if (paths.empty()) {
    throw ConfigError("no scenarios selected; pass --scenario or --suite longtail");
  }
  return paths;
}

// A synthetic straight-down camera covering the driven region, for plots.
CameraModel top_down_camera(const TrajectoryLog& log) {
  double min_x = log.states.front().x, max_x = min_x;
  double min_y = log.states.front().y, max_y = min_y;
  for (const EgoState& s : log.states) {
    min_x = std::min(min_x, s.x);
    max_x = std::max(max_x, s.x);
    min_y = std::min(min_y, s.y);
    max_y = std::max(max_y, s.y);
  }
  double span_x = std::max(max_x - min_x, 1.0);
  double span_y = std::max(max_y - min_y, 1.0);
  CameraModel cam;
  cam.width = 960;
  cam.height = 540;
  double px_per_m = std::min((cam.width - 60) / span_y, (cam.height - 60) / span_x);
  const double altitude = 50.0;
  cam.fx = px_per_m * altitude;
  cam.fy = px_per_m * altitude;
  cam.cx = cam.width / 2.0;
  cam.cy = cam.height / 2.0;
  // Image right = world +y, image down = world +x, optical axis = world -z.
  cam.rotation << 0, 1, 0,
                  1, 0, 0,
                  0, 0, -1;
  Eigen::Vector3d center((min_x + max_x) / 2.0, (min_y + max_y) / 2.0, altitude);
  cam.translation = -cam.rotation * center;
  return cam;
}

int cmd_evaluate(const EvaluateArgs& args) {
  std::vector<std::string> paths = resolve_scenarios(args);
  if (args.repeats < 1) throw ConfigError("--repeats must be at least 1");
  if (args.jobs < 1) throw ConfigError("--jobs must be at least 1");
  if (args.policy != "rule" && args.policy != "model") {
    throw ConfigError("unknown policy '" + args.policy + "' (valid: rule, model)");
  }

  struct Job {
    ScenarioConfig config;
    std::uint64_t seed = 0;
  };
  std::vector<Job> jobs;
  for (const std::string& path : paths) {
    ScenarioConfig config = load_scenario(path);
    for (int r = 0; r < args.repeats; ++r) {
      jobs.push_back({config, args.seed + static_cast<std::uint64_t>(r)});
    }
  }

  if (args.dry_run) {
    for (const Job& job : jobs) {
      std::cout << "would run " << job.config.name << " seed " << job.seed << "\n";
    }
    return 0;
  }

  std::shared_ptr<VlmClient> client;
  ModelPolicyOptions model_options;
  if (args.policy == "model") {
    client = make_client(args.model);
    model_options.model_id = args.model.model_id;
    model_options.temperature = args.model.temperature;
    model_options.max_tokens = args.model.max_tokens;
  }

  std::vector<EpisodeResult> results(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        ScenarioWorld world = make_world(jobs[i].config, jobs[i].seed);
        std::unique_ptr<PolicyStack> stack;
        if (args.policy == "model") {
          stack = std::make_unique<ModelPolicyStack>(client, model_options);
        } else {
          stack = std::make_unique<ReferencePolicyStack>();
        }
        results[i] = run_episode(world, *stack);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  int n_threads = std::min<int>(args.jobs, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (std::exception_ptr& p : failures) {
    if (p) std::rethrow_exception(p);
  }

  std::vector<std::string> missing;
  for (const EpisodeResult& r : results) {
    if (!r.aborted) continue;
    if (auto hash = missing_fixture_hash(r.abort_reason)) {
      if (std::find(missing.begin(), missing.end(), *hash) == missing.end()) {
        missing.push_back(*hash);
      }
    }
  }
  if (!missing.empty()) {
    std::cerr << "missing fixtures for " << missing.size() << " request(s):\n";
    for (const std::string& h : missing) std::cerr << "  " << h << "\n";
    std::cerr << "record them first (--mode record) or point --fixture-dir at "
                 "the recorded set\n";
    return 3;
  }

  if (!args.out_dir.empty()) {
    fs::create_directories(args.out_dir);
    for (const EpisodeResult& r : results) {
      std::string stem = (fs::path(args.out_dir) /
                          (r.scenario + "_seed" + std::to_string(r.seed)))
                             .string();
      save_episode(r, stem);
      if (args.plot && r.log.states.size() >= 2) {
        TrajectoryLog plotted = r.log;
        plotted.camera = top_down_camera(r.log);
        Overlay overlay = render_trajectory_overlay(
            plotted, 0, plotted.states.size() - 1);
        write_ppm(overlay, stem + "_plot.ppm");
      }
    }
  } else if (args.plot) {
    throw ConfigError("--plot requires --out-dir");
  }

  std::vector<RouteScore> routes = aggregate_by_route(results);
  std::cout << format_report(routes);
  if (!args.csv_path.empty()) {
    std::ofstream csv(args.csv_path, std::ios::binary);
    if (!csv) throw Error("cannot open " + args.csv_path + " for writing");
    write_report_csv(csv, routes);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// label

struct LabelArgs {
  std::string log_path;
  std::string log_id;
  std::string out_path;
  std::string overlay_dir;
  ModelFlags model;
};

int cmd_label(const LabelArgs& args) {
  TrajectoryLog log = load_trajectory_log(args.log_path);
  std::string log_id = args.log_id.empty()
                           ? fs::path(args.log_path).stem().string()
                           : args.log_id;
  std::string out_path = args.out_path.empty()
                             ? log_id + ".labels.jsonl"
                             : args.out_path;

  LabelerOptions options;
  options.use_model = args.model.use_model;
  options.model_id = args.model.model_id;
  options.temperature = args.model.temperature;
  options.max_tokens = args.model.max_tokens;

  std::shared_ptr<VlmClient> client;
  if (options.use_model) client = make_client(args.model);

  std::vector<LabelRecord> records;
  try {
    records = label_trajectory(log, log_id, options, client.get());
  } catch (const FixtureMissingError& e) {
    if (auto hash = missing_fixture_hash(e.what())) {
      std::cerr << "missing fixtures for 1 request(s):\n  " << *hash << "\n";
      return 3;
    }
    throw;
  }
  save_label_records(records, out_path);

  if (!args.overlay_dir.empty()) {
    if (!log.camera) {
      throw ConfigError("--overlay-dir needs a log that carries a camera");
    }
    fs::create_directories(args.overlay_dir);
    for (const LabelRecord& rec : records) {
      Overlay overlay = render_trajectory_overlay(
          log, rec.first_frame, rec.last_frame - rec.first_frame);
      fs::path out = fs::path(args.overlay_dir) /
                     overlay_file_name(log_id, rec.first_frame);
      write_ppm(overlay, out.string());
    }
  }

  int refined = 0, fell_back = 0;
  for (const LabelRecord& rec : records) {
    if (rec.provenance == LabelProvenance::model_refined) ++refined;
    if (rec.fell_back) ++fell_back;
  }
  std::cout << "labeled " << records.size() << " chunk(s) from " << log_id
            << " -> " << out_path << "\n";
  std::cout << "model refined " << refined << ", fell back " << fell_back
            << ", deterministic " << (records.size() - refined) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// inspect

int cmd_inspect(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string content = buffer.str();

  nlohmann::json whole = nlohmann::json::parse(content, nullptr, false);
  if (!whole.is_discarded() && whole.is_object() && whole.contains("schema") &&
      whole.at("schema") == "steerbench.episode/1") {
    std::cout << "episode summary " << path << "\n";
    std::cout << "  scenario:   " << whole.value("scenario", "") << "\n";
    std::cout << "  seed:       " << whole.value("seed", 0ull) << "\n";
    std::cout << "  steps:      " << whole.value("steps", 0) << "\n";
    std::cout << "  completion: " << whole.value("completion", 0.0) << "\n";
    std::cout << "  success:    " << (whole.value("success", false) ? "yes" : "no")
              << "\n";
    std::cout << "  collided:   " << (whole.value("collided", false) ? "yes" : "no")
              << "\n";
    if (whole.value("aborted", false)) {
      std::cout << "  aborted:    " << whole.value("abort_reason", "") << "\n";
    }
    const auto& infr = whole.at("infractions");
    std::cout << "  infractions: " << infr.size() << "\n";
    for (const auto& e : infr) {
      std::cout << "    " << e.value("kind", "") << " t=" << e.value("t", 0.0);
      std::string agent = e.value("agent_id", "");
      if (!agent.empty()) std::cout << " agent=" << agent;
      std::cout << "\n";
    }
    const auto& decisions = whole.at("decisions");
    std::cout << "  decisions:  " << decisions.size() << "\n";
    if (!decisions.empty()) {
      std::cout << "    first: " << decisions.front().value("meta", "") << "\n";
      std::cout << "    last:  " << decisions.back().value("meta", "") << "\n";
    }
    return 0;
  }

  std::istringstream lines(content);
  std::string first_line;
  if (!std::getline(lines, first_line)) throw ParseError(path + " is empty");
  nlohmann::json header = nlohmann::json::parse(first_line, nullptr, false);
  if (header.is_discarded() || !header.is_object()) {
    throw ParseError(path + " is neither an episode summary nor a JSONL artifact");
  }

  if (header.contains("schema") && header.at("schema") == "steerbench.labels/1") {
    std::istringstream replay(content);
    std::vector<LabelRecord> records = read_label_records(replay);
    std::cout << "label set " << path << " (" << records.size() << " chunks)\n";
    for (const LabelRecord& rec : records) {
      std::cout << "  [" << rec.chunk_index << "] " << rec.t_begin << "s-"
                << rec.t_end << "s " << to_string(rec.baseline) << " -> \""
                << rec.description << "\" (" << to_string(rec.provenance);
      if (rec.fell_back) std::cout << ", fell back";
      if (rec.flagged_short) std::cout << ", short";
      std::cout << ")\n";
    }
    return 0;
  }

  if (header.contains("rate_hz")) {
    TrajectoryLog log = load_trajectory_log(path);
    std::cout << "trajectory log " << path << "\n";
    std::cout << "  frames:   " << log.states.size() << "\n";
    std::cout << "  rate:     " << log.rate_hz << " Hz\n";
    std::cout << "  duration: " << log.duration() << " s\n";
    std::cout << "  camera:   " << (log.camera ? "yes" : "no") << "\n";
    if (!log.states.empty()) {
      const EgoState& a = log.states.front();
      const EgoState& b = log.states.back();
      std::cout << "  start:    (" << a.x << ", " << a.y << ") at " << a.speed_mps
                << " m/s\n";
      std::cout << "  end:      (" << b.x << ", " << b.y << ") at " << b.speed_mps
                << " m/s\n";
    }
    return 0;
  }

  throw ParseError(path + " has an unrecognized header");
}

// ---------------------------------------------------------------------------
// project

struct ProjectArgs {
  std::string log_path;
  std::size_t frame = 0;
  std::optional<std::size_t> horizon;
  std::string out_path;
};

int cmd_project(const ProjectArgs& args) {
  TrajectoryLog log = load_trajectory_log(args.log_path);
  if (log.states.empty()) throw ConfigError("log has no frames");
  if (args.frame >= log.states.size()) {
    throw ConfigError("--frame is past the end of the log");
  }
  std::size_t horizon = args.horizon
                            ? *args.horizon
                            : log.states.size() - 1 - args.frame;
  Overlay overlay = render_trajectory_overlay(log, args.frame, horizon);
  std::string log_id = fs::path(args.log_path).stem().string();
  std::string out = args.out_path.empty() ? overlay_file_name(log_id, args.frame)
                                          : args.out_path;
  write_ppm(overlay, out);
  std::cout << "wrote " << out << " (" << overlay.retained << " points"
            << (overlay.clipped ? ", clipped" : "") << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// parse-meta

int cmd_parse_meta(const std::string& sentence, bool as_json) {
  MetaAction meta = parse_meta_action(sentence);
  if (as_json) {
    nlohmann::ordered_json j;
    j["speed"] = to_string(meta.speed);
    j["speed_intensity"] = to_string(meta.speed_intensity);
    j["heading"] = to_string(meta.heading);
    j["heading_extent"] = to_string(meta.heading_extent);
    j["style"] = to_string(meta.style);
    if (meta.referent) j["referent"] = *meta.referent;
    j["canonical"] = render_meta_action(meta);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "speed:     " << to_string(meta.speed) << " ("
              << to_string(meta.speed_intensity) << ")\n";
    std::cout << "heading:   " << to_string(meta.heading) << " ("
              << to_string(meta.heading_extent) << ")\n";
    std::cout << "style:     " << to_string(meta.style) << "\n";
    if (meta.referent) std::cout << "referent:  " << *meta.referent << "\n";
    std::cout << "canonical: " << render_meta_action(meta) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steerbench: closed-loop driving policy harness and auto-labeler"};
  app.require_subcommand(1);

  EvaluateArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "evaluate", "Run scenarios against a policy and report driving scores");
  eval->add_option("--scenario-dir", eval_args.scenario_dir,
                   "Directory of scenario JSON files")
      ->capture_default_str();
  eval->add_option("--scenario", eval_args.scenarios,
                   "Scenario name or JSON path (repeatable)");
  eval->add_option("--suite", eval_args.suite, "Named scenario suite (longtail)");
  eval->add_option("--seed", eval_args.seed, "Base seed")->capture_default_str();
  eval->add_option("--repeats", eval_args.repeats,
                   "Episodes per scenario, seeds counting up from --seed")
      ->capture_default_str();
  eval->add_option("--jobs", eval_args.jobs, "Worker threads")
      ->capture_default_str();
  eval->add_option("--policy", eval_args.policy, "Policy: rule or model")
      ->capture_default_str();
  eval->add_option("--out-dir", eval_args.out_dir,
                   "Write per-episode logs and summaries here");
  eval->add_option("--csv", eval_args.csv_path, "Write the report as CSV");
  eval->add_flag("--plot", eval_args.plot,
                 "Write a top-down PPM plot per episode (needs --out-dir)");
  eval->add_flag("--dry-run", eval_args.dry_run,
                 "List the planned runs without executing");
  add_model_flags(eval, eval_args.model, "Unused; --policy model selects the model");

  LabelArgs label_args;
  CLI::App* label = app.add_subcommand(
      "label", "Chunk a trajectory log and emit meta-action labels");
  label->add_option("--log", label_args.log_path, "Trajectory JSONL file")
      ->required();
  label->add_option("--log-id", label_args.log_id,
                    "Log id for records (default: file stem)");
  label->add_option("--out", label_args.out_path,
                    "Output labels path (default: <log-id>.labels.jsonl)");
  label->add_option("--overlay-dir", label_args.overlay_dir,
                    "Also write one overlay PPM per chunk");
  add_model_flags(label, label_args.model,
                  "Refine labels with the model instead of rules alone");

  std::string inspect_path;
  CLI::App* inspect = app.add_subcommand(
      "inspect", "Summarize an episode, label, or trajectory artifact");
  inspect->add_option("path", inspect_path, "Artifact file")->required();

  ProjectArgs project_args;
  CLI::App* project = app.add_subcommand(
      "project", "Render a trajectory overlay PPM from a logged camera");
  project->add_option("--log", project_args.log_path, "Trajectory JSONL file")
      ->required();
  project->add_option("--frame", project_args.frame, "Start frame")
      ->capture_default_str();
  std::size_t horizon_value = 0;
  CLI::Option* horizon_opt = project->add_option(
      "--horizon", horizon_value, "Frames ahead to draw (default: to log end)");
  project->add_option("--out", project_args.out_path,
                      "Output PPM path (default: <log>_<frame>_overlay.ppm)");

  std::string sentence;
  bool meta_json = false;
  CLI::App* parse_meta = app.add_subcommand(
      "parse-meta", "Parse a meta-action sentence and print its fields");
  parse_meta->add_option("sentence", sentence, "Sentence to parse")->required();
  parse_meta->add_flag("--json", meta_json, "Emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*eval) return cmd_evaluate(eval_args);
    if (*label) return cmd_label(label_args);
    if (*inspect) return cmd_inspect(inspect_path);
    if (*project) {
      if (horizon_opt->count() > 0) project_args.horizon = horizon_value;
      return cmd_project(project_args);
    }
    if (*parse_meta) return cmd_parse_meta(sentence, meta_json);
    return 2;
  } catch (const FixtureMissingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (auto hash = missing_fixture_hash(e.what())) {
      std::cerr << "missing fixtures:\n  " << *hash << "\n";
    }
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
