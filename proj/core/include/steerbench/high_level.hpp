#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "steerbench/controller.hpp"
#include "steerbench/meta_action.hpp"
#include "steerbench/sim.hpp"
#include "steerbench/vlm_client.hpp"

namespace steerbench {

// One scene line per agent, e.g.
// "Red car, in one lane to the left, traveling same direction, at 6.1 m/s."
// Speeds round half up to one decimal. Pedestrian lines carry an intent hint.
std::string build_agent_line(const AgentBox& box, double ego_heading_deg);

// Up to max_lines agent lines, same-lane agents first, then by distance.
std::vector<std::string> build_scene_lines(const Observation& obs,
                                           std::size_t max_lines = 3);

// Scene lines joined into one paragraph; a fixed phrase when nothing is
// visible.
std::string describe_scene(const Observation& obs);

// Deterministic one-sentence justification for a meta-action, used by the
// rule-based policy fallback and the offline labeler.
std::string build_reasoning_label(const MetaAction& meta);

// Priority-ordered hazard rules: vulnerable road users, crossing traffic,
// emergency vehicles, same-lane blockers, routing, then free road. Pure.
DecisionRecord decide_rule_based(const Observation& obs);

struct ModelPolicyOptions {
  std::string model_id;
  double temperature = 0.0;
  int max_tokens = 256;
};

// Fills the zero-shot planning template from an observation.
std::map<std::string, std::string> zero_shot_values(const Observation& obs);
std::string format_speed_history(const HistorySnapshot& history);
std::string format_heading_history(const HistorySnapshot& history);

// Pulls the plan sentence (the section after the "2." marker) out of a model
// response. Throws ParseError when no line parses as a meta-action.
std::string extract_plan_sentence(const std::string& response);
std::string extract_description(const std::string& response);

// Queries the model for a plan. An unparseable response falls back to the
// rule-based decision with fallback_used set; a plan sentence longer than
// 20 words is accepted with length_warning set. Infrastructure errors
// (missing fixtures, endpoint failures) propagate.
DecisionRecord decide_model_backed(const Observation& obs, VlmClient& client,
                                   const ModelPolicyOptions& options);

// Plans on meta-action changes and every replan_period seconds, consuming
// timed waypoints in between so the tracked target speed follows the chunk's
// profile. An infeasible lane change degrades to the straight variant.
class ChunkTracker {
 public:
  explicit ChunkTracker(ControllerParams params = {});

  void reset();
  Controls act(const Observation& obs, const MetaAction& meta, double dt);
  const ActionChunk& current_chunk() const { return chunk_; }

 private:
  ControllerParams params_;
  PidState longitudinal_;
  PidState lateral_;
  MetaAction last_meta_;
  ActionChunk chunk_;
  bool has_chunk_ = false;
  double chunk_age_ = 0.0;
  double replan_period_s_ = 1.0;
};

// Rule-based hierarchical policy.
class ReferencePolicyStack : public PolicyStack {
 public:
  explicit ReferencePolicyStack(ControllerParams params = {});

  void reset() override;
  DecisionRecord decide(const Observation& obs) override;
  Controls act(const Observation& obs, const MetaAction& meta) override;

 private:
  ChunkTracker tracker_;
  double dt_ = 0.05;
};

// Model-backed hierarchical policy sharing the same low-level tracker.
class ModelPolicyStack : public PolicyStack {
 public:
  ModelPolicyStack(std::shared_ptr<VlmClient> client, ModelPolicyOptions options,
                   ControllerParams params = {});

  void reset() override;
  DecisionRecord decide(const Observation& obs) override;
  Controls act(const Observation& obs, const MetaAction& meta) override;

 private:
  std::shared_ptr<VlmClient> client_;
  ModelPolicyOptions options_;
  ChunkTracker tracker_;
  double dt_ = 0.05;
};

}  // namespace steerbench
