#pragma once

#include <map>
#include <string>
#include <vector>

namespace steerbench {

// Prompt templates shipped under prompts/. The same text is compiled in so the
// library works without a data directory; a test keeps the two in sync.
enum class PromptKind {
  simlingo_refine,
  baseline_nuscenes,
  stage2_refine,
  reasoning,
  zero_shot_plan,
};

std::string to_string(PromptKind kind);
PromptKind prompt_kind_from_string(const std::string& name);

// Built-in template text (byte-identical to prompts/<name>.txt).
const std::string& prompt_template(PromptKind kind);

// Relative file name of a template, e.g. "zero_shot_plan.txt".
std::string prompt_file_name(PromptKind kind);

// All {placeholder} names appearing in a template, in order of appearance,
// without duplicates.
std::vector<std::string> placeholders_in(const std::string& tmpl);

// Replaces every {key} with values.at(key). Throws TemplateError naming the
// missing keys if any placeholder is left unfilled. Unknown extra values are
// ignored.
std::string build_prompt(const std::string& tmpl,
                         const std::map<std::string, std::string>& values);

std::string build_prompt(PromptKind kind,
                         const std::map<std::string, std::string>& values);

namespace detail {
extern const char* const k_simlingo_refine_template;
extern const char* const k_baseline_nuscenes_template;
extern const char* const k_stage2_refine_template;
extern const char* const k_reasoning_template;
extern const char* const k_zero_shot_plan_template;
}  // namespace detail

}  // namespace steerbench
