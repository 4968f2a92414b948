#include "steerbench/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "steerbench/errors.hpp"

namespace steerbench {

std::string to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::simlingo_refine: return "simlingo_refine";
    case PromptKind::baseline_nuscenes: return "baseline_nuscenes";
    case PromptKind::stage2_refine: return "stage2_refine";
    case PromptKind::reasoning: return "reasoning";
    case PromptKind::zero_shot_plan: return "zero_shot_plan";
  }
  throw InvalidArgumentError("unknown PromptKind");
}

PromptKind prompt_kind_from_string(const std::string& name) {
  if (name == "simlingo_refine") return PromptKind::simlingo_refine;
  if (name == "baseline_nuscenes") return PromptKind::baseline_nuscenes;
  if (name == "stage2_refine") return PromptKind::stage2_refine;
  if (name == "reasoning") return PromptKind::reasoning;
  if (name == "zero_shot_plan") return PromptKind::zero_shot_plan;
  throw InvalidArgumentError("unknown prompt kind: " + name);
}

const std::string& prompt_template(PromptKind kind) {
  static const std::string simlingo(detail::k_simlingo_refine_template);
  static const std::string nuscenes(detail::k_baseline_nuscenes_template);
  static const std::string stage2(detail::k_stage2_refine_template);
  static const std::string reasoning(detail::k_reasoning_template);
  static const std::string zero_shot(detail::k_zero_shot_plan_template);
  switch (kind) {
    case PromptKind::simlingo_refine: return simlingo;
    case PromptKind::baseline_nuscenes: return nuscenes;
    case PromptKind::stage2_refine: return stage2;
    case PromptKind::reasoning: return reasoning;
    case PromptKind::zero_shot_plan: return zero_shot;
  }
  throw InvalidArgumentError("unknown PromptKind");
}

std::string prompt_file_name(PromptKind kind) {
  return to_string(kind) + ".txt";
}

namespace {

bool placeholder_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

// Finds {identifier} starting at or after `from`. Returns npos if none.
std::size_t find_placeholder(const std::string& text, std::size_t from,
                             std::string* name, std::size_t* end) {
  for (std::size_t i = from; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    std::size_t j = i + 1;
    while (j < text.size() && placeholder_char(text[j])) ++j;
    if (j > i + 1 && j < text.size() && text[j] == '}') {
      *name = text.substr(i + 1, j - i - 1);
      *end = j + 1;
      return i;
    }
  }
  return std::string::npos;
}

}  // namespace

std::vector<std::string> placeholders_in(const std::string& tmpl) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while (true) {
    std::string name;
    std::size_t end = 0;
    std::size_t at = find_placeholder(tmpl, pos, &name, &end);
    if (at == std::string::npos) break;
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      names.push_back(name);
    }
    pos = end;
  }
  return names;
}

std::string build_prompt(const std::string& tmpl,
                         const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::vector<std::string> missing;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::string name;
    std::size_t end = 0;
    std::size_t at = find_placeholder(tmpl, pos, &name, &end);
    if (at == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    out.append(tmpl, pos, at - pos);
    auto it = values.find(name);
    if (it != values.end()) {
      out += it->second;
    } else {
      if (std::find(missing.begin(), missing.end(), name) == missing.end()) {
        missing.push_back(name);
      }
    }
    pos = end;
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "prompt template missing values for: ";
    for (std::size_t i = 0; i < missing.size(); ++i) {
      if (i) msg << ", ";
      msg << missing[i];
    }
    throw TemplateError(msg.str());
  }
  return out;
}

std::string build_prompt(PromptKind kind,
                         const std::map<std::string, std::string>& values) {
  return build_prompt(prompt_template(kind), values);
}

}  // namespace steerbench
