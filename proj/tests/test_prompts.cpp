#include "steerbench/prompts.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "steerbench/errors.hpp"

namespace steerbench {
namespace {

const std::vector<PromptKind> kAllKinds{
    PromptKind::simlingo_refine, PromptKind::baseline_nuscenes,
    PromptKind::stage2_refine, PromptKind::reasoning, PromptKind::zero_shot_plan};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  EXPECT_TRUE(in.good()) << path;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TEST(Prompts, KindStringsRoundTrip) {
  for (PromptKind kind : kAllKinds) {
    EXPECT_EQ(prompt_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(prompt_kind_from_string("mystery"), ParseError);
}

// The compiled-in templates must stay byte-identical to the data files, or
// replay fixtures recorded against one would silently miss the other.
TEST(Prompts, BuiltInMatchesDataFiles) {
  const std::string dir = std::string(STEERBENCH_REPO_ROOT) + "/prompts/";
  for (PromptKind kind : kAllKinds) {
    SCOPED_TRACE(to_string(kind));
    EXPECT_EQ(prompt_template(kind), read_file(dir + prompt_file_name(kind)));
  }
}

TEST(Prompts, OpeningLines) {
  EXPECT_EQ(prompt_template(PromptKind::simlingo_refine)
                .rfind("You are an expert in vehicle dynamics", 0),
            0u);
  EXPECT_NE(prompt_template(PromptKind::baseline_nuscenes).find("making a U-Turn"),
            std::string::npos);
  EXPECT_NE(prompt_template(PromptKind::zero_shot_plan)
                .find("generate a driving behavior plan"),
            std::string::npos);
}

TEST(Prompts, PlaceholdersInOrderWithoutDuplicates) {
  std::vector<std::string> names = placeholders_in("{a} {b} {a} {c}");
  EXPECT_EQ(names, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(placeholders_in(prompt_template(PromptKind::zero_shot_plan)),
            (std::vector<std::string>{"image", "speed_history", "heading_history",
                                      "current_speed", "routing_command"}));
}

TEST(Prompts, BuildSubstitutesEveryPlaceholder) {
  std::string text = build_prompt(
      PromptKind::zero_shot_plan,
      {{"image", "<scene>"},
       {"speed_history", "0.0 m/s 0.0 m/s 0.0 m/s"},
       {"heading_history", "90.0 degrees 90.0 degrees 90.0 degrees"},
       {"current_speed", "0.0"},
       {"routing_command", "Follow the road."},
       {"unused_extra", "ignored"}});
  EXPECT_NE(text.find("Speed history: 0.0 m/s 0.0 m/s 0.0 m/s"),
            std::string::npos);
  EXPECT_NE(text.find("Follow the road."), std::string::npos);
  EXPECT_EQ(text.find('{'), std::string::npos);
  EXPECT_EQ(text.find('}'), std::string::npos);
}

TEST(Prompts, MissingPlaceholderNamedInError) {
  try {
    build_prompt(PromptKind::reasoning, {});
    FAIL() << "expected TemplateError";
  } catch (const TemplateError& e) {
    EXPECT_NE(std::string(e.what()).find("meta_action"), std::string::npos);
  }
}

TEST(Prompts, BuildIsByteExactOutsidePlaceholders) {
  std::string tmpl = "prefix {x} suffix";
  EXPECT_EQ(build_prompt(tmpl, {{"x", "VALUE"}}), "prefix VALUE suffix");
}

}  // namespace
}  // namespace steerbench
