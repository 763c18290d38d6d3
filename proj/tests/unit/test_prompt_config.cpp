#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "amcp/config.hpp"
#include "amcp/prompt.hpp"
#include "test_util.hpp"

using namespace amcp;

TEST(PromptKind, ParseAndPrint) {
  for (PromptKind k : {PromptKind::kPoint, PromptKind::kScribble, PromptKind::kBox,
                       PromptKind::kMask}) {
    EXPECT_EQ(parse_prompt_kind(to_string(k)), k);
  }
  EXPECT_EQ(to_string(PromptKind::kBox), "box");
  EXPECT_AMCP_ERROR(parse_prompt_kind("lasso"), ErrorCode::kConfigError);
}

TEST(Prompt, Validation) {
  EXPECT_NO_THROW(Prompt::points({{0, 0}, {9, 9}}).validate(10, 10));
  EXPECT_AMCP_ERROR(Prompt::points({}).validate(10, 10), ErrorCode::kNoPromptPoints);
  EXPECT_AMCP_ERROR(Prompt::points({{10, 0}}).validate(10, 10), ErrorCode::kPromptOutOfBounds);
  EXPECT_AMCP_ERROR(Prompt::points({{0, -1}}).validate(10, 10), ErrorCode::kPromptOutOfBounds);

  EXPECT_NO_THROW(Prompt::box({0, 0, 10, 10}).validate(10, 10));
  EXPECT_AMCP_ERROR(Prompt::box({0, 0, 11, 10}).validate(10, 10), ErrorCode::kPromptOutOfBounds);
  EXPECT_AMCP_ERROR(Prompt::box({4, 4, 4, 8}).validate(10, 10), ErrorCode::kPromptOutOfBounds);

  EXPECT_AMCP_ERROR(Prompt::mask(BitMask(10, 10)).validate(10, 10), ErrorCode::kInvalidArgument);
  EXPECT_AMCP_ERROR(Prompt::mask(BitMask(9, 10, true)).validate(10, 10),
                    ErrorCode::kPromptOutOfBounds);
  EXPECT_AMCP_ERROR(Prompt::scribble(BitMask(10, 10)).validate(10, 10),
                    ErrorCode::kInvalidArgument);
}

TEST(Prompt, PriorPoints) {
  EXPECT_EQ(Prompt::box({10, 20, 30, 41}).prior_points(), (std::vector<Point>{{19, 30}}));
  EXPECT_EQ(Prompt::points({{1, 2}, {3, 4}}).prior_points(),
            (std::vector<Point>{{1, 2}, {3, 4}}));
  BitMask s(5, 5);
  s.set(1, 1);
  s.set(3, 2);
  EXPECT_EQ(Prompt::scribble(s).prior_points(), (std::vector<Point>{{1, 1}, {3, 2}}));
  EXPECT_TRUE(Prompt::mask(s).prior_points().empty());
  EXPECT_FALSE(Prompt::mask(s).has_prior());
  EXPECT_TRUE(Prompt::scribble(s).has_prior());
}

TEST(Config, DefaultsAreValid) {
  const AmcpConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.steps, 5);
  EXPECT_EQ(c.n_samples, 5);
  EXPECT_EQ(c.ring_width, 32);
  EXPECT_EQ(c.clean_kernel, 5);
  EXPECT_DOUBLE_EQ(c.box_rate, 1.1);
  EXPECT_DOUBLE_EQ(c.weights.paint, 0.8);
  EXPECT_DOUBLE_EQ(c.weights.color, 0.2);
}

TEST(Config, KSchedule) {
  EXPECT_EQ(default_k_schedule(PromptKind::kBox, 5), (std::vector<int>{3, 3, 3, 2, 2}));
  EXPECT_EQ(default_k_schedule(PromptKind::kPoint, 2), (std::vector<int>{3, 3}));
  EXPECT_EQ(default_k_schedule(PromptKind::kMask, 5), (std::vector<int>{2, 2, 2, 2, 2}));
  AmcpConfig c;
  c.k_schedule = {2, 3, 2, 3, 2};
  EXPECT_EQ(c.schedule_for(PromptKind::kMask), c.k_schedule);
}

TEST(Config, ValidationRejectsBadFields) {
  auto bad = [](auto mutate) {
    AmcpConfig c;
    mutate(c);
    EXPECT_AMCP_ERROR(c.validate(), ErrorCode::kConfigError);
  };
  bad([](AmcpConfig& c) { c.steps = 0; });
  bad([](AmcpConfig& c) { c.n_samples = 0; });
  bad([](AmcpConfig& c) { c.k_schedule = {2, 2}; });
  bad([](AmcpConfig& c) { c.k_schedule = {2, 2, 4, 2, 2}; });
  bad([](AmcpConfig& c) { c.ring_width = 0; });
  bad([](AmcpConfig& c) { c.clean_kernel = 4; });
  bad([](AmcpConfig& c) { c.box_rate = 0.0; });
  bad([](AmcpConfig& c) { c.avg_threshold = 1.0; });
  bad([](AmcpConfig& c) { c.color_components = 0; });
}

TEST(Config, JsonRoundTrip) {
  AmcpConfig c;
  c.steps = 3;
  c.first_step = StepKind::kOutpaint;
  c.n_samples = 2;
  c.k_schedule = {3, 2, 2};
  c.weights.color = 0.35;
  c.ring_width = 12;
  c.seed = 987654321987ULL;
  c.record_objective = false;
  const AmcpConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(back.first_step, StepKind::kOutpaint);
  EXPECT_EQ(back.seed, 987654321987ULL);
}

TEST(Config, JsonOverridesOnlyPresentFields) {
  AmcpConfig base;
  base.n_samples = 7;
  base.ring_width = 9;
  const AmcpConfig c = config_from_json(R"({"ring_width": 16, "lambda_color": 0.1})", base);
  EXPECT_EQ(c.n_samples, 7);
  EXPECT_EQ(c.ring_width, 16);
  EXPECT_DOUBLE_EQ(c.weights.color, 0.1);
  EXPECT_AMCP_ERROR(config_from_json("[1, 2]"), ErrorCode::kConfigError);
  EXPECT_AMCP_ERROR(config_from_json("{bad"), ErrorCode::kConfigError);
  EXPECT_AMCP_ERROR(config_from_json(R"({"first_step": "X"})"), ErrorCode::kConfigError);
  EXPECT_AMCP_ERROR(config_from_json(R"({"steps": "five"})"), ErrorCode::kConfigError);
}

TEST(Config, EchoOmitsThreads) {
  AmcpConfig a, b;
  a.threads = 1;
  b.threads = 8;
  EXPECT_EQ(config_to_json(a), config_to_json(b));
  EXPECT_FALSE(nlohmann::json::parse(config_to_json(a)).contains("threads"));
}
