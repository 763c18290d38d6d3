#include "amcp/config.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "amcp/error.hpp"

namespace amcp {

void AmcpConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kConfigError, m); };
  if (steps < 1) fail("steps must be >= 1");
  if (n_samples < 1) fail("n_samples must be >= 1");
  if (!k_schedule.empty()) {
    if (static_cast<int>(k_schedule.size()) != steps) fail("k_schedule length must equal steps");
    for (int k : k_schedule) {
      if (k != 2 && k != 3) fail("k_schedule entries must be 2 or 3");
    }
  }
  weights.validate();
  if (ring_width < 1) fail("ring_width must be >= 1");
  if (clean_kernel < 1 || clean_kernel % 2 == 0) fail("clean_kernel must be odd and >= 1");
  if (!(box_rate > 0.0)) fail("box_rate must be positive");
  if (!(sigma_fraction > 0.0)) fail("sigma_fraction must be positive");
  if (!(avg_threshold > 0.0 && avg_threshold < 1.0)) fail("avg_threshold must lie in (0, 1)");
  if (diffusion_steps < 1) fail("diffusion_steps must be >= 1");
  if (color_components < 1) fail("color_components must be >= 1");
}

std::vector<int> AmcpConfig::schedule_for(PromptKind kind) const {
  return k_schedule.empty() ? default_k_schedule(kind, steps) : k_schedule;
}

std::vector<int> default_k_schedule(PromptKind kind, int steps) {
  std::vector<int> out(static_cast<std::size_t>(std::max(steps, 0)), 2);
  if (kind != PromptKind::kMask) {
    for (int i = 0; i < std::min(steps, 3); ++i) out[i] = 3;
  }
  return out;
}

std::string config_to_json(const AmcpConfig& c, int indent) {
  const nlohmann::json j = {
      {"steps", c.steps},
      {"first_step", c.first_step == StepKind::kInpaint ? "I" : "O"},
      {"n_samples", c.n_samples},
      {"k_schedule", c.k_schedule},
      {"lambda_paint", c.weights.paint},
      {"lambda_color", c.weights.color},
      {"lambda_prompt_istep", c.weights.prompt_inpaint},
      {"lambda_prompt_ostep", c.weights.prompt_outpaint},
      {"ring_width", c.ring_width},
      {"clean_kernel", c.clean_kernel},
      {"box_rate", c.box_rate},
      {"sigma_fraction", c.sigma_fraction},
      {"avg_threshold", c.avg_threshold},
      {"diffusion_steps", c.diffusion_steps},
      {"seed", c.seed},
      {"color_components", c.color_components},
      {"record_objective", c.record_objective},
      {"keep_fields", c.keep_fields},
  };
  return j.dump(indent);
}

AmcpConfig config_from_json(std::string_view text, AmcpConfig c) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::kConfigError, "config must be a JSON object");
    auto take = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("steps", c.steps);
    if (j.contains("first_step")) {
      const auto s = j.at("first_step").get<std::string>();
      if (s != "I" && s != "O") throw Error(ErrorCode::kConfigError, "first_step must be I or O");
      c.first_step = s == "I" ? StepKind::kInpaint : StepKind::kOutpaint;
    }
    take("n_samples", c.n_samples);
    take("k_schedule", c.k_schedule);
    take("lambda_paint", c.weights.paint);
    take("lambda_color", c.weights.color);
    take("lambda_prompt_istep", c.weights.prompt_inpaint);
    take("lambda_prompt_ostep", c.weights.prompt_outpaint);
    take("ring_width", c.ring_width);
    take("clean_kernel", c.clean_kernel);
    take("box_rate", c.box_rate);
    take("sigma_fraction", c.sigma_fraction);
    take("avg_threshold", c.avg_threshold);
    take("diffusion_steps", c.diffusion_steps);
    take("seed", c.seed);
    take("color_components", c.color_components);
    take("record_objective", c.record_objective);
    take("keep_fields", c.keep_fields);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("config json: ") + e.what());
  }
}

}  // namespace amcp
