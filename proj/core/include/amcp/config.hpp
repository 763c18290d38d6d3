#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "amcp/potential.hpp"
#include "amcp/prompt.hpp"

namespace amcp {

struct AmcpConfig {
  int steps = 5;
  StepKind first_step = StepKind::kInpaint;
  int n_samples = 5;
  // Cluster count per step; empty means the prompt-dependent default.
  std::vector<int> k_schedule;
  PotentialWeights weights;
  int ring_width = 32;
  int clean_kernel = 5;
  double box_rate = 1.1;
  double sigma_fraction = 0.1;
  double avg_threshold = 0.5;
  int diffusion_steps = 50;
  std::uint64_t seed = 0;
  int color_components = 5;
  bool record_objective = true;  // adds two paintings per step
  bool keep_fields = false;      // keep per-sample potentials and paintings in traces
  unsigned threads = 0;          // per-sample workers; 0 = hardware concurrency

  // Throws kConfigError.
  void validate() const;
  std::vector<int> schedule_for(PromptKind kind) const;
};

// Three clusters for the first three steps of point, box and scribble
// prompts, two otherwise.
std::vector<int> default_k_schedule(PromptKind kind, int steps);

// JSON echo of every field that influences results (threads excluded).
std::string config_to_json(const AmcpConfig& config, int indent = 2);
// Fields present in `json` override `base`. Throws kConfigError.
AmcpConfig config_from_json(std::string_view json, AmcpConfig base = {});

}  // namespace amcp
