#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include "amcp/config.hpp"
#include "amcp/feature_map.hpp"
#include "amcp/image.hpp"
#include "amcp/painter.hpp"
#include "amcp/potential.hpp"
#include "amcp/projector.hpp"
#include "amcp/prompt.hpp"

namespace amcp {

struct StepTrace {
  int index = 0;
  StepKind kind = StepKind::kInpaint;
  BitMask input;      // mask entering the step
  BitMask pre_clean;  // thresholded vote before morphological cleaning
  BitMask mask;       // step output, canonical foreground
  SoftMask average;   // fraction of samples voting foreground
  double objective = std::numeric_limits<double>::quiet_NaN();
  // exp(-mean potential over the output mask), averaged over samples.
  double posterior = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;  // output would have been empty; input kept
  bool skipped = false;     // outpainting with nothing left to paint
  int degenerate_samples = 0;
  bool color_fallback = false;
  double wall_ms = 0.0;

  // Only with AmcpConfig::keep_fields.
  std::vector<ContrastField> fields;
  std::vector<ImageBuf> painted;
};

struct RunResult {
  BitMask final_mask;
  std::vector<StepTrace> steps;
};

// Box and coarse-mask prompts start from the prompt itself; point and
// scribble prompts start from the whole frame.
BitMask init_mask(const Prompt& prompt, int width, int height);

// One inpainting (shrink within the inner ring) or outpainting (grow within
// the outer ring) update of a foreground mask. `original_features` may be
// null, in which case the image is projected here.
StepTrace run_step(const ImageBuf& image, const BitMask& mask, StepKind kind, int step_index,
                   const AmcpConfig& config, const Painter& painter, const Projector& projector,
                   const Prompt& prompt, const FeatureMap* original_features = nullptr);

// Alternates steps starting from config.first_step.
RunResult run(const ImageBuf& image, const Prompt& prompt, const AmcpConfig& config,
              const Painter& painter, const Projector& projector);

// Mean feature distance between the image and one inpainting over the inner
// ring, plus the same for one outpainting over the outer ring. The mask must
// be neither empty nor full.
double objective(const ImageBuf& image, const BitMask& mask, const Painter& painter,
                 const Projector& projector, int ring_width, std::uint64_t seed = 0);

// Inpaints the object away, keeping everything outside the mask.
ImageBuf erase_object(const ImageBuf& image, const BitMask& mask, const Painter& painter,
                      std::uint64_t seed = 0);

inline double posterior_score(double mean_potential) { return std::exp(-mean_potential); }

// Writes step_{t}_{I|O}.png, step_{t}_avg.png and trace.json into `dir`.
// Wall-clock timings are included only when asked, so that repeated runs
// produce identical files.
void write_trace(const std::filesystem::path& dir, const RunResult& result,
                 const AmcpConfig& config, bool include_timings = false);

}  // namespace amcp
