#include "amcp/amcp.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <string>

#include "amcp/clustering.hpp"
#include "amcp/error.hpp"
#include "amcp/geometry.hpp"
#include "amcp/morphology.hpp"
#include "parallel.hpp"
#include "seed.hpp"

namespace amcp {
namespace {

using detail::derive_seed;
using detail::SeedStream;

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

double mean_distance(const FeatureMap& a, const FeatureMap& b, const BitMask& region) {
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < region.height(); ++y) {
    for (int x = 0; x < region.width(); ++x) {
      if (!region.get(x, y)) continue;
      const auto pa = a.pixel(x, y);
      const auto pb = b.pixel(x, y);
      double s = 0.0;
      for (std::size_t c = 0; c < pa.size(); ++c) {
        const double d = static_cast<double>(pa[c]) - pb[c];
        s += d * d;
      }
      sum += std::sqrt(s);
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

PaintResult paint_checked(const Painter& painter, const PaintRequest& request) {
  PaintResult result = painter.paint(request);
  if (result.samples.size() != static_cast<std::size_t>(request.n_samples)) {
    throw Error(ErrorCode::kProtocolError, painter.name() + " returned " +
                                               std::to_string(result.samples.size()) +
                                               " samples, expected " +
                                               std::to_string(request.n_samples));
  }
  for (const auto& s : result.samples) {
    if (s.width() != request.image.width() || s.height() != request.image.height()) {
      throw Error(ErrorCode::kProtocolError, painter.name() + " returned a sample of wrong size");
    }
  }
  return result;
}

}  // namespace

BitMask init_mask(const Prompt& prompt, int width, int height) {
  prompt.validate(width, height);
  switch (prompt.kind()) {
    case PromptKind::kBox:
      return BitMask::from_rect(width, height, std::get<BoxPrompt>(prompt.value()).box);
    case PromptKind::kMask:
      return std::get<MaskPrompt>(prompt.value()).mask;
    case PromptKind::kPoint:
    case PromptKind::kScribble:
      return BitMask(width, height, true);
  }
  return BitMask(width, height, true);
}

StepTrace run_step(const ImageBuf& image, const BitMask& mask, StepKind kind, int step_index,
                   const AmcpConfig& config, const Painter& painter, const Projector& projector,
                   const Prompt& prompt, const FeatureMap* original_features) {
  const auto start = std::chrono::steady_clock::now();
  if (mask.width() != image.width() || mask.height() != image.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "mask does not match the image");
  }
  if (mask.none()) throw Error(ErrorCode::kInvalidMask, "step input mask is empty");
  const auto schedule = config.schedule_for(prompt.kind());
  if (step_index < 0 || step_index >= static_cast<int>(schedule.size())) {
    throw Error(ErrorCode::kInvalidArgument, "step index outside the k schedule");
  }

  StepTrace trace;
  trace.index = step_index;
  trace.kind = kind;
  trace.input = mask;
  const bool inpaint = kind == StepKind::kInpaint;

  if (!inpaint && mask.all()) {
    trace.skipped = true;
    trace.pre_clean = mask;
    trace.mask = mask;
    trace.average = SoftMask(mask.width(), mask.height(), 1.0f);
    trace.wall_ms = elapsed_ms(start);
    return trace;
  }

  const int k = schedule[step_index];
  const int w = image.width();
  const int h = image.height();
  const Rect contrast_box = bbox_of(mask, config.box_rate);
  const Rings ring = rings(mask, config.ring_width);
  const BitMask& zone = inpaint ? ring.inner : ring.outer;
  // Outpainting contrasts over a box that also spans the outer ring, so
  // every pixel the step may add is clustered.
  const Rect roi = inpaint ? contrast_box : bbox_of(mask | ring.outer, config.box_rate);
  const BitMask painted_region = inpaint ? mask : ~mask;

  PaintRequest request{image, ~painted_region, config.n_samples,
                       derive_seed(config.seed, step_index, SeedStream::kPaint),
                       config.diffusion_steps};
  const PaintResult painted = paint_checked(painter, request);

  std::optional<FeatureMap> projected;
  if (!original_features) original_features = &projected.emplace(projector.project(image));

  ColorFitInfo color_info;
  const ContrastField color =
      phi_color(image, painted_region, roi, config.color_components,
                derive_seed(config.seed, step_index, SeedStream::kColor), &color_info);
  trace.color_fallback = color_info.degenerate || color_info.uninformative;

  std::optional<ContrastField> prior;
  if (prompt.has_prior()) {
    const auto points = prompt.prior_points();
    prior = phi_prompt(points, GaussianSigma::from_box(contrast_box, config.sigma_fraction), roi,
                       w, h);
  }

  const auto n = static_cast<std::size_t>(config.n_samples);
  std::vector<BitMask> candidates(n);
  std::vector<ContrastField> fields(n);
  std::vector<char> degenerate(n, 0);
  detail::parallel_for(n, config.threads, [&](std::size_t i) {
    const FeatureMap features = projector.project(painted.samples[i]);
    const ContrastField paint_term = phi_paint(*original_features, features, roi);
    ContrastField phi = combine(paint_term, color, prior ? &*prior : nullptr, config.weights, kind);
    const ClusterResult clusters = kmeans_binarize(phi, k);

    // The lowest cluster is where painting reproduced the original: plain
    // background when inpainting (drop it), an extension of the object when
    // outpainting (add it). Every other cluster keeps its current label.
    BitMask candidate = mask;
    if (!clusters.degenerate) {
      for (int y = roi.y0; y < roi.y1; ++y) {
        for (int x = roi.x0; x < roi.x1; ++x) {
          if (!zone.get(x, y)) continue;
          const int label = clusters.label(x, y);
          if (inpaint && label == 0) candidate.set(x, y, false);
          if (!inpaint && label == 0) candidate.set(x, y, true);
        }
      }
    }
    degenerate[i] = clusters.degenerate ? 1 : 0;
    candidates[i] = std::move(candidate);
    fields[i] = std::move(phi);
  });

  trace.average = SoftMask::average(candidates);
  trace.pre_clean = trace.average.binarize(static_cast<float>(config.avg_threshold));
  BitMask cleaned = morph_clean(trace.pre_clean, StructuringElement(config.clean_kernel));
  if (inpaint) {
    cleaned &= mask;
  } else {
    cleaned |= mask;
  }
  if (cleaned.none()) {
    trace.degenerate = true;
    cleaned = mask;
  }
  trace.mask = std::move(cleaned);
  for (char d : degenerate) trace.degenerate_samples += d;

  double posterior = 0.0;
  bool any = false;
  for (const auto& phi : fields) {
    double sum = 0.0;
    std::size_t count = 0;
    for (int y = roi.y0; y < roi.y1; ++y) {
      for (int x = roi.x0; x < roi.x1; ++x) {
        if (!trace.mask.get(x, y)) continue;
        sum += phi.at(x, y);
        ++count;
      }
    }
    if (count == 0) continue;
    posterior += posterior_score(sum / static_cast<double>(count));
    any = true;
  }
  if (any) posterior /= static_cast<double>(fields.size());
  trace.posterior = any ? posterior : std::numeric_limits<double>::quiet_NaN();

  if (config.keep_fields) {
    trace.fields = std::move(fields);
    trace.painted = painted.samples;
  }
  trace.wall_ms = elapsed_ms(start);
  return trace;
}

RunResult run(const ImageBuf& image, const Prompt& prompt, const AmcpConfig& config,
              const Painter& painter, const Projector& projector) {
  config.validate();
  BitMask mask = init_mask(prompt, image.width(), image.height());
  const FeatureMap original = projector.project(image);

  RunResult result;
  StepKind kind = config.first_step;
  for (int t = 0; t < config.steps; ++t) {
    const auto start = std::chrono::steady_clock::now();
    StepTrace trace = run_step(image, mask, kind, t, config, painter, projector, prompt, &original);
    if (config.record_objective && !trace.mask.all()) {
      trace.objective = objective(image, trace.mask, painter, projector, config.ring_width,
                                  derive_seed(config.seed, t, SeedStream::kObjective));
    }
    trace.wall_ms = elapsed_ms(start);
    mask = trace.mask;
    result.steps.push_back(std::move(trace));
    kind = kind == StepKind::kInpaint ? StepKind::kOutpaint : StepKind::kInpaint;
  }
  result.final_mask = std::move(mask);
  return result;
}

double objective(const ImageBuf& image, const BitMask& mask, const Painter& painter,
                 const Projector& projector, int ring_width, std::uint64_t seed) {
  if (mask.width() != image.width() || mask.height() != image.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "mask does not match the image");
  }
  if (mask.none() || mask.all()) {
    throw Error(ErrorCode::kInvalidMask, "objective needs a mask that is neither empty nor full");
  }
  const Rings ring = rings(mask, ring_width);
  const auto inpainted = paint_checked(painter, {image, ~mask, 1, seed, 50});
  const auto outpainted = paint_checked(painter, {image, mask, 1, seed + 1, 50});
  const FeatureMap original = projector.project(image);
  return mean_distance(original, projector.project(inpainted.samples[0]), ring.inner) +
         mean_distance(original, projector.project(outpainted.samples[0]), ring.outer);
}

ImageBuf erase_object(const ImageBuf& image, const BitMask& mask, const Painter& painter,
                      std::uint64_t seed) {
  if (mask.width() != image.width() || mask.height() != image.height()) {
    throw Error(ErrorCode::kInvalidMask, "mask does not match the image");
  }
  if (mask.none()) throw Error(ErrorCode::kInvalidMask, "nothing to erase: mask is empty");
  return paint_checked(painter, {image, ~mask, 1, seed, 50}).samples.front();
}

}  // namespace amcp
