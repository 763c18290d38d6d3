#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "amcp/feature_map.hpp"
#include "amcp/image.hpp"

namespace amcp {

enum class StepKind { kInpaint, kOutpaint };

inline char step_letter(StepKind kind) { return kind == StepKind::kInpaint ? 'I' : 'O'; }

// Scalar field over the frame; values outside `roi` are zero.
class ContrastField {
 public:
  ContrastField() = default;
  ContrastField(int width, int height, const Rect& roi);

  int width() const { return width_; }
  int height() const { return height_; }
  const Rect& roi() const { return roi_; }

  float at(int x, int y) const { return values_[index(x, y)]; }
  float& at(int x, int y) { return values_[index(x, y)]; }
  std::span<const float> values() const { return values_; }

  // Largest value inside the roi (0 for an empty roi).
  float roi_max() const;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_ = 0;
  int height_ = 0;
  Rect roi_;
  std::vector<float> values_;
};

struct PotentialWeights {
  double paint = 0.8;
  double color = 0.2;
  double prompt_inpaint = 0.2;
  double prompt_outpaint = -0.2;

  void validate() const;
  double prompt_for(StepKind kind) const {
    return kind == StepKind::kInpaint ? prompt_inpaint : prompt_outpaint;
  }
};

struct GaussianSigma {
  double x = 1.0;
  double y = 1.0;

  // fraction * box extent per axis
  static GaussianSigma from_box(const Rect& box, double fraction);
};

// Per-pixel L2 distance between feature vectors, zero outside roi.
ContrastField phi_paint(const FeatureMap& original, const FeatureMap& painted, const Rect& roi);

struct ColorFitInfo {
  bool degenerate = false;      // a region fell back to a single Gaussian
  bool uninformative = false;   // a region was empty; field is 0.5 in roi
};

// Probability that a pixel's color belongs to `region` (versus roi minus
// region), from one Gaussian mixture per side fitted inside roi.
ContrastField phi_color(const ImageBuf& image, const BitMask& region, const Rect& roi,
                        int n_components, std::uint64_t seed, ColorFitInfo* info = nullptr);

// max_l exp(-((x - x_l)^2 / sx^2 + (y - y_l)^2 / sy^2)) inside roi.
ContrastField phi_prompt(std::span<const Point> points, const GaussianSigma& sigma,
                         const Rect& roi, int width, int height);

// lambda-weighted sum. The paint term is divided by its roi maximum first;
// `prompt` may be null (coarse-mask prompts carry no point prior).
ContrastField combine(const ContrastField& paint, const ContrastField& color,
                      const ContrastField* prompt, const PotentialWeights& weights,
                      StepKind kind);

}  // namespace amcp
