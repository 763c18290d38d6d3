#include "amcp/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amcp/color_model.hpp"
#include "amcp/error.hpp"

namespace amcp {
namespace {

void require_roi(const Rect& roi, int width, int height) {
  if (!roi.valid_for(width, height)) {
    throw Error(ErrorCode::kInvalidArgument, "roi outside the frame");
  }
}

void require_same(const ContrastField& a, const ContrastField& b) {
  if (a.width() != b.width() || a.height() != b.height() || !(a.roi() == b.roi())) {
    throw Error(ErrorCode::kDimensionMismatch, "contrast fields differ in size or roi");
  }
}

}  // namespace

ContrastField::ContrastField(int width, int height, const Rect& roi)
    : width_(width), height_(height), roi_(roi) {
  require_roi(roi, width, height);
  values_.assign(static_cast<std::size_t>(width) * height, 0.0f);
}

float ContrastField::roi_max() const {
  float best = 0.0f;
  bool any = false;
  for (int y = roi_.y0; y < roi_.y1; ++y) {
    for (int x = roi_.x0; x < roi_.x1; ++x) {
      best = any ? std::max(best, at(x, y)) : at(x, y);
      any = true;
    }
  }
  return best;
}

void PotentialWeights::validate() const {
  if (!(paint + color > 0.0)) {
    throw Error(ErrorCode::kConfigError, "lambda_paint + lambda_color must be positive");
  }
}

GaussianSigma GaussianSigma::from_box(const Rect& box, double fraction) {
  if (!(fraction > 0.0) || box.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sigma needs a positive fraction and a non-empty box");
  }
  return {fraction * box.width(), fraction * box.height()};
}

ContrastField phi_paint(const FeatureMap& original, const FeatureMap& painted, const Rect& roi) {
  if (!original.same_shape(painted)) {
    throw Error(ErrorCode::kDimensionMismatch, "feature maps differ in shape");
  }
  ContrastField field(original.width(), original.height(), roi);
  const int channels = original.channels();
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) {
      const auto a = original.pixel(x, y);
      const auto b = painted.pixel(x, y);
      double sum = 0.0;
      for (int c = 0; c < channels; ++c) {
        const double d = static_cast<double>(a[c]) - b[c];
        sum += d * d;
      }
      field.at(x, y) = static_cast<float>(std::sqrt(sum));
    }
  }
  return field;
}

ContrastField phi_color(const ImageBuf& image, const BitMask& region, const Rect& roi,
                        int n_components, std::uint64_t seed, ColorFitInfo* info) {
  if (image.width() != region.width() || image.height() != region.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "image and region differ in size");
  }
  ContrastField field(image.width(), image.height(), roi);
  std::vector<Color> inside, outside;
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) {
      const Rgb p = image.pixel(x, y);
      (region.get(x, y) ? inside : outside).push_back({p[0], p[1], p[2]});
    }
  }

  ColorFitInfo local;
  if (inside.empty() || outside.empty()) {
    local.uninformative = true;
    for (int y = roi.y0; y < roi.y1; ++y) {
      for (int x = roi.x0; x < roi.x1; ++x) field.at(x, y) = 0.5f;
    }
    if (info) *info = local;
    return field;
  }

  const auto fg = GaussianMixture::fit(inside, n_components, seed);
  const auto bg = GaussianMixture::fit(outside, n_components, seed + 1);
  local.degenerate = fg.single_fallback() || bg.single_fallback();

  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) {
      const Rgb p = image.pixel(x, y);
      const Color c{p[0], p[1], p[2]};
      // p_fg / (p_fg + p_bg) = 1 / (1 + exp(log p_bg - log p_fg))
      const double diff = bg.log_density(c) - fg.log_density(c);
      double prob;
      if (diff > 0) {
        const double e = std::exp(-diff);
        prob = e / (1.0 + e);
      } else {
        prob = 1.0 / (1.0 + std::exp(diff));
      }
      field.at(x, y) = static_cast<float>(prob);
    }
  }
  if (info) *info = local;
  return field;
}

ContrastField phi_prompt(std::span<const Point> points, const GaussianSigma& sigma,
                         const Rect& roi, int width, int height) {
  if (points.empty()) throw Error(ErrorCode::kNoPromptPoints, "prompt prior needs >= 1 point");
  if (!(sigma.x > 0.0) || !(sigma.y > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  }
  ContrastField field(width, height, roi);
  const double ix2 = 1.0 / (sigma.x * sigma.x);
  const double iy2 = 1.0 / (sigma.y * sigma.y);
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) {
      // max of exp(-q) is exp(-min q)
      double best = std::numeric_limits<double>::max();
      for (const auto& p : points) {
        const double dx = x - p.x, dy = y - p.y;
        best = std::min(best, dx * dx * ix2 + dy * dy * iy2);
      }
      field.at(x, y) = static_cast<float>(std::exp(-best));
    }
  }
  return field;
}

ContrastField combine(const ContrastField& paint, const ContrastField& color,
                      const ContrastField* prompt, const PotentialWeights& weights,
                      StepKind kind) {
  require_same(paint, color);
  if (prompt) require_same(paint, *prompt);

  const Rect roi = paint.roi();
  ContrastField out(paint.width(), paint.height(), roi);
  const float peak = paint.roi_max();
  const double scale = peak > 0.0f ? 1.0 / peak : 0.0;
  const double lp = weights.prompt_for(kind);
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) {
      double v = weights.paint * paint.at(x, y) * scale + weights.color * color.at(x, y);
      if (prompt) v += lp * prompt->at(x, y);
      out.at(x, y) = static_cast<float>(v);
    }
  }
  return out;
}

}  // namespace amcp
