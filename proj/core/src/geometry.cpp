#include "amcp/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "amcp/error.hpp"

namespace amcp {
namespace {

// Guards ceil/floor against 10 * 1.1 = 11.000000000000002.
constexpr double kRoundingSlack = 1e-9;

}  // namespace

Rect tight_bbox(const BitMask& mask) {
  int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.get(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw Error(ErrorCode::kEmptyMask, "bounding box of an empty mask");
  return {x0, y0, x1 + 1, y1 + 1};
}

Rect scale_rect(const Rect& rect, double rate, int width, int height) {
  if (!(rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "box rate must be positive");
  const double cx = 0.5 * (rect.x0 + rect.x1);
  const double cy = 0.5 * (rect.y0 + rect.y1);
  const double hx = 0.5 * rect.width() * rate;
  const double hy = 0.5 * rect.height() * rate;
  Rect out{static_cast<int>(std::floor(cx - hx + kRoundingSlack)),
           static_cast<int>(std::floor(cy - hy + kRoundingSlack)),
           static_cast<int>(std::ceil(cx + hx - kRoundingSlack)),
           static_cast<int>(std::ceil(cy + hy - kRoundingSlack))};
  out.x0 = std::clamp(out.x0, 0, width);
  out.y0 = std::clamp(out.y0, 0, height);
  out.x1 = std::clamp(out.x1, 0, width);
  out.y1 = std::clamp(out.y1, 0, height);
  // A shrinking rate may collapse a thin box; keep at least the center pixel.
  if (out.x1 <= out.x0) {
    out.x0 = std::clamp(static_cast<int>(std::floor(cx)), 0, width - 1);
    out.x1 = out.x0 + 1;
  }
  if (out.y1 <= out.y0) {
    out.y0 = std::clamp(static_cast<int>(std::floor(cy)), 0, height - 1);
    out.y1 = out.y0 + 1;
  }
  return out;
}

Rect bbox_of(const BitMask& mask, double rate) {
  return scale_rect(tight_bbox(mask), rate, mask.width(), mask.height());
}

double iou(const BitMask& pred, const BitMask& gt) {
  if (!pred.same_shape(gt)) {
    throw Error(ErrorCode::kDimensionMismatch, "iou of masks with different sizes");
  }
  std::size_t inter = 0, uni = 0;
  const auto a = pred.bits();
  const auto b = gt.bits();
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] & b[i];
    uni += a[i] | b[i];
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace amcp
