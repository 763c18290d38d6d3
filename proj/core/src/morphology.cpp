#include "amcp/morphology.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "amcp/error.hpp"

namespace amcp {
namespace {

// One separable pass along a line of `n` samples spaced `stride` apart.
// Dilation: any set sample within +-radius. Erosion: the full window lies
// inside the line and every sample in it is set.
void dilate_line(const std::uint8_t* src, std::uint8_t* dst, int n, std::size_t stride,
                 int radius, std::vector<int>& prefix) {
  prefix[0] = 0;
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + src[i * stride];
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - radius);
    const int hi = std::min(n, i + radius + 1);
    dst[i * stride] = prefix[hi] - prefix[lo] > 0 ? 1 : 0;
  }
}

void erode_line(const std::uint8_t* src, std::uint8_t* dst, int n, std::size_t stride,
                int radius, std::vector<int>& prefix) {
  prefix[0] = 0;
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + src[i * stride];
  const int full = 2 * radius + 1;
  for (int i = 0; i < n; ++i) {
    const int lo = i - radius;
    const int hi = i + radius + 1;
    dst[i * stride] = (lo >= 0 && hi <= n && prefix[hi] - prefix[lo] == full) ? 1 : 0;
  }
}

template <typename LineOp>
BitMask separable(const BitMask& mask, int radius, LineOp op) {
  if (radius < 0) throw Error(ErrorCode::kInvalidArgument, "negative radius");
  if (radius == 0 || mask.size() == 0) return mask;

  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> src(mask.bits().begin(), mask.bits().end());
  std::vector<std::uint8_t> tmp(src.size());
  std::vector<int> prefix(static_cast<std::size_t>(std::max(w, h)) + 1);

  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    op(src.data() + row, tmp.data() + row, w, 1, radius, prefix);
  }
  for (int x = 0; x < w; ++x) {
    op(tmp.data() + x, src.data() + x, h, static_cast<std::size_t>(w), radius, prefix);
  }

  BitMask out(w, h);
  for (std::size_t i = 0; i < src.size(); ++i) out.set_index(i, src[i] != 0);
  return out;
}

}  // namespace

StructuringElement::StructuringElement(int size) : size_(size) {
  if (size < 1 || size % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "structuring element size must be odd and >= 1, got " + std::to_string(size));
  }
}

BitMask dilate(const BitMask& mask, int radius) { return separable(mask, radius, dilate_line); }
BitMask dilate(const BitMask& mask, const StructuringElement& k) { return dilate(mask, k.radius()); }

BitMask erode(const BitMask& mask, int radius) { return separable(mask, radius, erode_line); }
BitMask erode(const BitMask& mask, const StructuringElement& k) { return erode(mask, k.radius()); }

Rings rings(const BitMask& mask, int width) {
  if (width < 1) throw Error(ErrorCode::kInvalidArgument, "ring width must be >= 1");
  return {mask - erode(mask, width), dilate(mask, width) - mask};
}

BitMask open(const BitMask& mask, const StructuringElement& k) {
  return dilate(erode(mask, k), k);
}

BitMask close(const BitMask& mask, const StructuringElement& k) {
  return erode(dilate(mask, k), k);
}

BitMask morph_clean(const BitMask& mask, const StructuringElement& k) {
  return close(open(mask, k), k);
}

}  // namespace amcp
