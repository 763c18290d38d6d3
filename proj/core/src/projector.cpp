#include "amcp/projector.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "amcp/error.hpp"

namespace amcp {

FeatureMap IdentityProjector::project(const ImageBuf& image) const {
  FeatureMap out(image.width(), image.height(), 3);
  std::copy(image.data().begin(), image.data().end(), out.data().begin());
  return out;
}

PatchStatsProjector::PatchStatsProjector(int window) : window_(window) {
  if (window < 1) throw Error(ErrorCode::kInvalidArgument, "patch window must be >= 1");
}

FeatureMap PatchStatsProjector::project(const ImageBuf& image) const {
  const int w = image.width();
  const int h = image.height();
  FeatureMap out(w, h, 6);
  if (w == 0 || h == 0) return out;

  const int before = window_ / 2;
  const int after = window_ - before - 1;
  const std::size_t stride = static_cast<std::size_t>(w) + 1;
  std::vector<double> sum(stride * (h + 1));
  std::vector<double> sum_sq(stride * (h + 1));

  for (int c = 0; c < 3; ++c) {
    // Shifting by one sample value keeps a constant image at exactly zero
    // variance and limits cancellation in the integral tables.
    const double shift = image.at(0, 0, c);

    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(sum_sq.begin(), sum_sq.end(), 0.0);
    for (int y = 0; y < h; ++y) {
      double row = 0.0, row_sq = 0.0;
      for (int x = 0; x < w; ++x) {
        const double v = image.at(x, y, c) - shift;
        row += v;
        row_sq += v * v;
        sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + row;
        sum_sq[(y + 1) * stride + x + 1] = sum_sq[y * stride + x + 1] + row_sq;
      }
    }

    auto box = [&](const std::vector<double>& t, int x0, int y0, int x1, int y1) {
      return t[y1 * stride + x1] - t[y0 * stride + x1] - t[y1 * stride + x0] + t[y0 * stride + x0];
    };

    for (int y = 0; y < h; ++y) {
      const int y0 = std::max(0, y - before), y1 = std::min(h, y + after + 1);
      for (int x = 0; x < w; ++x) {
        const int x0 = std::max(0, x - before), x1 = std::min(w, x + after + 1);
        const double n = static_cast<double>(x1 - x0) * (y1 - y0);
        const double m = box(sum, x0, y0, x1, y1) / n;
        const double var = std::max(0.0, box(sum_sq, x0, y0, x1, y1) / n - m * m);
        out.at(x, y, c) = static_cast<float>(m + shift);
        out.at(x, y, c + 3) = static_cast<float>(std::sqrt(var));
      }
    }
  }
  return out;
}

}  // namespace amcp
