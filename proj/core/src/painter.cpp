#include "amcp/painter.hpp"

#include "amcp/error.hpp"
#include "amcp/png_io.hpp"

namespace amcp {

void PaintRequest::validate() const {
  if (image.empty()) throw Error(ErrorCode::kInvalidArgument, "paint request without an image");
  if (keep.width() != image.width() || keep.height() != image.height()) {
    throw Error(ErrorCode::kInvalidMask, "keep mask does not match the image size");
  }
  if (n_samples < 1) throw Error(ErrorCode::kInvalidArgument, "n_samples must be >= 1");
  if (diffusion_steps < 1) throw Error(ErrorCode::kInvalidArgument, "diffusion_steps must be >= 1");
}

Rgb MeanFillPainter::fill_color(const ImageBuf& image, const BitMask& keep) {
  double sum[3] = {0.0, 0.0, 0.0};
  std::size_t n = 0;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (!keep.get(x, y)) continue;
      for (int c = 0; c < 3; ++c) sum[c] += image.at(x, y, c);
      ++n;
    }
  }
  Rgb out{0.5f, 0.5f, 0.5f};
  if (n == 0) return out;
  for (int c = 0; c < 3; ++c) {
    out[c] = from_byte(to_byte(static_cast<float>(sum[c] / static_cast<double>(n))));
  }
  return out;
}

PaintResult MeanFillPainter::paint(const PaintRequest& request) const {
  request.validate();
  const Rgb fill = fill_color(request.image, request.keep);
  ImageBuf painted = request.image;
  for (int y = 0; y < painted.height(); ++y) {
    for (int x = 0; x < painted.width(); ++x) {
      if (!request.keep.get(x, y)) painted.set_pixel(x, y, fill);
    }
  }
  // Deterministic backend: every sample is the same image.
  return PaintResult{std::vector<ImageBuf>(static_cast<std::size_t>(request.n_samples), painted)};
}

}  // namespace amcp
