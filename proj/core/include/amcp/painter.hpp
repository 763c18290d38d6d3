#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amcp/image.hpp"

namespace amcp {

// Pixels where keep is set are the condition; everything else is painted.
// Inpainting and outpainting differ only in which side is kept.
struct PaintRequest {
  ImageBuf image;
  BitMask keep;
  int n_samples = 1;
  std::uint64_t seed = 0;  // sample i uses seed + i
  int diffusion_steps = 50;

  void validate() const;
};

struct PaintResult {
  std::vector<ImageBuf> samples;
};

// Backends must be callable concurrently; implementations are immutable.
class Painter {
 public:
  virtual ~Painter() = default;
  virtual PaintResult paint(const PaintRequest& request) const = 0;
  virtual std::string name() const = 0;
};

// Fills every painted pixel with the mean kept color, rounded to 8 bits so
// the result survives a PNG round trip unchanged. With nothing kept the fill
// is mid gray.
class MeanFillPainter final : public Painter {
 public:
  PaintResult paint(const PaintRequest& request) const override;
  std::string name() const override { return "meanfill"; }

  static Rgb fill_color(const ImageBuf& image, const BitMask& keep);
};

}  // namespace amcp
