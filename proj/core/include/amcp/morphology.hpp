#pragma once

#include "amcp/image.hpp"

namespace amcp {

// Odd-sized square (Chebyshev) structuring element.
class StructuringElement {
 public:
  explicit StructuringElement(int size);

  int size() const { return size_; }
  int radius() const { return size_ / 2; }

 private:
  int size_;
};

// A pixel is set iff any pixel within Chebyshev distance `radius` is set.
BitMask dilate(const BitMask& mask, int radius);
BitMask dilate(const BitMask& mask, const StructuringElement& k);

// A pixel survives iff every pixel within Chebyshev distance `radius` is set.
// Pixels beyond the image edge count as background.
BitMask erode(const BitMask& mask, int radius);
BitMask erode(const BitMask& mask, const StructuringElement& k);

struct Rings {
  BitMask inner;  // mask minus its erosion
  BitMask outer;  // dilation minus the mask
};

Rings rings(const BitMask& mask, int width);

BitMask open(const BitMask& mask, const StructuringElement& k);
BitMask close(const BitMask& mask, const StructuringElement& k);

// Opening followed by closing: drops specks and fills pinholes smaller than k.
BitMask morph_clean(const BitMask& mask, const StructuringElement& k);

}  // namespace amcp
