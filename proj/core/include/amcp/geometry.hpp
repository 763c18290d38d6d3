#pragma once

#include "amcp/image.hpp"

namespace amcp {

// Tight bounding box of the set pixels. Throws kEmptyMask on an empty mask.
Rect tight_bbox(const BitMask& mask);

// Tight box scaled about its center by `rate` and clamped to the frame.
// Each half extent becomes ceil(half * rate), so rate >= 1 never shrinks it.
Rect bbox_of(const BitMask& mask, double rate);
Rect scale_rect(const Rect& rect, double rate, int width, int height);

// |a & b| / |a | b|, 1.0 when both are empty.
double iou(const BitMask& pred, const BitMask& gt);

}  // namespace amcp
