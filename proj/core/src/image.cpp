#include "amcp/image.hpp"

#include <algorithm>
#include <string>

#include "amcp/error.hpp"

namespace amcp {
namespace {

void check_dims(int width, int height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "negative dimensions " + std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

ImageBuf::ImageBuf(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height * 3, 0.0f);
}

ImageBuf::ImageBuf(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw Error(ErrorCode::kInvalidArgument, "image data length does not match width*height*3");
  }
  const bool in_range = std::all_of(data_.begin(), data_.end(),
                                    [](float v) { return v >= 0.0f && v <= 1.0f; });
  if (!in_range) {
    throw Error(ErrorCode::kInvalidArgument, "image channel value outside [0, 1]");
  }
}

BitMask::BitMask(int width, int height, bool value) : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(static_cast<std::size_t>(width) * height, value ? 1 : 0);
}

BitMask BitMask::from_rect(int width, int height, const Rect& rect) {
  BitMask mask(width, height);
  const int x0 = std::max(rect.x0, 0), x1 = std::min(rect.x1, width);
  const int y0 = std::max(rect.y0, 0), y1 = std::min(rect.y1, height);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) mask.set(x, y);
  }
  return mask;
}

std::size_t BitMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void BitMask::require_same_shape(const BitMask& other) const {
  if (!same_shape(other)) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(width_) + "x" + std::to_string(height_) + " vs " +
                    std::to_string(other.width_) + "x" + std::to_string(other.height_));
  }
}

bool BitMask::subset_of(const BitMask& other) const {
  require_same_shape(other);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !other.bits_[i]) return false;
  }
  return true;
}

BitMask BitMask::operator~() const {
  BitMask out = *this;
  for (auto& b : out.bits_) b ^= 1;
  return out;
}

BitMask& BitMask::operator&=(const BitMask& other) {
  require_same_shape(other);
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= other.bits_[i];
  return *this;
}

BitMask& BitMask::operator|=(const BitMask& other) {
  require_same_shape(other);
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
  return *this;
}

BitMask BitMask::operator&(const BitMask& other) const {
  BitMask out = *this;
  out &= other;
  return out;
}

BitMask BitMask::operator|(const BitMask& other) const {
  BitMask out = *this;
  out |= other;
  return out;
}

BitMask BitMask::operator-(const BitMask& other) const {
  require_same_shape(other);
  BitMask out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] &= other.bits_[i] ^ 1;
  return out;
}

SoftMask::SoftMask(int width, int height, float value) : width_(width), height_(height) {
  check_dims(width, height);
  values_.assign(static_cast<std::size_t>(width) * height, value);
}

BitMask SoftMask::binarize(float threshold) const {
  BitMask out(width_, height_);
  for (std::size_t i = 0; i < values_.size(); ++i) out.set_index(i, values_[i] >= threshold);
  return out;
}

SoftMask SoftMask::average(std::span<const BitMask> masks) {
  if (masks.empty()) throw Error(ErrorCode::kInvalidArgument, "average of zero masks");
  SoftMask out(masks.front().width(), masks.front().height());
  std::vector<int> votes(out.values_.size(), 0);
  for (const auto& m : masks) {
    if (!m.same_shape(masks.front())) {
      throw Error(ErrorCode::kDimensionMismatch, "masks differ in size");
    }
    for (std::size_t i = 0; i < votes.size(); ++i) votes[i] += m[i] ? 1 : 0;
  }
  const float n = static_cast<float>(masks.size());
  for (std::size_t i = 0; i < votes.size(); ++i) out.values_[i] = static_cast<float>(votes[i]) / n;
  return out;
}

}  // namespace amcp
