#pragma once

#include <span>
#include <vector>

namespace amcp {

// Per-pixel C-vector, pixel-major (all channels of a pixel are contiguous).
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int width, int height, int channels);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }

  float at(int x, int y, int c) const { return data_[offset(x, y) + c]; }
  float& at(int x, int y, int c) { return data_[offset(x, y) + c]; }
  std::span<const float> pixel(int x, int y) const {
    return std::span<const float>(data_).subspan(offset(x, y), channels_);
  }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  bool same_shape(const FeatureMap& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

}  // namespace amcp
