#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace amcp {

struct Point {
  int x = 0;
  int y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  long long area() const { return static_cast<long long>(width()) * height(); }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  bool contains(const Rect& other) const {
    return other.x0 >= x0 && other.y0 >= y0 && other.x1 <= x1 && other.y1 <= y1;
  }
  bool valid_for(int width, int height) const {
    return 0 <= x0 && x0 < x1 && x1 <= width && 0 <= y0 && y0 < y1 && y1 <= height;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

using Rgb = std::array<float, 3>;

// Interleaved RGB raster, each channel in [0, 1].
class ImageBuf {
 public:
  ImageBuf() = default;
  ImageBuf(int width, int height);
  // Throws kInvalidArgument on a size mismatch or an out-of-range channel.
  ImageBuf(int width, int height, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  Rect frame() const { return {0, 0, width_, height_}; }

  float at(int x, int y, int c) const { return data_[index(x, y) + c]; }
  float& at(int x, int y, int c) { return data_[index(x, y) + c]; }

  Rgb pixel(int x, int y) const {
    const auto i = index(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set_pixel(int x, int y, const Rgb& rgb) {
    const auto i = index(x, y);
    data_[i] = rgb[0];
    data_[i + 1] = rgb[1];
    data_[i + 2] = rgb[2];
  }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  friend bool operator==(const ImageBuf&, const ImageBuf&) = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

// Binary raster; 1 = foreground.
class BitMask {
 public:
  BitMask() = default;
  BitMask(int width, int height, bool value = false);

  static BitMask from_rect(int width, int height, const Rect& rect);

  int width() const { return width_; }
  int height() const { return height_; }
  Rect frame() const { return {0, 0, width_, height_}; }
  std::size_t size() const { return bits_.size(); }

  bool get(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool value = true) { bits_[index(x, y)] = value ? 1 : 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set_index(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }

  std::size_t count() const;
  bool none() const { return count() == 0; }
  bool all() const { return count() == bits_.size(); }
  bool same_shape(const BitMask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool subset_of(const BitMask& other) const;

  BitMask operator~() const;
  BitMask operator&(const BitMask& other) const;
  BitMask operator|(const BitMask& other) const;
  // Set difference: pixels in *this and not in other.
  BitMask operator-(const BitMask& other) const;
  BitMask& operator&=(const BitMask& other);
  BitMask& operator|=(const BitMask& other);

  std::span<const std::uint8_t> bits() const { return bits_; }

  friend bool operator==(const BitMask&, const BitMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }
  void require_same_shape(const BitMask& other) const;

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Per-pixel value in [0, 1], e.g. the vote fraction across painted samples.
class SoftMask {
 public:
  SoftMask() = default;
  SoftMask(int width, int height, float value = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  float at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  float& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

  // value >= threshold -> foreground
  BitMask binarize(float threshold) const;

  static SoftMask average(std::span<const BitMask> masks);

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

}  // namespace amcp
