#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "amcp/image.hpp"

namespace amcp {

// Images are 8-bit RGB; masks are 8-bit gray with 0 = background and
// 255 = foreground. Any other encoding is rejected with kIoError.

std::vector<std::uint8_t> encode_png(const ImageBuf& image);
std::vector<std::uint8_t> encode_png(const BitMask& mask);
// Soft masks are written as gray round(v * 255).
std::vector<std::uint8_t> encode_png(const SoftMask& mask);

ImageBuf decode_png_rgb(std::span<const std::uint8_t> bytes);
BitMask decode_png_mask(std::span<const std::uint8_t> bytes);

ImageBuf read_png_rgb(const std::filesystem::path& path);
BitMask read_png_mask(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const ImageBuf& image);
void write_png(const std::filesystem::path& path, const BitMask& mask);
void write_png(const std::filesystem::path& path, const SoftMask& mask);

// Channel quantization shared by every 8-bit path.
inline std::uint8_t to_byte(float v) {
  const float clamped = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
  return static_cast<std::uint8_t>(clamped * 255.0f + 0.5f);
}
inline float from_byte(std::uint8_t b) { return static_cast<float>(b) / 255.0f; }

}  // namespace amcp
