#include "amcp/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "amcp/error.hpp"

namespace amcp {
namespace {

struct PngImage {
  png_image image{};
  PngImage() {
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

std::vector<std::uint8_t> encode_raw(int width, int height, png_uint_32 format,
                                     const std::vector<std::uint8_t>& pixels) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(width);
  png.image.height = static_cast<png_uint_32>(height);
  png.image.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIoError, std::string("png encode: ") + png.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIoError, std::string("png encode: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> decode_raw(std::span<const std::uint8_t> bytes, png_uint_32 format,
                                     int& width, int& height) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kIoError, std::string("png decode: ") + png.image.message);
  }
  if (png.image.format != format) {
    throw Error(ErrorCode::kIoError,
                format == PNG_FORMAT_RGB ? "expected 8-bit RGB png"
                                         : "expected 8-bit grayscale png");
  }
  width = static_cast<int>(png.image.width);
  height = static_cast<int>(png.image.height);
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIoError, std::string("png decode: ") + png.image.message);
  }
  return pixels;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

}  // namespace

std::vector<std::uint8_t> encode_png(const ImageBuf& image) {
  std::vector<std::uint8_t> pixels(image.data().size());
  std::transform(image.data().begin(), image.data().end(), pixels.begin(), to_byte);
  return encode_raw(image.width(), image.height(), PNG_FORMAT_RGB, pixels);
}

std::vector<std::uint8_t> encode_png(const BitMask& mask) {
  std::vector<std::uint8_t> pixels(mask.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = mask[i] ? 255 : 0;
  return encode_raw(mask.width(), mask.height(), PNG_FORMAT_GRAY, pixels);
}

std::vector<std::uint8_t> encode_png(const SoftMask& mask) {
  std::vector<std::uint8_t> pixels(mask.values().size());
  std::transform(mask.values().begin(), mask.values().end(), pixels.begin(), to_byte);
  return encode_raw(mask.width(), mask.height(), PNG_FORMAT_GRAY, pixels);
}

ImageBuf decode_png_rgb(std::span<const std::uint8_t> bytes) {
  int w = 0, h = 0;
  const auto pixels = decode_raw(bytes, PNG_FORMAT_RGB, w, h);
  std::vector<float> data(pixels.size());
  std::transform(pixels.begin(), pixels.end(), data.begin(), from_byte);
  return ImageBuf(w, h, std::move(data));
}

BitMask decode_png_mask(std::span<const std::uint8_t> bytes) {
  int w = 0, h = 0;
  const auto pixels = decode_raw(bytes, PNG_FORMAT_GRAY, w, h);
  BitMask mask(w, h);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (pixels[i] != 0 && pixels[i] != 255) {
      throw Error(ErrorCode::kIoError, "mask png must contain only 0 and 255");
    }
    mask.set_index(i, pixels[i] == 255);
  }
  return mask;
}

ImageBuf read_png_rgb(const std::filesystem::path& path) {
  try {
    return decode_png_rgb(read_file(path));
  } catch (const Error& e) {
    throw Error(ErrorCode::kIoError, path.string() + ": " + e.what());
  }
}

BitMask read_png_mask(const std::filesystem::path& path) {
  try {
    return decode_png_mask(read_file(path));
  } catch (const Error& e) {
    throw Error(ErrorCode::kIoError, path.string() + ": " + e.what());
  }
}

void write_png(const std::filesystem::path& path, const ImageBuf& image) {
  write_file(path, encode_png(image));
}
void write_png(const std::filesystem::path& path, const BitMask& mask) {
  write_file(path, encode_png(mask));
}
void write_png(const std::filesystem::path& path, const SoftMask& mask) {
  write_file(path, encode_png(mask));
}

}  // namespace amcp
