#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amcp/image.hpp"

// JSON/HTTP wire format shared by the remote painter and projector clients
// and by any server implementing /v1/paint and /v1/project.
namespace amcp::wire {

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws kProtocolError on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Placement of the original frame inside the zero-padded canvas.
struct PadInfo {
  int left = 0;
  int top = 0;
  int orig_w = 0;
  int orig_h = 0;
  int canvas_w = 0;  // not on the wire; implied by the padded rasters
  int canvas_h = 0;

  friend bool operator==(const PadInfo&, const PadInfo&) = default;
};

// Centers a width x height frame on a canvas of max(canvas, dim) per axis.
PadInfo centered_pad(int width, int height, int canvas);

ImageBuf pad(const ImageBuf& image, const PadInfo& pad);
BitMask pad(const BitMask& mask, const PadInfo& pad);
ImageBuf crop(const ImageBuf& padded, const PadInfo& pad);

struct PaintRequestBody {
  ImageBuf image;  // padded
  BitMask keep;    // padded
  int n_samples = 1;
  std::uint64_t seed = 0;
  int diffusion_steps = 50;
  PadInfo pad;
};

std::string encode(const PaintRequestBody& body);
PaintRequestBody decode_paint_request(std::string_view json);

std::string encode_paint_response(std::span<const ImageBuf> samples);
std::vector<ImageBuf> decode_paint_response(std::string_view json);

struct ProjectRequestBody {
  ImageBuf image;  // padded
  PadInfo pad;
};

std::string encode(const ProjectRequestBody& body);
ProjectRequestBody decode_project_request(std::string_view json);

// Feature grid, channel-major: data[c][gy][gx], little-endian float32 on
// the wire.
struct ProjectResponseBody {
  int stride = 1;
  int channels = 0;
  std::vector<float> data;
};

std::string encode(const ProjectResponseBody& body);
ProjectResponseBody decode_project_response(std::string_view json);

std::string encode_error(std::string_view message);

}  // namespace amcp::wire
