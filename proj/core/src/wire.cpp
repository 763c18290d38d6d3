#include "amcp/wire.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstring>

#include <nlohmann/json.hpp>

#include "amcp/error.hpp"
#include "amcp/png_io.hpp"

namespace amcp::wire {
namespace {

using nlohmann::json;

[[noreturn]] void protocol_error(const std::string& what) {
  throw Error(ErrorCode::kProtocolError, what);
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    protocol_error(std::string("malformed json: ") + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    protocol_error(std::string("missing or mistyped field '") + key + "'");
  }
}

json pad_to_json(const PadInfo& p) {
  return {{"left", p.left}, {"top", p.top}, {"orig_w", p.orig_w}, {"orig_h", p.orig_h}};
}

PadInfo pad_from_json(const json& j, int canvas_w, int canvas_h) {
  if (!j.contains("pad") || !j["pad"].is_object()) protocol_error("missing field 'pad'");
  const json& p = j["pad"];
  PadInfo out{field<int>(p, "left"), field<int>(p, "top"), field<int>(p, "orig_w"),
              field<int>(p, "orig_h"), canvas_w, canvas_h};
  if (out.left < 0 || out.top < 0 || out.orig_w < 1 || out.orig_h < 1 ||
      out.left + out.orig_w > canvas_w || out.top + out.orig_h > canvas_h) {
    protocol_error("pad offsets do not fit the canvas");
  }
  return out;
}

template <typename Decoded, typename Fn>
Decoded decode_png_field(const std::string& b64, Fn decode) {
  const auto bytes = base64_decode(b64);
  try {
    return decode(bytes);
  } catch (const Error& e) {
    protocol_error(std::string("bad png payload: ") + e.what());
  }
}

ImageBuf image_field(const json& j, const char* key) {
  return decode_png_field<ImageBuf>(field<std::string>(j, key), [](const auto& b) {
    return decode_png_rgb(b);
  });
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) protocol_error("base64 length is not a multiple of 4");
  if (text.empty()) return {};
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) protocol_error("malformed base64");
  std::size_t padding = 0;
  if (text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

PadInfo centered_pad(int width, int height, int canvas) {
  PadInfo p;
  p.orig_w = width;
  p.orig_h = height;
  p.canvas_w = std::max(canvas, width);
  p.canvas_h = std::max(canvas, height);
  p.left = (p.canvas_w - width) / 2;
  p.top = (p.canvas_h - height) / 2;
  return p;
}

ImageBuf pad(const ImageBuf& image, const PadInfo& p) {
  ImageBuf out(p.canvas_w, p.canvas_h);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) out.set_pixel(x + p.left, y + p.top, image.pixel(x, y));
  }
  return out;
}

BitMask pad(const BitMask& mask, const PadInfo& p) {
  BitMask out(p.canvas_w, p.canvas_h);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) out.set(x + p.left, y + p.top, mask.get(x, y));
  }
  return out;
}

ImageBuf crop(const ImageBuf& padded, const PadInfo& p) {
  if (padded.width() != p.canvas_w || padded.height() != p.canvas_h) {
    protocol_error("painted raster is " + std::to_string(padded.width()) + "x" +
                   std::to_string(padded.height()) + ", expected " + std::to_string(p.canvas_w) +
                   "x" + std::to_string(p.canvas_h));
  }
  ImageBuf out(p.orig_w, p.orig_h);
  for (int y = 0; y < p.orig_h; ++y) {
    for (int x = 0; x < p.orig_w; ++x) out.set_pixel(x, y, padded.pixel(x + p.left, y + p.top));
  }
  return out;
}

std::string encode(const PaintRequestBody& body) {
  const json j = {{"image", base64_encode(encode_png(body.image))},
                  {"keep_mask", base64_encode(encode_png(body.keep))},
                  {"n_samples", body.n_samples},
                  {"seed", body.seed},
                  {"diffusion_steps", body.diffusion_steps},
                  {"pad", pad_to_json(body.pad)}};
  return j.dump();
}

PaintRequestBody decode_paint_request(std::string_view text) {
  const json j = parse(text);
  PaintRequestBody body;
  body.image = image_field(j, "image");
  body.keep = decode_png_field<BitMask>(field<std::string>(j, "keep_mask"), [](const auto& b) {
    return decode_png_mask(b);
  });
  if (body.keep.width() != body.image.width() || body.keep.height() != body.image.height()) {
    protocol_error("keep_mask and image differ in size");
  }
  body.n_samples = field<int>(j, "n_samples");
  body.seed = field<std::uint64_t>(j, "seed");
  body.diffusion_steps = field<int>(j, "diffusion_steps");
  if (body.n_samples < 1 || body.diffusion_steps < 1) {
    protocol_error("n_samples and diffusion_steps must be >= 1");
  }
  body.pad = pad_from_json(j, body.image.width(), body.image.height());
  return body;
}

std::string encode_paint_response(std::span<const ImageBuf> samples) {
  json list = json::array();
  for (const auto& s : samples) list.push_back(base64_encode(encode_png(s)));
  return json{{"samples", list}}.dump();
}

std::vector<ImageBuf> decode_paint_response(std::string_view text) {
  const json j = parse(text);
  if (!j.contains("samples") || !j["samples"].is_array()) protocol_error("missing 'samples' array");
  std::vector<ImageBuf> out;
  for (const auto& s : j["samples"]) {
    if (!s.is_string()) protocol_error("sample is not a string");
    out.push_back(decode_png_field<ImageBuf>(s.get<std::string>(), [](const auto& b) {
      return decode_png_rgb(b);
    }));
  }
  return out;
}

std::string encode(const ProjectRequestBody& body) {
  const json j = {{"image", base64_encode(encode_png(body.image))}, {"pad", pad_to_json(body.pad)}};
  return j.dump();
}

ProjectRequestBody decode_project_request(std::string_view text) {
  const json j = parse(text);
  ProjectRequestBody body;
  body.image = image_field(j, "image");
  body.pad = pad_from_json(j, body.image.width(), body.image.height());
  return body;
}

std::string encode(const ProjectResponseBody& body) {
  std::vector<std::uint8_t> bytes(body.data.size() * 4);
  for (std::size_t i = 0; i < body.data.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, &body.data[i], 4);
    for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  const json j = {{"stride", body.stride}, {"channels", body.channels}, {"data", base64_encode(bytes)}};
  return j.dump();
}

ProjectResponseBody decode_project_response(std::string_view text) {
  const json j = parse(text);
  ProjectResponseBody body;
  body.stride = field<int>(j, "stride");
  body.channels = field<int>(j, "channels");
  if (body.stride < 1 || body.channels < 1) protocol_error("stride and channels must be >= 1");
  const auto bytes = base64_decode(field<std::string>(j, "data"));
  if (bytes.size() % 4 != 0) protocol_error("feature payload is not whole float32 values");
  body.data.resize(bytes.size() / 4);
  for (std::size_t i = 0; i < body.data.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[i * 4 + b]) << (8 * b);
    std::memcpy(&body.data[i], &bits, 4);
  }
  return body;
}

std::string encode_error(std::string_view message) {
  return json{{"error", std::string(message)}}.dump();
}

}  // namespace amcp::wire
