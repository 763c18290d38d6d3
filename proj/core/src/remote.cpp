#include "amcp/remote.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "amcp/error.hpp"
#include "amcp/wire.hpp"

namespace amcp {
namespace {

std::string post_json(const std::string& endpoint, const std::string& path,
                      const std::string& body, const RemoteOptions& options) {
  httplib::Client client(endpoint);
  const auto whole = static_cast<time_t>(options.timeout_seconds);
  const auto micros = static_cast<time_t>((options.timeout_seconds - whole) * 1e6);
  client.set_connection_timeout(whole, micros);
  client.set_read_timeout(whole, micros);
  client.set_write_timeout(whole, micros);

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(path, body, "application/json");
  if (!res) {
    const auto err = res.error();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if ((err == httplib::Error::Read || err == httplib::Error::Write) &&
        elapsed >= 0.9 * options.timeout_seconds) {
      throw Error(ErrorCode::kTimeout, endpoint + path + " did not answer in time");
    }
    throw Error(ErrorCode::kBackendUnavailable,
                endpoint + path + ": " + httplib::to_string(err));
  }
  if (res->status == 200) return res->body;
  if (res->status == 400) {
    throw Error(ErrorCode::kProtocolError, endpoint + path + " rejected request: " + res->body);
  }
  if (res->status >= 500) {
    throw Error(ErrorCode::kBackendUnavailable,
                endpoint + path + " returned " + std::to_string(res->status) + ": " + res->body);
  }
  throw Error(ErrorCode::kProtocolError,
              endpoint + path + " returned unexpected status " + std::to_string(res->status));
}

}  // namespace

void validate_endpoint(const std::string& endpoint) {
  const std::string scheme = "http://";
  if (endpoint.rfind(scheme, 0) != 0 || endpoint.size() == scheme.size()) {
    throw Error(ErrorCode::kConfigError, "endpoint must look like http://host[:port], got '" +
                                             endpoint + "'");
  }
  const auto rest = endpoint.substr(scheme.size());
  if (rest.find('/') != std::string::npos || rest.find(' ') != std::string::npos) {
    throw Error(ErrorCode::kConfigError, "endpoint must not carry a path: '" + endpoint + "'");
  }
}

RemotePainter::RemotePainter(std::string endpoint, RemoteOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
  validate_endpoint(endpoint_);
}

PaintResult RemotePainter::paint(const PaintRequest& request) const {
  request.validate();
  const auto pad = wire::centered_pad(request.image.width(), request.image.height(),
                                      options_.canvas);
  const wire::PaintRequestBody body{wire::pad(request.image, pad), wire::pad(request.keep, pad),
                                    request.n_samples, request.seed, request.diffusion_steps,
                                    pad};
  const auto samples =
      wire::decode_paint_response(post_json(endpoint_, "/v1/paint", wire::encode(body), options_));
  if (samples.size() != static_cast<std::size_t>(request.n_samples)) {
    throw Error(ErrorCode::kProtocolError, "expected " + std::to_string(request.n_samples) +
                                               " samples, got " + std::to_string(samples.size()));
  }

  PaintResult result;
  for (const auto& padded : samples) {
    ImageBuf sample = wire::crop(padded, pad);
    for (int y = 0; y < sample.height(); ++y) {
      for (int x = 0; x < sample.width(); ++x) {
        if (request.keep.get(x, y)) sample.set_pixel(x, y, request.image.pixel(x, y));
      }
    }
    result.samples.push_back(std::move(sample));
  }
  return result;
}

RemoteProjector::RemoteProjector(std::string endpoint, RemoteOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
  validate_endpoint(endpoint_);
}

FeatureMap RemoteProjector::project(const ImageBuf& image) const {
  const auto pad = wire::centered_pad(image.width(), image.height(), options_.canvas);
  const wire::ProjectRequestBody body{wire::pad(image, pad), pad};
  const auto grid = wire::decode_project_response(
      post_json(endpoint_, "/v1/project", wire::encode(body), options_));

  const int s = grid.stride;
  if (pad.canvas_w % s != 0 || pad.canvas_h % s != 0) {
    throw Error(ErrorCode::kProtocolError, "stride " + std::to_string(s) +
                                               " does not divide the padded canvas");
  }
  const int gw = pad.canvas_w / s;
  const int gh = pad.canvas_h / s;
  const std::size_t plane = static_cast<std::size_t>(gw) * gh;
  if (grid.data.size() != plane * grid.channels) {
    throw Error(ErrorCode::kProtocolError, "feature payload size does not match the grid");
  }

  // Cell centers sit at (g + 0.5) * s - 0.5 in canvas pixels.
  auto sample_axis = [s](int canvas_px, int cells, int& lo, int& hi, float& t) {
    double g = (canvas_px + 0.5) / s - 0.5;
    g = std::clamp(g, 0.0, static_cast<double>(cells - 1));
    lo = static_cast<int>(std::floor(g));
    hi = std::min(lo + 1, cells - 1);
    t = static_cast<float>(g - lo);
  };

  FeatureMap out(image.width(), image.height(), grid.channels);
  for (int y = 0; y < image.height(); ++y) {
    int y0, y1;
    float ty;
    sample_axis(y + pad.top, gh, y0, y1, ty);
    for (int x = 0; x < image.width(); ++x) {
      int x0, x1;
      float tx;
      sample_axis(x + pad.left, gw, x0, x1, tx);
      for (int c = 0; c < grid.channels; ++c) {
        const float* p = grid.data.data() + c * plane;
        const float v00 = p[static_cast<std::size_t>(y0) * gw + x0];
        const float v10 = p[static_cast<std::size_t>(y0) * gw + x1];
        const float v01 = p[static_cast<std::size_t>(y1) * gw + x0];
        const float v11 = p[static_cast<std::size_t>(y1) * gw + x1];
        const float top = v00 + (v10 - v00) * tx;
        const float bottom = v01 + (v11 - v01) * tx;
        out.at(x, y, c) = top + (bottom - top) * ty;
      }
    }
  }
  return out;
}

}  // namespace amcp
