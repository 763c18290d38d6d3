#pragma once

// In-process HTTP servers speaking the /v1/paint and /v1/project protocol.

#include <atomic>
#include <cstring>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "amcp/painter.hpp"
#include "amcp/png_io.hpp"
#include "amcp/wire.hpp"

namespace stub {

class Server {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  Server() = default;
  ~Server() { stop(); }
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  void on_paint(Handler h) { server_.Post("/v1/paint", wrap(std::move(h))); }
  void on_project(Handler h) { server_.Post("/v1/project", wrap(std::move(h))); }

  void start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return requests_; }
  std::string last_body() const {
    std::lock_guard lock(mu_);
    return last_body_;
  }

 private:
  Handler wrap(Handler h) {
    return [this, h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      {
        std::lock_guard lock(mu_);
        last_body_ = req.body;
      }
      h(req, res);
    };
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  mutable std::mutex mu_;
  std::string last_body_;
};

inline void reply_json(httplib::Response& res, const std::string& body, int status = 200) {
  res.status = status;
  res.set_content(body, "application/json");
}

// Mean-fill painting on the padded canvas. Kept canvas pixels are exactly the
// kept frame pixels, so the fill color matches the local backend.
inline void meanfill_paint(const httplib::Request& req, httplib::Response& res) {
  try {
    const auto body = amcp::wire::decode_paint_request(req.body);
    amcp::MeanFillPainter painter;
    const auto result = painter.paint({body.image, body.keep, body.n_samples, body.seed,
                                       body.diffusion_steps});
    reply_json(res, amcp::wire::encode_paint_response(result.samples));
  } catch (const std::exception& e) {
    reply_json(res, amcp::wire::encode_error(e.what()), 400);
  }
}

// Little-endian float32, channel-major grid, encoded by hand.
inline std::string feature_payload(const std::vector<float>& channel_major) {
  std::vector<std::uint8_t> bytes(channel_major.size() * 4);
  for (std::size_t i = 0; i < channel_major.size(); ++i) {
    std::uint32_t u;
    std::memcpy(&u, &channel_major[i], 4);
    for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<std::uint8_t>(u >> (8 * b));
  }
  return amcp::wire::base64_encode(bytes);
}

// Stride-1 RGB features of the padded canvas.
inline void identity_project(const httplib::Request& req, httplib::Response& res) {
  try {
    const auto j = nlohmann::json::parse(req.body);
    const auto png = amcp::wire::base64_decode(j.at("image").get<std::string>());
    const amcp::ImageBuf img = amcp::decode_png_rgb(png);
    std::vector<float> grid(static_cast<std::size_t>(img.width()) * img.height() * 3);
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
          grid[(static_cast<std::size_t>(c) * img.height() + y) * img.width() + x] = img.at(x, y, c);
        }
      }
    }
    reply_json(res, nlohmann::json{{"stride", 1}, {"channels", 3}, {"data", feature_payload(grid)}}.dump());
  } catch (const std::exception& e) {
    reply_json(res, amcp::wire::encode_error(e.what()), 400);
  }
}

}  // namespace stub
