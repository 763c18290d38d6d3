#pragma once

#include <string>

#include "amcp/painter.hpp"
#include "amcp/projector.hpp"

namespace amcp {

struct RemoteOptions {
  int canvas = 512;              // rasters are zero-padded to at least this size
  double timeout_seconds = 120;  // per request
};

// Client for POST {endpoint}/v1/paint. Kept pixels of every returned sample
// are restored from the request image, so the painter contract holds even
// if the server only approximately preserves them.
class RemotePainter final : public Painter {
 public:
  explicit RemotePainter(std::string endpoint, RemoteOptions options = {});

  PaintResult paint(const PaintRequest& request) const override;
  std::string name() const override { return "remote:" + endpoint_; }

 private:
  std::string endpoint_;
  RemoteOptions options_;
};

// Client for POST {endpoint}/v1/project. The strided feature grid returned
// by the server is bilinearly upsampled (pixel-center aligned) to full
// resolution and cropped back to the original frame.
class RemoteProjector final : public Projector {
 public:
  explicit RemoteProjector(std::string endpoint, RemoteOptions options = {});

  FeatureMap project(const ImageBuf& image) const override;
  std::string name() const override { return "remote:" + endpoint_; }

 private:
  std::string endpoint_;
  RemoteOptions options_;
};

// Accepts http://host[:port]; throws kConfigError otherwise.
void validate_endpoint(const std::string& endpoint);

}  // namespace amcp
