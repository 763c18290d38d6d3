#pragma once

#include <string>

#include "amcp/feature_map.hpp"
#include "amcp/image.hpp"

namespace amcp {

// Image -> per-pixel feature map at full resolution. Deterministic and
// callable concurrently.
class Projector {
 public:
  virtual ~Projector() = default;
  virtual FeatureMap project(const ImageBuf& image) const = 0;
  virtual std::string name() const = 0;
};

class IdentityProjector final : public Projector {
 public:
  FeatureMap project(const ImageBuf& image) const override;
  std::string name() const override { return "identity"; }
};

// Local mean and standard deviation of each RGB channel over a window x
// window neighbourhood (offsets -window/2 .. window - window/2 - 1, clipped
// to the frame). Channels: mean R, G, B, then std R, G, B.
class PatchStatsProjector final : public Projector {
 public:
  explicit PatchStatsProjector(int window = 8);

  FeatureMap project(const ImageBuf& image) const override;
  std::string name() const override { return "patchstats"; }
  int window() const { return window_; }

 private:
  int window_;
};

}  // namespace amcp
