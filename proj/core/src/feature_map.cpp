#include "amcp/feature_map.hpp"

#include "amcp/error.hpp"

namespace amcp {

FeatureMap::FeatureMap(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0 || channels < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid feature map shape");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, 0.0f);
}

}  // namespace amcp
