#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace amcp {

using Color = std::array<double, 3>;

// Full-covariance RGB Gaussian mixture fitted by k-means-seeded EM.
class GaussianMixture {
 public:
  static constexpr int kEmIterations = 20;
  static constexpr double kVarianceFloor = 1e-4;

  // Falls back to a single component when the samples hold fewer than
  // `components` distinct colors. Requires at least one sample.
  static GaussianMixture fit(std::span<const Color> samples, int components, std::uint64_t seed);

  double log_density(const Color& c) const;
  int components() const { return static_cast<int>(weights_.size()); }
  bool single_fallback() const { return single_fallback_; }

 private:
  struct Component {
    Color mean{};
    std::array<double, 9> inv_cov{};
    double log_norm = 0.0;  // log(weight) - 0.5 * log((2pi)^3 |cov|)
  };

  static double mahalanobis(const Component& comp, const Color& c);
  void set_component(std::size_t k, double weight, const Color& mean,
                     const std::array<double, 9>& cov);

  std::vector<double> weights_;
  std::vector<Component> comps_;
  bool single_fallback_ = false;
};

}  // namespace amcp
