#include "amcp/color_model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "amcp/error.hpp"

namespace amcp {
namespace {

constexpr std::size_t kMaxFitSamples = 16384;
constexpr int kSeedingIterations = 10;

double sq_dist(const Color& a, const Color& b) {
  const double d0 = a[0] - b[0], d1 = a[1] - b[1], d2 = a[2] - b[2];
  return d0 * d0 + d1 * d1 + d2 * d2;
}

std::size_t count_distinct(std::span<const Color> samples, std::size_t cap) {
  std::set<Color> seen;
  for (const auto& c : samples) {
    seen.insert(c);
    if (seen.size() >= cap) break;
  }
  return seen.size();
}

std::vector<Color> subsample(std::span<const Color> samples) {
  if (samples.size() <= kMaxFitSamples) return {samples.begin(), samples.end()};
  std::vector<Color> out;
  out.reserve(kMaxFitSamples);
  const double step = static_cast<double>(samples.size()) / kMaxFitSamples;
  for (std::size_t i = 0; i < kMaxFitSamples; ++i) {
    out.push_back(samples[static_cast<std::size_t>(i * step)]);
  }
  return out;
}

// k-means++ seeding followed by a few Lloyd rounds; returns hard labels.
std::vector<int> seed_labels(const std::vector<Color>& x, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Color> centers;
  centers.push_back(x[std::uniform_int_distribution<std::size_t>(0, x.size() - 1)(rng)]);
  std::vector<double> d2(x.size(), std::numeric_limits<double>::max());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      d2[i] = std::min(d2[i], sq_dist(x[i], centers.back()));
      total += d2[i];
    }
    if (total <= 0.0) break;
    double r = std::uniform_real_distribution<double>(0.0, total)(rng);
    std::size_t pick = x.size() - 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      r -= d2[i];
      if (r <= 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(x[pick]);
  }

  std::vector<int> labels(x.size(), 0);
  for (int it = 0; it < kSeedingIterations; ++it) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      double best = std::numeric_limits<double>::max();
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = sq_dist(x[i], centers[c]);
        if (d < best) {
          best = d;
          labels[i] = static_cast<int>(c);
        }
      }
    }
    std::vector<Color> sums(centers.size(), Color{0, 0, 0});
    std::vector<std::size_t> counts(centers.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int ch = 0; ch < 3; ++ch) sums[labels[i]][ch] += x[i][ch];
      ++counts[labels[i]];
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (counts[c] == 0) continue;
      for (int ch = 0; ch < 3; ++ch) centers[c][ch] = sums[c][ch] / counts[c];
    }
  }
  return labels;
}

}  // namespace

double GaussianMixture::mahalanobis(const Component& comp, const Color& c) {
  const double d[3] = {c[0] - comp.mean[0], c[1] - comp.mean[1], c[2] - comp.mean[2]};
  double q = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) q += d[a] * comp.inv_cov[a * 3 + b] * d[b];
  }
  return q;
}

void GaussianMixture::set_component(std::size_t k, double weight, const Color& mean,
                                    const std::array<double, 9>& cov) {
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = cov[r * 3 + c];
  }
  m += kVarianceFloor * Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d inv = m.inverse();
  const double det = m.determinant();
  weights_[k] = weight;
  comps_[k].mean = mean;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) comps_[k].inv_cov[r * 3 + c] = inv(r, c);
  }
  comps_[k].log_norm =
      std::log(weight) - 0.5 * (3.0 * std::log(2.0 * std::numbers::pi) + std::log(det));
}

GaussianMixture GaussianMixture::fit(std::span<const Color> samples, int components,
                                     std::uint64_t seed) {
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "mixture fit on zero samples");
  if (components < 1) throw Error(ErrorCode::kInvalidArgument, "mixture needs >= 1 component");

  const std::vector<Color> x = subsample(samples);
  GaussianMixture gm;
  int k = components;
  if (count_distinct(x, static_cast<std::size_t>(components)) < static_cast<std::size_t>(components)) {
    k = 1;
    gm.single_fallback_ = components > 1;
  }

  std::vector<int> labels = k == 1 ? std::vector<int>(x.size(), 0) : seed_labels(x, k, seed);
  const std::size_t n = x.size();

  // Responsibilities, initialised from the hard seeding labels.
  std::vector<double> resp(n * k, 0.0);
  for (std::size_t i = 0; i < n; ++i) resp[i * k + labels[i]] = 1.0;

  gm.weights_.assign(k, 0.0);
  gm.comps_.assign(k, Component{});
  std::vector<bool> alive(k, true);

  auto m_step = [&] {
    for (int c = 0; c < k; ++c) {
      double nk = 0.0;
      Color mean{0, 0, 0};
      for (std::size_t i = 0; i < n; ++i) {
        const double r = resp[i * k + c];
        nk += r;
        for (int ch = 0; ch < 3; ++ch) mean[ch] += r * x[i][ch];
      }
      if (nk < 1e-9) {
        alive[c] = false;
        continue;
      }
      for (auto& v : mean) v /= nk;
      std::array<double, 9> cov{};
      for (std::size_t i = 0; i < n; ++i) {
        const double r = resp[i * k + c];
        if (r == 0.0) continue;
        const double d[3] = {x[i][0] - mean[0], x[i][1] - mean[1], x[i][2] - mean[2]};
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) cov[a * 3 + b] += r * d[a] * d[b];
        }
      }
      for (auto& v : cov) v /= nk;
      gm.set_component(c, nk / static_cast<double>(n), mean, cov);
    }
  };

  m_step();
  std::vector<double> logp(k);
  for (int it = 0; it < kEmIterations && k > 1; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double top = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        logp[c] = alive[c] ? gm.comps_[c].log_norm - 0.5 * mahalanobis(gm.comps_[c], x[i])
                           : -std::numeric_limits<double>::infinity();
        top = std::max(top, logp[c]);
      }
      double sum = 0.0;
      for (int c = 0; c < k; ++c) {
        const double e = alive[c] ? std::exp(logp[c] - top) : 0.0;
        resp[i * k + c] = e;
        sum += e;
      }
      for (int c = 0; c < k; ++c) resp[i * k + c] /= sum;
    }
    m_step();
  }

  // Drop components that died during EM.
  GaussianMixture out;
  out.single_fallback_ = gm.single_fallback_;
  for (int c = 0; c < k; ++c) {
    if (!alive[c]) continue;
    out.weights_.push_back(gm.weights_[c]);
    out.comps_.push_back(gm.comps_[c]);
  }
  return out;
}

double GaussianMixture::log_density(const Color& col) const {
  double top = -std::numeric_limits<double>::infinity();
  double terms[16];
  std::vector<double> spill;
  double* t = terms;
  if (comps_.size() > 16) {
    spill.resize(comps_.size());
    t = spill.data();
  }
  for (std::size_t c = 0; c < comps_.size(); ++c) {
    const auto& comp = comps_[c];
    const double q = mahalanobis(comp, col);
    t[c] = comp.log_norm - 0.5 * q;
    top = std::max(top, t[c]);
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < comps_.size(); ++c) sum += std::exp(t[c] - top);
  return top + std::log(sum);
}

}  // namespace amcp
