#include "amcp/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "amcp/error.hpp"

namespace amcp {
namespace {

// Weighted distinct values with prefix sums for O(1) segment cost.
class SegmentCost {
 public:
  SegmentCost(const std::vector<double>& values, const std::vector<double>& weights) {
    const std::size_t m = values.size();
    long double total_w = 0, total_wx = 0;
    for (std::size_t i = 0; i < m; ++i) {
      total_w += weights[i];
      total_wx += weights[i] * static_cast<long double>(values[i]);
    }
    const long double shift = total_wx / total_w;
    w_.assign(m + 1, 0);
    wx_.assign(m + 1, 0);
    wxx_.assign(m + 1, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const long double v = values[i] - shift;
      w_[i + 1] = w_[i] + weights[i];
      wx_[i + 1] = wx_[i] + weights[i] * v;
      wxx_[i + 1] = wxx_[i] + weights[i] * v * v;
    }
  }

  // Sum of squared deviations from the mean over distinct values [a, b).
  long double operator()(std::size_t a, std::size_t b) const {
    const long double w = w_[b] - w_[a];
    if (w <= 0) return 0;
    const long double s = wx_[b] - wx_[a];
    const long double c = (wxx_[b] - wxx_[a]) - s * s / w;
    return c > 0 ? c : 0;
  }

 private:
  std::vector<long double> w_, wx_, wxx_;
};

// Costs closer than this fraction of the total scatter count as ties, which
// go to the lowest split. Equal-cost partitions are common with quantized
// values, and rounding alone should not decide between them.
constexpr long double kTieTolerance = 1e-12L;

// One DP layer: cur[i] = min_s prev[s] + cost(s, i). The optimal split is
// monotone in i, so divide and conquer over i.
void dp_layer(const SegmentCost& cost, const std::vector<long double>& prev,
              std::vector<long double>& cur, std::vector<std::size_t>& arg, std::size_t lo,
              std::size_t hi, std::size_t opt_lo, std::size_t opt_hi, long double tie) {
  if (lo > hi) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  long double best = std::numeric_limits<long double>::infinity();
  std::size_t best_s = opt_lo;
  const std::size_t s_hi = std::min(mid - 1, opt_hi);
  for (std::size_t s = opt_lo; s <= s_hi; ++s) {
    const long double v = prev[s] + cost(s, mid);
    if (v < best - tie) {
      best = v;
      best_s = s;
    }
  }
  cur[mid] = best;
  arg[mid] = best_s;
  if (mid > lo) dp_layer(cost, prev, cur, arg, lo, mid - 1, opt_lo, best_s, tie);
  dp_layer(cost, prev, cur, arg, mid + 1, hi, best_s, opt_hi, tie);
}

}  // namespace

KMeans1D kmeans_1d(std::span<const double> values, int k) {
  if (k != 2 && k != 3) throw Error(ErrorCode::kInvalidK, "k must be 2 or 3, got " + std::to_string(k));
  KMeans1D out;
  if (values.empty()) return out;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct;
  std::vector<double> weight;
  for (double v : sorted) {
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      weight.push_back(1.0);
    } else {
      weight.back() += 1.0;
    }
  }
  const std::size_t m = distinct.size();
  if (m == 1) {
    out.degenerate = true;
    out.centers = {distinct.front()};
    out.labels.assign(values.size(), 0);
    return out;
  }

  const std::size_t clusters = std::min<std::size_t>(static_cast<std::size_t>(k), m);
  const SegmentCost cost(distinct, weight);
  const long double tie = kTieTolerance * cost(0, m);

  // layers[j][i]: best cost of the first i distinct values in j + 1 clusters.
  std::vector<std::vector<long double>> layers(clusters,
                                               std::vector<long double>(m + 1, 0));
  std::vector<std::vector<std::size_t>> args(clusters, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = 1; i <= m; ++i) layers[0][i] = cost(0, i);
  for (std::size_t j = 1; j < clusters; ++j) {
    dp_layer(cost, layers[j - 1], layers[j], args[j], j + 1, m, j, m - 1, tie);
  }

  // Backtrack the cluster boundaries (as distinct-value indices).
  std::vector<std::size_t> starts(clusters, 0);
  std::size_t end = m;
  for (std::size_t j = clusters - 1; j > 0; --j) {
    starts[j] = args[j][end];
    end = starts[j];
  }

  out.centers.resize(clusters);
  for (std::size_t j = 0; j < clusters; ++j) {
    const std::size_t a = starts[j];
    const std::size_t b = j + 1 < clusters ? starts[j + 1] : m;
    double sw = 0.0, swx = 0.0;
    for (std::size_t i = a; i < b; ++i) {
      sw += weight[i];
      swx += weight[i] * distinct[i];
    }
    out.centers[j] = swx / sw;
  }

  out.labels.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), values[i]) - distinct.begin());
    const auto it = std::upper_bound(starts.begin(), starts.end(), pos);
    out.labels[i] = static_cast<int>(it - starts.begin()) - 1;
  }
  return out;
}

ClusterResult kmeans_binarize(const ContrastField& field, int k) {
  if (k != 2 && k != 3) throw Error(ErrorCode::kInvalidK, "k must be 2 or 3, got " + std::to_string(k));
  const Rect roi = field.roi();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(roi.area()));
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) values.push_back(field.at(x, y));
  }

  const KMeans1D km = kmeans_1d(values, k);
  ClusterResult out;
  out.centers = km.centers;
  out.degenerate = km.degenerate;
  out.width = field.width();
  out.assignment.assign(static_cast<std::size_t>(field.width()) * field.height(), -1);
  out.selected = BitMask(field.width(), field.height());
  const int top = out.top_label();
  std::size_t i = 0;
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x, ++i) {
      const int label = km.labels[i];
      out.assignment[static_cast<std::size_t>(y) * field.width() + x] = label;
      if (label == top) out.selected.set(x, y);
    }
  }
  return out;
}

}  // namespace amcp
