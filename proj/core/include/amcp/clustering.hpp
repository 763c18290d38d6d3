#pragma once

#include <span>
#include <vector>

#include "amcp/image.hpp"
#include "amcp/potential.hpp"

namespace amcp {

struct KMeans1D {
  std::vector<double> centers;  // strictly ascending
  std::vector<int> labels;      // per input value, index into centers
  bool degenerate = false;      // all values equal
};

// Globally optimal 1-D k-means (minimum within-cluster sum of squares).
// Equal values always share a cluster; fewer distinct values than k yields
// fewer clusters. Partitions whose costs agree to 1e-12 of the total scatter
// are ties, resolved toward the lower boundaries. Throws kInvalidK unless k
// is 2 or 3.
KMeans1D kmeans_1d(std::span<const double> values, int k);

struct ClusterResult {
  std::vector<double> centers;  // ascending
  std::vector<int> assignment;  // per pixel; -1 outside roi
  int width = 0;
  BitMask selected;             // pixels of the largest-center cluster
  bool degenerate = false;

  int top_label() const { return static_cast<int>(centers.size()) - 1; }
  int label(int x, int y) const { return assignment[static_cast<std::size_t>(y) * width + x]; }
};

// Clusters the roi values of `field` and selects the cluster with the
// largest center. A constant roi is flagged degenerate and fully selected.
ClusterResult kmeans_binarize(const ContrastField& field, int k);

}  // namespace amcp
