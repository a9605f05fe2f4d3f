#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "agglo/linkage.hpp"

namespace agglo {

// k: target cluster count, s: minimum cluster size, c: outlier threshold
// (all in points).
struct CutParams {
  std::size_t k = 2;
  std::size_t s = 1;
  std::size_t c = 0;

  // Requires k >= 1, 1 <= s <= n and 2c < n.
  void validate(std::size_t n) const;
  // s and c given as fractions of n, rounded to the nearest point count.
  static CutParams from_fractions(std::size_t n, std::size_t k, double s_fraction, double c_fraction);
};

struct IdentifiedClusters {
  std::vector<std::size_t> nodes;    // dendrogram ids, ascending
  std::vector<double> heights;       // formation height of each node
  std::size_t stop_merge = 0;        // merge index where the search stopped
  std::size_t level = 0;             // number of size->=s clusters found there
  bool undone = false;               // the stopping merge was reverted
};

// True when (s_u - s) < (s - s_m) with s_u = s_q + s_t and s_m = max(s_q, s_t):
// the merge lands closer to the target size than its larger child does.
bool keep_last_merge(std::size_t s_q, std::size_t s_t, std::size_t s);

// Replays merges until, for the first time, exactly k live clusters have at
// least s points, falling back to k-1, k-2, ... when k never occurs. When the
// stopping merge is the one that produced a new size->=s cluster, it is
// reverted in favour of its larger child unless keep_last_merge holds.
IdentifiedClusters identify_clusters(const Dendrogram& d, const CutParams& params);

struct PrunedOutliers {
  std::vector<std::size_t> points;      // ascending
  std::size_t stop_node = 0;            // node where the descent ended
  double stop_height = 0.0;             // its height (0 for a leaf)
};

// Top-down descent from the root: while one child has fewer than c points,
// that child's points become outliers and the descent follows the other
// child. Stops at the first merge whose children both have >= c points, or
// where both are smaller than c.
PrunedOutliers prune_outliers(const Dendrogram& d, std::size_t c);

// Mean formation height over the root height, clamped to [0, 1]; 0 when the
// root height is 0.
double relevance(const Dendrogram& d, const std::vector<double>& cluster_heights);

struct CutResult {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> cluster_nodes;
  std::vector<double> cluster_heights;
  std::vector<std::size_t> outliers;
  double outlier_stop_height = 0.0;
  double relevance = 0.0;
  std::size_t n_pred = 0;
};

CutResult cut(const Dendrogram& d, const CutParams& params);

std::string cut_result_to_json(const CutResult& r);
CutResult cut_result_from_json(std::string_view text);

enum class Region { Nucleus, Transition, Periphery };

struct RegionLabel {
  Region region = Region::Transition;
  std::size_t cluster = 0;  // meaningful for Nucleus only

  bool operator==(const RegionLabel&) const = default;
};

using RegionLabels = std::vector<RegionLabel>;

RegionLabels region_labels(std::size_t n, const CutResult& cr);
RegionLabels region_labels(const PointSet& points, const CutResult& cr);

// "cluster<i>", "transition" or "outlier".
std::string label_name(const RegionLabel& label);

}  // namespace agglo
