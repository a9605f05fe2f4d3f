#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agglo/point_set.hpp"

namespace agglo {

enum class LinkageMethod { Single, Complete, Average, Centroid, Median, Ward };

inline constexpr LinkageMethod kAllMethods[] = {
    LinkageMethod::Single,   LinkageMethod::Complete, LinkageMethod::Average,
    LinkageMethod::Centroid, LinkageMethod::Median,   LinkageMethod::Ward};

// Three-letter code: SIN, COM, AVG, CEN, MED, WAR.
std::string_view to_string(LinkageMethod method);
// Accepts the three-letter codes and the long names, case-insensitive.
LinkageMethod parse_linkage_method(std::string_view text);

// Centroid and median linkage may produce inversions.
constexpr bool is_monotone(LinkageMethod m) {
  return m != LinkageMethod::Centroid && m != LinkageMethod::Median;
}

struct Merge {
  std::size_t left;
  std::size_t right;
  double height;
  std::size_t size;

  bool operator==(const Merge&) const = default;
};

// Merge history. Ids 0..n-1 are the original points; merge i creates id n+i.
class Dendrogram {
 public:
  Dendrogram(std::size_t n, std::vector<Merge> merges);

  std::size_t point_count() const { return n_; }
  const std::vector<Merge>& merges() const { return merges_; }
  std::size_t node_count() const { return n_ + merges_.size(); }

  bool is_leaf(std::size_t id) const { return id < n_; }
  const Merge& merge_of(std::size_t id) const { return merges_[id - n_]; }
  std::size_t size_of(std::size_t id) const { return is_leaf(id) ? 1 : merge_of(id).size; }
  // Formation height; leaves are formed at 0.
  double height_of(std::size_t id) const { return is_leaf(id) ? 0.0 : merge_of(id).height; }

  std::size_t root() const { return node_count() - 1; }
  double root_height() const { return merges_.empty() ? 0.0 : merges_.back().height; }

  // Original point ids under a node, ascending.
  std::vector<std::size_t> leaves(std::size_t id) const;

 private:
  std::size_t n_;
  std::vector<Merge> merges_;
};

enum class LinkageStrategy {
  // Minimum spanning tree for single, nearest-neighbor chain for complete/
  // average/Ward, generic reduction loop for centroid/median.
  Automatic,
  // Generic reduction loop for every method; follows the greedy minimum-pair
  // order with the documented tie-break exactly.
  Generic,
};

// Ties between equal minimum distances go to the lexicographically smallest
// (smaller id, larger id) pair. Each merge stores left < right.
Dendrogram linkage(const CondensedDistances& dist, LinkageMethod method,
                   LinkageStrategy strategy = LinkageStrategy::Automatic);

Dendrogram linkage_single_mst(const CondensedDistances& dist);

// Flat partition obtained by applying every merge of height <= threshold.
// Labels are numbered by first appearance in point order.
std::vector<std::size_t> flat_clusters(const Dendrogram& d, double threshold);

struct Violation {
  enum class Kind {
    PointCount,
    MergeCount,
    UnknownChild,
    ForwardReference,
    SelfMerge,
    DoubleParent,
    SizeMismatch,
    BadHeight,
    RootSize,
  };
  Kind kind;
  std::optional<std::size_t> merge_index;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind kind) const;
};

ValidationReport validate_dendrogram(const Dendrogram& d);

// JSON interchange: {"n": N, "merges": [[left, right, height, size], ...]}.
std::string dendrogram_to_json(const Dendrogram& d);
Dendrogram dendrogram_from_json(std::string_view text);

}  // namespace agglo
