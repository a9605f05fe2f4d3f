#include "agglo/dendro_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "agglo/errors.hpp"

namespace agglo {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

void require_valid(const Dendrogram& d) {
  const auto report = validate_dendrogram(d);
  if (!report.ok()) throw ValidationError("invalid dendrogram: " + report.violations.front().message);
}

}  // namespace

void CutParams::validate(std::size_t n) const {
  if (k < 1) throw ValidationError("cut: k must be >= 1");
  if (s < 1 || s > n) {
    throw ValidationError("cut: s must lie in [1, " + std::to_string(n) + "], got " + std::to_string(s));
  }
  if (2 * c >= n) {
    throw ValidationError("cut: c must be < n/2 (" + std::to_string(n) + "/2), got " + std::to_string(c));
  }
}

CutParams CutParams::from_fractions(std::size_t n, std::size_t k, double s_fraction, double c_fraction) {
  if (!(s_fraction > 0.0 && s_fraction < 1.0) || !(c_fraction >= 0.0 && c_fraction < 1.0)) {
    throw ValidationError("cut fractions must lie in (0, 1)");
  }
  CutParams p;
  p.k = k;
  p.s = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(s_fraction * static_cast<double>(n))));
  p.c = static_cast<std::size_t>(std::llround(c_fraction * static_cast<double>(n)));
  return p;
}

bool keep_last_merge(std::size_t s_q, std::size_t s_t, std::size_t s) {
  const auto s_u = static_cast<long long>(s_q + s_t);
  const auto s_m = static_cast<long long>(std::max(s_q, s_t));
  const auto target = static_cast<long long>(s);
  return (s_u - target) < (target - s_m);
}

IdentifiedClusters identify_clusters(const Dendrogram& d, const CutParams& params) {
  require_valid(d);
  const std::size_t n = d.point_count();
  params.validate(n);
  const auto& merges = d.merges();
  const std::size_t s = params.s;
  const std::size_t k = params.k;

  // first_hit[j]: first merge after which exactly j clusters of size >= s are live.
  std::vector<std::size_t> first_hit(k + 1, kNone);
  std::ptrdiff_t count = s == 1 ? static_cast<std::ptrdiff_t>(n) : 0;
  for (std::size_t i = 0; i < merges.size(); ++i) {
    const Merge& m = merges[i];
    count -= d.size_of(m.left) >= s;
    count -= d.size_of(m.right) >= s;
    count += m.size >= s;
    if (count >= 1 && static_cast<std::size_t>(count) <= k && first_hit[count] == kNone) {
      first_hit[count] = i;
    }
  }

  IdentifiedClusters out;
  std::size_t level = k;
  while (level > 0 && first_hit[level] == kNone) --level;
  if (level == 0) {
    // Unreachable while s <= n, since the root always qualifies.
    out.nodes = {d.root()};
    out.heights = {d.root_height()};
    out.stop_merge = merges.size() - 1;
    out.level = 1;
    return out;
  }
  const std::size_t stop = first_hit[level];
  out.stop_merge = stop;
  out.level = level;

  // Live after merge `stop`: created at or before it, not yet consumed.
  std::vector<char> consumed(d.node_count(), 0);
  for (std::size_t i = 0; i <= stop; ++i) {
    consumed[merges[i].left] = 1;
    consumed[merges[i].right] = 1;
  }
  for (std::size_t id = 0; id < n + stop + 1; ++id) {
    if (!consumed[id] && d.size_of(id) >= s) out.nodes.push_back(id);
  }

  const Merge& last = merges[stop];
  const std::size_t u = n + stop;
  const std::size_t s_q = d.size_of(last.left);
  const std::size_t s_t = d.size_of(last.right);
  const bool formed_new = s_q < s && s_t < s && last.size >= s;
  if (formed_new && !keep_last_merge(s_q, s_t, s)) {
    // Equal sizes: the child created first (smaller id) wins.
    const std::size_t larger =
        s_t > s_q ? last.right : (s_q > s_t ? last.left : std::min(last.left, last.right));
    std::replace(out.nodes.begin(), out.nodes.end(), u, larger);
    std::sort(out.nodes.begin(), out.nodes.end());
    out.undone = true;
  }
  for (std::size_t id : out.nodes) out.heights.push_back(d.height_of(id));
  return out;
}

PrunedOutliers prune_outliers(const Dendrogram& d, std::size_t c) {
  require_valid(d);
  const std::size_t n = d.point_count();
  if (c >= n) {
    throw ValidationError("prune_outliers: c = " + std::to_string(c) + " would prune all " +
                          std::to_string(n) + " points");
  }
  PrunedOutliers out;
  std::size_t node = d.root();
  while (!d.is_leaf(node)) {
    const Merge& m = d.merge_of(node);
    const bool left_small = d.size_of(m.left) < c;
    const bool right_small = d.size_of(m.right) < c;
    if (left_small == right_small) break;
    const std::size_t pruned = left_small ? m.left : m.right;
    const auto pts = d.leaves(pruned);
    out.points.insert(out.points.end(), pts.begin(), pts.end());
    node = left_small ? m.right : m.left;
  }
  std::sort(out.points.begin(), out.points.end());
  out.stop_node = node;
  out.stop_height = d.height_of(node);
  return out;
}

double relevance(const Dendrogram& d, const std::vector<double>& cluster_heights) {
  if (cluster_heights.empty()) throw ValidationError("relevance needs at least one cluster");
  const double root = d.root_height();
  if (!(root > 0.0)) return 0.0;
  const double mean = std::accumulate(cluster_heights.begin(), cluster_heights.end(), 0.0) /
                      static_cast<double>(cluster_heights.size());
  return std::clamp(mean / root, 0.0, 1.0);
}

CutResult cut(const Dendrogram& d, const CutParams& params) {
  const IdentifiedClusters found = identify_clusters(d, params);
  const PrunedOutliers pruned = prune_outliers(d, params.c);

  CutResult r;
  r.n = d.point_count();
  r.outliers = pruned.points;
  r.outlier_stop_height = pruned.stop_height;
  std::vector<char> is_outlier(r.n, 0);
  for (std::size_t p : pruned.points) is_outlier[p] = 1;

  for (std::size_t i = 0; i < found.nodes.size(); ++i) {
    std::vector<std::size_t> members;
    for (std::size_t p : d.leaves(found.nodes[i])) {
      if (!is_outlier[p]) members.push_back(p);
    }
    // A cluster lying entirely inside a pruned subtree is dropped.
    if (members.empty()) continue;
    r.clusters.push_back(std::move(members));
    r.cluster_nodes.push_back(found.nodes[i]);
    r.cluster_heights.push_back(found.heights[i]);
  }
  if (r.clusters.empty()) {
    // Only possible when s is far below c; fall back to the unpruned remainder.
    std::vector<std::size_t> rest;
    for (std::size_t p = 0; p < r.n; ++p) {
      if (!is_outlier[p]) rest.push_back(p);
    }
    r.clusters.push_back(std::move(rest));
    r.cluster_nodes.push_back(pruned.stop_node);
    r.cluster_heights.push_back(pruned.stop_height);
  }
  r.n_pred = r.clusters.size();
  r.relevance = relevance(d, r.cluster_heights);
  return r;
}

std::string cut_result_to_json(const CutResult& r) {
  nlohmann::json doc{
      {"n", r.n},
      {"n_pred", r.n_pred},
      {"relevance", r.relevance},
      {"clusters", r.clusters},
      {"cluster_nodes", r.cluster_nodes},
      {"cluster_heights", r.cluster_heights},
      {"outliers", r.outliers},
      {"outlier_stop_height", r.outlier_stop_height},
  };
  return doc.dump();
}

CutResult cut_result_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    CutResult r;
    r.n = doc.at("n").get<std::size_t>();
    r.n_pred = doc.at("n_pred").get<std::size_t>();
    r.relevance = doc.at("relevance").get<double>();
    r.clusters = doc.at("clusters").get<std::vector<std::vector<std::size_t>>>();
    r.outliers = doc.at("outliers").get<std::vector<std::size_t>>();
    if (doc.contains("cluster_nodes")) r.cluster_nodes = doc["cluster_nodes"].get<std::vector<std::size_t>>();
    if (doc.contains("cluster_heights")) {
      r.cluster_heights = doc["cluster_heights"].get<std::vector<double>>();
    }
    if (doc.contains("outlier_stop_height")) r.outlier_stop_height = doc["outlier_stop_height"].get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("cut result JSON: ") + e.what());
  }
}

RegionLabels region_labels(std::size_t n, const CutResult& cr) {
  RegionLabels labels(n);
  auto check = [n](std::size_t p) {
    if (p >= n) throw ValidationError("cut result references point " + std::to_string(p) + " >= n");
  };
  for (std::size_t i = 0; i < cr.clusters.size(); ++i) {
    for (std::size_t p : cr.clusters[i]) {
      check(p);
      labels[p] = {Region::Nucleus, i};
    }
  }
  for (std::size_t p : cr.outliers) {
    check(p);
    labels[p] = {Region::Periphery, 0};
  }
  return labels;
}

RegionLabels region_labels(const PointSet& points, const CutResult& cr) {
  return region_labels(points.size(), cr);
}

std::string label_name(const RegionLabel& label) {
  switch (label.region) {
    case Region::Nucleus: return "cluster" + std::to_string(label.cluster);
    case Region::Transition: return "transition";
    case Region::Periphery: return "outlier";
  }
  return "transition";
}

}  // namespace agglo
