#include "agglo/linkage.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "agglo/errors.hpp"

namespace agglo {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

bool uses_squared_distances(LinkageMethod m) {
  return m == LinkageMethod::Centroid || m == LinkageMethod::Median || m == LinkageMethod::Ward;
}

// Distance from the union of s and t to v, given the pre-merge distances.
// Centroid, median and Ward operate on squared distances.
double lance_williams(LinkageMethod m, double dsv, double dtv, double dst, double ns, double nt,
                      double nv) {
  switch (m) {
    case LinkageMethod::Single:
      return std::min(dsv, dtv);
    case LinkageMethod::Complete:
      return std::max(dsv, dtv);
    case LinkageMethod::Average:
      return (ns * dsv + nt * dtv) / (ns + nt);
    case LinkageMethod::Centroid: {
      const double nu = ns + nt;
      return (ns * dsv + nt * dtv) / nu - ns * nt * dst / (nu * nu);
    }
    case LinkageMethod::Median:
      return 0.5 * dsv + 0.5 * dtv - 0.25 * dst;
    case LinkageMethod::Ward:
      return ((nv + ns) * dsv + (nv + nt) * dtv - nv * dst) / (nv + ns + nt);
  }
  return kInf;
}

// Mutable condensed matrix indexed by slot.
class Workspace {
 public:
  Workspace(const CondensedDistances& dist, bool squared) : n_(dist.size()), d_(dist.values()) {
    if (squared) {
      for (double& v : d_) v *= v;
    }
  }
  double& operator()(std::size_t i, std::size_t j) { return d_[CondensedDistances::index(n_, i, j)]; }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

double output_height(LinkageMethod m, double stored) {
  return uses_squared_distances(m) ? std::sqrt(std::max(0.0, stored)) : stored;
}

void require_points(const CondensedDistances& dist) {
  if (dist.size() < 2) throw ValidationError("linkage needs at least 2 points");
}

// Merge between representative point ids, in discovery order.
struct RawMerge {
  std::size_t a;
  std::size_t b;
  double height;
};

// Sorts merges by height (stable) and assigns cluster ids through union-find.
// Valid only for methods whose dendrogram is independent of the merge order,
// i.e. single linkage and the reducible methods.
Dendrogram label_sorted(std::size_t n, std::vector<RawMerge> raw) {
  std::stable_sort(raw.begin(), raw.end(),
                   [](const RawMerge& x, const RawMerge& y) { return x.height < y.height; });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::size_t> cluster_id(n);
  std::iota(cluster_id.begin(), cluster_id.end(), 0);
  std::vector<std::size_t> size(n, 1);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  std::vector<Merge> merges;
  merges.reserve(raw.size());
  for (const auto& m : raw) {
    const std::size_t ra = find(m.a);
    const std::size_t rb = find(m.b);
    const std::size_t ia = cluster_id[ra];
    const std::size_t ib = cluster_id[rb];
    parent[ra] = rb;
    size[rb] += size[ra];
    cluster_id[rb] = n + merges.size();
    merges.push_back({std::min(ia, ib), std::max(ia, ib), m.height, size[rb]});
  }
  return Dendrogram(n, std::move(merges));
}

// Greedy reduction: repeatedly merges the globally closest pair. Each row
// caches its nearest partner among higher slots; the scan uses the full
// (distance, smaller id, larger id) key so ties follow cluster ids.
Dendrogram generic_linkage(const CondensedDistances& dist, LinkageMethod method) {
  const std::size_t n = dist.size();
  Workspace w(dist, uses_squared_distances(method));
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 0);
  std::vector<std::size_t> size(n, 1);
  std::vector<char> active(n, 1);
  std::vector<std::size_t> nn(n, kNone);
  std::vector<double> nn_dist(n, kInf);

  auto precedes = [&](double d1, std::size_t i1, std::size_t j1, double d2, std::size_t i2,
                      std::size_t j2) {
    if (d1 != d2) return d1 < d2;
    const auto lo1 = std::min(id[i1], id[j1]), hi1 = std::max(id[i1], id[j1]);
    const auto lo2 = std::min(id[i2], id[j2]), hi2 = std::max(id[i2], id[j2]);
    return lo1 != lo2 ? lo1 < lo2 : hi1 < hi2;
  };
  auto refresh_row = [&](std::size_t i) {
    nn[i] = kNone;
    nn_dist[i] = kInf;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!active[j]) continue;
      const double d = w(i, j);
      if (nn[i] == kNone || precedes(d, i, j, nn_dist[i], i, nn[i])) {
        nn[i] = j;
        nn_dist[i] = d;
      }
    }
  };
  for (std::size_t i = 0; i + 1 < n; ++i) refresh_row(i);

  std::vector<Merge> merges;
  merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = kNone;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i] || nn[i] == kNone) continue;
      if (a == kNone || precedes(nn_dist[i], i, nn[i], nn_dist[a], a, nn[a])) a = i;
    }
    const std::size_t b = nn[a];
    const double dab = nn_dist[a];
    const std::size_t new_size = size[a] + size[b];
    merges.push_back({std::min(id[a], id[b]), std::max(id[a], id[b]), output_height(method, dab),
                      new_size});

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      w(k, b) = lance_williams(method, w(k, a), w(k, b), dab, static_cast<double>(size[a]),
                               static_cast<double>(size[b]), static_cast<double>(size[k]));
    }
    active[a] = 0;
    nn[a] = kNone;
    size[b] = new_size;
    id[b] = n + step;

    for (std::size_t i = 0; i < b; ++i) {
      if (!active[i]) continue;
      if (nn[i] == a || nn[i] == b) {
        refresh_row(i);
      } else if (nn[i] != kNone && precedes(w(i, b), i, b, nn_dist[i], i, nn[i])) {
        nn[i] = b;
        nn_dist[i] = w(i, b);
      }
    }
    refresh_row(b);
  }
  return Dendrogram(n, std::move(merges));
}

// Nearest-neighbor chain for reducible methods. On ties the previous chain
// element wins, then the lowest slot.
Dendrogram nn_chain_linkage(const CondensedDistances& dist, LinkageMethod method) {
  const std::size_t n = dist.size();
  Workspace w(dist, uses_squared_distances(method));
  std::vector<std::size_t> size(n, 1);
  std::vector<char> active(n, 1);
  std::vector<std::size_t> chain;
  chain.reserve(n);
  std::vector<RawMerge> raw;
  raw.reserve(n - 1);
  std::size_t first_active = 0;

  while (raw.size() + 1 < n) {
    if (chain.empty()) {
      while (!active[first_active]) ++first_active;
      chain.push_back(first_active);
    }
    for (;;) {
      const std::size_t x = chain.back();
      const std::size_t prev = chain.size() >= 2 ? chain[chain.size() - 2] : kNone;
      std::size_t y = prev;
      double best = prev == kNone ? kInf : w(x, prev);
      for (std::size_t j = 0; j < n; ++j) {
        if (!active[j] || j == x) continue;
        const double d = w(x, j);
        if (d < best || (y == kNone && d == best)) {
          best = d;
          y = j;
        }
      }
      if (y == prev) break;
      chain.push_back(y);
    }
    const std::size_t x = chain.back();
    chain.pop_back();
    const std::size_t y = chain.back();
    chain.pop_back();
    const std::size_t a = std::min(x, y);
    const std::size_t b = std::max(x, y);
    const double dab = w(a, b);
    raw.push_back({a, b, output_height(method, dab)});

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      w(k, b) = lance_williams(method, w(k, a), w(k, b), dab, static_cast<double>(size[a]),
                               static_cast<double>(size[b]), static_cast<double>(size[k]));
    }
    active[a] = 0;
    size[b] += size[a];
  }
  return label_sorted(n, std::move(raw));
}

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(LinkageMethod method) {
  switch (method) {
    case LinkageMethod::Single: return "SIN";
    case LinkageMethod::Complete: return "COM";
    case LinkageMethod::Average: return "AVG";
    case LinkageMethod::Centroid: return "CEN";
    case LinkageMethod::Median: return "MED";
    case LinkageMethod::Ward: return "WAR";
  }
  return "?";
}

LinkageMethod parse_linkage_method(std::string_view text) {
  const std::string t = lower(text);
  if (t == "sin" || t == "single") return LinkageMethod::Single;
  if (t == "com" || t == "complete") return LinkageMethod::Complete;
  if (t == "avg" || t == "average") return LinkageMethod::Average;
  if (t == "cen" || t == "centroid") return LinkageMethod::Centroid;
  if (t == "med" || t == "median") return LinkageMethod::Median;
  if (t == "war" || t == "ward") return LinkageMethod::Ward;
  throw ValidationError("unknown linkage method '" + std::string(text) + "'");
}

Dendrogram::Dendrogram(std::size_t n, std::vector<Merge> merges) : n_(n), merges_(std::move(merges)) {}

std::vector<std::size_t> Dendrogram::leaves(std::size_t id) const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{id};
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    if (is_leaf(x)) {
      out.push_back(x);
    } else {
      stack.push_back(merge_of(x).left);
      stack.push_back(merge_of(x).right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dendrogram linkage(const CondensedDistances& dist, LinkageMethod method, LinkageStrategy strategy) {
  require_points(dist);
  if (strategy == LinkageStrategy::Generic) return generic_linkage(dist, method);
  switch (method) {
    case LinkageMethod::Single:
      return linkage_single_mst(dist);
    case LinkageMethod::Complete:
    case LinkageMethod::Average:
    case LinkageMethod::Ward:
      return nn_chain_linkage(dist, method);
    case LinkageMethod::Centroid:
    case LinkageMethod::Median:
      return generic_linkage(dist, method);
  }
  return generic_linkage(dist, method);
}

// Prim's algorithm on the complete graph, O(n^2).
Dendrogram linkage_single_mst(const CondensedDistances& dist) {
  require_points(dist);
  const std::size_t n = dist.size();
  std::vector<double> best(n, kInf);
  std::vector<std::size_t> from(n, kNone);
  std::vector<char> in_tree(n, 0);
  std::vector<RawMerge> edges;
  edges.reserve(n - 1);

  std::size_t current = 0;
  in_tree[0] = 1;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t next = kNone;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double d = dist(current, j);
      if (d < best[j]) {
        best[j] = d;
        from[j] = current;
      }
      if (next == kNone || best[j] < best[next]) next = j;
    }
    edges.push_back({from[next], next, best[next]});
    in_tree[next] = 1;
    current = next;
  }
  return label_sorted(n, std::move(edges));
}

std::vector<std::size_t> flat_clusters(const Dendrogram& d, double threshold) {
  const std::size_t n = d.point_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<std::size_t> representative(d.node_count());
  std::iota(representative.begin(), representative.begin() + static_cast<std::ptrdiff_t>(n), 0);
  for (std::size_t i = 0; i < d.merges().size(); ++i) {
    const Merge& m = d.merges()[i];
    representative[n + i] = representative[m.left];
    if (m.height <= threshold) parent[find(representative[m.left])] = find(representative[m.right]);
  }
  std::vector<std::size_t> labels(n);
  std::vector<std::size_t> label_of_root(n, kNone);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (label_of_root[r] == kNone) label_of_root[r] = next++;
    labels[i] = label_of_root[r];
  }
  return labels;
}

bool ValidationReport::has(Violation::Kind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate_dendrogram(const Dendrogram& d) {
  ValidationReport report;
  auto fail = [&](Violation::Kind kind, std::optional<std::size_t> at, std::string msg) {
    report.violations.push_back({kind, at, std::move(msg)});
  };
  const std::size_t n = d.point_count();
  const auto& merges = d.merges();
  if (n < 2) fail(Violation::Kind::PointCount, std::nullopt, "dendrogram must cover at least 2 points");
  if (merges.size() + 1 != n) {
    fail(Violation::Kind::MergeCount, std::nullopt,
         "expected " + std::to_string(n > 0 ? n - 1 : 0) + " merges, found " +
             std::to_string(merges.size()));
  }

  const std::size_t total = n + merges.size();
  std::vector<std::size_t> sizes(total, 1);
  std::vector<std::size_t> parent_of(total, kNone);
  for (std::size_t i = 0; i < merges.size(); ++i) {
    const Merge& m = merges[i];
    const std::size_t self = n + i;
    bool children_ok = true;
    for (std::size_t child : {m.left, m.right}) {
      if (child >= total) {
        fail(Violation::Kind::UnknownChild, i, "child id " + std::to_string(child) + " does not exist");
        children_ok = false;
      } else if (child >= self) {
        fail(Violation::Kind::ForwardReference, i,
             "child id " + std::to_string(child) + " is created at or after this merge");
        children_ok = false;
      }
    }
    if (m.left == m.right) {
      fail(Violation::Kind::SelfMerge, i, "cluster " + std::to_string(m.left) + " merged with itself");
      children_ok = false;
    }
    if (children_ok) {
      for (std::size_t child : {m.left, m.right}) {
        if (parent_of[child] != kNone) {
          fail(Violation::Kind::DoubleParent, i,
               "child id " + std::to_string(child) + " already merged at index " +
                   std::to_string(parent_of[child]));
        } else {
          parent_of[child] = i;
        }
      }
      const std::size_t expected = sizes[m.left] + sizes[m.right];
      if (m.size != expected) {
        fail(Violation::Kind::SizeMismatch, i,
             "size " + std::to_string(m.size) + " != " + std::to_string(expected));
      }
    }
    sizes[self] = m.size;
    if (!std::isfinite(m.height) || m.height < 0.0) {
      fail(Violation::Kind::BadHeight, i, "height must be finite and non-negative");
    }
  }
  if (!merges.empty() && merges.back().size != n) {
    fail(Violation::Kind::RootSize, merges.size() - 1,
         "root size " + std::to_string(merges.back().size) + " != " + std::to_string(n));
  }
  return report;
}

}  // namespace agglo
