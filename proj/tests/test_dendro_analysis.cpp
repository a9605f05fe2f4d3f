#include <doctest.h>

#include <algorithm>
#include <set>

#include "agglo/datagen.hpp"
#include "agglo/dendro_analysis.hpp"
#include "agglo/errors.hpp"
#include "oracles.hpp"

using namespace agglo;

namespace {

PointSet line(std::initializer_list<double> xs) {
  std::vector<std::vector<double>> rows;
  for (double x : xs) rows.push_back({x});
  return PointSet::from_rows(rows);
}

Dendrogram single(const PointSet& ps) { return linkage(pairwise_distances(ps), LinkageMethod::Single); }

using Ids = std::vector<std::size_t>;

// A chain 0, 1, 2, ... with a distant last point: the root splits 499 + 1.
Dendrogram with_far_singleton() {
  std::vector<Merge> merges;
  const std::size_t n = 500;
  std::size_t current = 0;
  for (std::size_t i = 1; i < n - 1; ++i) {
    merges.push_back({std::min(current, i), std::max(current, i), static_cast<double>(i), i + 1});
    current = n + merges.size() - 1;
  }
  merges.push_back({n - 1, current, 1000.0, n});
  return Dendrogram(n, merges);
}

}  // namespace

TEST_CASE("undo rule arithmetic") {
  // s = 5, children 4 and 5: (9 - 5) < (5 - 5) is false.
  CHECK_FALSE(keep_last_merge(4, 5, 5));
  // exact hit: (5 - 5) < (5 - 3)
  CHECK(keep_last_merge(2, 3, 5));
  // equal distance either side is not kept (strict inequality)
  CHECK_FALSE(keep_last_merge(3, 4, 5));
}

TEST_CASE("identify_clusters on {0,1,2,10,11,12}") {
  const Dendrogram d = single(line({0, 1, 2, 10, 11, 12}));
  const auto found = identify_clusters(d, {2, 3, 0});
  REQUIRE(found.nodes.size() == 2);
  CHECK(d.leaves(found.nodes[0]) == Ids{0, 1, 2});
  CHECK(d.leaves(found.nodes[1]) == Ids{3, 4, 5});
  CHECK(found.heights == std::vector<double>{1.0, 1.0});
  CHECK_FALSE(found.undone);
  CHECK(relevance(d, found.heights) == doctest::Approx(0.125));
}

TEST_CASE("k = 1, s = 1 returns the root") {
  Rng rng(3);
  const Dendrogram d = single(oracle::random_points(rng, 30, 2));
  const auto found = identify_clusters(d, {1, 1, 0});
  REQUIRE(found.nodes.size() == 1);
  CHECK(found.nodes[0] == d.root());
  CHECK(found.heights[0] == d.root_height());
}

TEST_CASE("undo rule replaces an oversized merge by its larger child") {
  // Leaves 0..8; {0..3} and {4..8} built, then joined. With s = 5 and k = 1
  // the first size->=5 cluster is {4..8} (size 5, exact hit, kept).
  // With s = 6 the first is the union (9): (9-6) < (6-5) fails -> undo.
  std::vector<Merge> merges{
      {0, 1, 1, 2}, {2, 9, 1, 3}, {3, 10, 1, 4},                 // 11 = {0..3}
      {4, 5, 1, 2}, {6, 12, 1, 3}, {7, 13, 1, 4}, {8, 14, 1, 5},  // 15 = {4..8}
      {11, 15, 3, 9}};
  const Dendrogram d(9, merges);
  REQUIRE(validate_dendrogram(d).ok());
  auto kept = identify_clusters(d, {1, 5, 0});
  CHECK(kept.nodes == Ids{15});
  CHECK_FALSE(kept.undone);
  auto undone = identify_clusters(d, {1, 6, 0});
  CHECK(undone.undone);
  CHECK(undone.nodes == Ids{15});
  CHECK(undone.heights == std::vector<double>{1.0});
}

TEST_CASE("undo tie picks the child created first") {
  // {0,1,2} = 7, {3,4,5} = 9, union at 10 with s = 4: (6-4) < (4-3) fails.
  std::vector<Merge> merges{{0, 1, 1, 2}, {2, 6, 1, 3}, {3, 4, 1, 2}, {5, 8, 1, 3}, {7, 9, 5, 6}};
  const Dendrogram d(6, merges);
  const auto found = identify_clusters(d, {1, 4, 0});
  CHECK(found.undone);
  CHECK(found.nodes == Ids{7});
}

TEST_CASE("fallback to fewer clusters") {
  // Chain: never two clusters of size >= 3 at once.
  const Dendrogram d = single(line({0, 1, 3, 7, 15, 31}));
  const auto found = identify_clusters(d, {2, 3, 0});
  CHECK(found.level == 1);
  REQUIRE(found.nodes.size() == 1);
  CHECK(d.leaves(found.nodes[0]) == Ids{0, 1, 2});
}

TEST_CASE("prune_outliers") {
  SUBCASE("root joins 499 and 1") {
    const Dendrogram d = with_far_singleton();
    const auto pruned = prune_outliers(d, 10);
    CHECK(pruned.points.back() == 499);
    // The chain keeps peeling single points until sizes drop below 10.
    CHECK(pruned.points.size() == 490);
    CHECK(pruned.points.front() == 10);
    CHECK(pruned.stop_node == 500 + 8);
  }
  SUBCASE("c = 0 prunes nothing") {
    const auto pruned = prune_outliers(with_far_singleton(), 0);
    CHECK(pruned.points.empty());
    CHECK(pruned.stop_height == 1000.0);
  }
  SUBCASE("{0,1,2,10,11,12,100} with c = 2") {
    const Dendrogram d = single(line({0, 1, 2, 10, 11, 12, 100}));
    const auto pruned = prune_outliers(d, 2);
    CHECK(pruned.points == Ids{6});
    CHECK(pruned.stop_height == 8.0);
  }
  SUBCASE("c >= n is rejected") {
    const Dendrogram d = single(line({0, 1, 2}));
    CHECK_THROWS_AS(prune_outliers(d, 3), ValidationError);
  }
}

TEST_CASE("relevance") {
  const Dendrogram d = single(line({0, 1, 2, 10, 11, 12}));
  CHECK(relevance(d, {d.root_height()}) == 1.0);
  CHECK(relevance(d, {0.4 * 8.0, 0.6 * 8.0}) == doctest::Approx(0.5));
  const Dendrogram flat = single(line({3, 3, 3}));
  CHECK(relevance(flat, {0.0}) == 0.0);
  CHECK_THROWS_AS(relevance(d, {}), ValidationError);
}

TEST_CASE("relevance is invariant under uniform scaling") {
  Rng rng(21);
  const PointSet ps = oracle::random_points(rng, 80, 2);
  std::vector<double> scaled = ps.data();
  for (double& v : scaled) v *= 37.5;
  const PointSet big(80, 2, scaled);
  for (LinkageMethod m : kAllMethods) {
    const CutParams p{2, 24, 2};
    const auto a = cut(linkage(pairwise_distances(ps), m), p);
    const auto b = cut(linkage(pairwise_distances(big), m), p);
    CHECK(a.relevance == doctest::Approx(b.relevance).epsilon(1e-9));
    CHECK(a.clusters == b.clusters);
  }
}

TEST_CASE("cut") {
  SUBCASE("trivial parameters") {
    Rng rng(8);
    const Dendrogram d = single(oracle::random_points(rng, 25, 3));
    const auto r = cut(d, {1, 1, 0});
    CHECK(r.n_pred == 1);
    REQUIRE(r.clusters.size() == 1);
    CHECK(r.clusters[0].size() == 25);
    CHECK(r.relevance == 1.0);
    CHECK(r.outliers.empty());
  }
  SUBCASE("{0,1,2,10,11,12,100}, k=2 s=3 c=2") {
    const PointSet ps = line({0, 1, 2, 10, 11, 12, 100});
    const auto r = cut(single(ps), {2, 3, 2});
    CHECK(r.n_pred == 2);
    CHECK(r.clusters == std::vector<Ids>{{0, 1, 2}, {3, 4, 5}});
    CHECK(r.outliers == Ids{6});
    const auto labels = region_labels(ps, r);
    CHECK(labels[0] == RegionLabel{Region::Nucleus, 0});
    CHECK(labels[4] == RegionLabel{Region::Nucleus, 1});
    CHECK(labels[6].region == Region::Periphery);
    CHECK(std::none_of(labels.begin(), labels.end(),
                       [](const RegionLabel& l) { return l.region == Region::Transition; }));
  }
  SUBCASE("well separated bimodal sample") {
    DistributionSpec spec;
    spec.family = Family::Gaussian;
    spec.modality = Modality::Bimodal;
    spec.alpha = 40.0;
    spec.n = 200;
    spec.seed = 99;
    const Sample s = make_bimodal(spec);
    for (LinkageMethod m : kAllMethods) {
      CAPTURE(to_string(m));
      const auto r = cut(linkage(pairwise_distances(s.points), m), CutParams::from_fractions(200, 2, 0.3, 0.02));
      CHECK(r.n_pred == 2);
      for (const auto& c : r.clusters) {
        std::set<int> modes;
        for (std::size_t p : c) modes.insert(s.mode[p]);
        CHECK(modes.size() == 1);
      }
    }
  }
  SUBCASE("parameter validation") {
    const Dendrogram d = single(line({0, 1, 2, 3}));
    CHECK_THROWS_AS(cut(d, {0, 1, 0}), ValidationError);
    CHECK_THROWS_AS(cut(d, {1, 5, 0}), ValidationError);
    CHECK_THROWS_AS(cut(d, {1, 1, 2}), ValidationError);
  }
}

TEST_CASE("region labels on a gaussian sample with k = 1") {
  DistributionSpec spec;
  spec.family = Family::Gaussian;
  spec.n = 500;
  spec.seed = 4;
  const PointSet ps = sample_unimodal(spec);
  const auto r = cut(single(ps), CutParams::from_fractions(500, 1, 0.3, 0.02));
  const auto labels = region_labels(ps, r);
  std::size_t nucleus = 0, transition = 0, periphery = 0;
  for (const auto& l : labels) {
    nucleus += l.region == Region::Nucleus;
    transition += l.region == Region::Transition;
    periphery += l.region == Region::Periphery;
  }
  CHECK(nucleus + transition + periphery == 500);
  CHECK(nucleus >= 75);
  CHECK(transition > 0);
  CHECK(periphery > 0);
}

TEST_CASE("cut invariants over random data") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 20 + static_cast<std::size_t>(rng.uniform() * 80);
    const PointSet ps = oracle::random_points(rng, n, 2);
    const auto dist = pairwise_distances(ps);
    const CutParams p{1 + static_cast<std::size_t>(rng.uniform() * 3), 1 + static_cast<std::size_t>(rng.uniform() * n / 2),
                      static_cast<std::size_t>(rng.uniform() * (n / 2 - 1))};
    for (LinkageMethod m : kAllMethods) {
      const Dendrogram d = linkage(dist, m);
      const auto found = identify_clusters(d, p);
      const auto r = cut(d, p);
      CHECK(r.n_pred >= 1);
      CHECK(r.n_pred <= p.k);
      CHECK(r.relevance >= 0.0);
      CHECK(r.relevance <= 1.0);
      std::vector<int> seen(n, 0);
      for (const auto& c : r.clusters) {
        CHECK(!c.empty());
        for (std::size_t x : c) ++seen[x];
      }
      for (std::size_t x : r.outliers) ++seen[x];
      CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v <= 1; }));
      // Pruning does not depend on the identification pass.
      CHECK(prune_outliers(d, p.c).points == r.outliers);
      // Identified clusters are subtrees.
      for (std::size_t node : found.nodes) CHECK(node < d.node_count());
    }
  }
}

TEST_CASE("cut result JSON") {
  const auto r = cut(single(line({0, 1, 2, 10, 11, 12, 100})), {2, 3, 2});
  const auto back = cut_result_from_json(cut_result_to_json(r));
  CHECK(back.clusters == r.clusters);
  CHECK(back.outliers == r.outliers);
  CHECK(back.n_pred == 2);
  CHECK(back.relevance == r.relevance);
}
