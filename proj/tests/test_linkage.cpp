#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "agglo/errors.hpp"
#include "agglo/linkage.hpp"
#include "oracles.hpp"

using namespace agglo;

namespace {

PointSet line(std::initializer_list<double> xs) {
  std::vector<std::vector<double>> rows;
  for (double x : xs) rows.push_back({x});
  return PointSet::from_rows(rows);
}

PointSet equilateral(double side) {
  return PointSet::from_rows({{0.0, 0.0}, {side, 0.0}, {side / 2.0, side * std::sqrt(3.0) / 2.0}});
}

void check_against_naive(const PointSet& ps, LinkageMethod method, LinkageStrategy strategy) {
  const auto ref = oracle::naive_linkage(oracle::rows_of(ps), method);
  const Dendrogram d = linkage(pairwise_distances(ps), method, strategy);
  REQUIRE(d.merges().size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const Merge& m = d.merges()[i];
    CHECK(m.left == ref[i].lo);
    CHECK(m.right == ref[i].hi);
    CHECK(std::abs(m.height - ref[i].height) < 1e-9);
    CHECK(m.size == ref[i].size);
  }
}

}  // namespace

TEST_CASE("pairwise distances") {
  SUBCASE("identical points") {
    const auto d = pairwise_distances(PointSet::from_rows({{1.5, -2.0}, {1.5, -2.0}}));
    CHECK(d(0, 1) == 0.0);
  }
  SUBCASE("3-4-5 triangle") {
    const auto d = pairwise_distances(PointSet::from_rows({{0.0, 0.0}, {3.0, 4.0}}));
    CHECK(d(0, 1) == 5.0);
  }
  SUBCASE("matches an element-wise loop") {
    Rng rng(11);
    const PointSet ps = oracle::random_points(rng, 5, 3);
    const auto rows = oracle::rows_of(ps);
    const auto d = pairwise_distances(ps);
    REQUIRE(d.values().size() == 10);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j) CHECK(std::abs(d(i, j) - oracle::euclid(rows[i], rows[j])) < 1e-12);
  }
  SUBCASE("condensed order is row-major upper triangle") {
    CHECK(CondensedDistances::index(4, 0, 1) == 0);
    CHECK(CondensedDistances::index(4, 0, 3) == 2);
    CHECK(CondensedDistances::index(4, 1, 2) == 3);
    CHECK(CondensedDistances::index(4, 3, 2) == 5);
  }
  SUBCASE("non-finite coordinates are rejected") {
    CHECK_THROWS_AS(PointSet(2, 1, {0.0, std::nan("")}), ValidationError);
    CHECK_THROWS_AS(PointSet(2, 1, {0.0, INFINITY}), ValidationError);
    CHECK_THROWS_AS(PointSet(1, 1, {0.0}), ValidationError);
  }
}

TEST_CASE("linkage on 1-D {0, 1, 3}") {
  const auto dist = pairwise_distances(line({0, 1, 3}));
  SUBCASE("single") {
    const Dendrogram d = linkage(dist, LinkageMethod::Single);
    REQUIRE(d.merges().size() == 2);
    CHECK(d.merges()[0] == Merge{0, 1, 1.0, 2});
    CHECK(d.merges()[1] == Merge{2, 3, 2.0, 3});
  }
  SUBCASE("complete") {
    const Dendrogram d = linkage(dist, LinkageMethod::Complete);
    CHECK(d.merges()[0] == Merge{0, 1, 1.0, 2});
    CHECK(d.merges()[1] == Merge{2, 3, 3.0, 3});
  }
  SUBCASE("mst heights") {
    CHECK(oracle::sorted_heights(linkage_single_mst(dist)) == std::vector<double>{1.0, 2.0});
  }
}

TEST_CASE("equilateral triangle, side 2") {
  const auto dist = pairwise_distances(equilateral(2.0));
  SUBCASE("ward keeps the third vertex at distance 2") {
    const Dendrogram d = linkage(dist, LinkageMethod::Ward);
    CHECK(d.merges()[0].height == doctest::Approx(2.0));
    // sqrt((2/3)*4 + (2/3)*4 - (1/3)*4)
    CHECK(d.merges()[1].height == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("centroid gives sqrt(3): an inversion") {
    const Dendrogram d = linkage(dist, LinkageMethod::Centroid);
    CHECK(d.merges()[0].height == doctest::Approx(2.0));
    CHECK(d.merges()[1].height == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(d.merges()[1].height < d.merges()[0].height);
  }
  SUBCASE("median agrees with centroid for a pair of singletons") {
    const Dendrogram d = linkage(dist, LinkageMethod::Median);
    CHECK(d.merges()[1].height == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  }
}

TEST_CASE("n = 2 yields one merge at the inter-point distance") {
  const auto dist = pairwise_distances(PointSet::from_rows({{0.0, 0.0}, {3.0, 4.0}}));
  for (LinkageMethod m : kAllMethods) {
    const Dendrogram d = linkage(dist, m);
    REQUIRE(d.merges().size() == 1);
    CHECK(d.merges()[0] == Merge{0, 1, 5.0, 2});
  }
  CHECK(linkage_single_mst(dist).merges()[0].height == 5.0);
}

TEST_CASE("every method and strategy matches the naive reference for n <= 8") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7);
    const std::size_t dim = 1 + static_cast<std::size_t>(rng.uniform() * 3);
    const PointSet ps = oracle::random_points(rng, n, dim);
    for (LinkageMethod m : kAllMethods) {
      CAPTURE(to_string(m));
      CAPTURE(n);
      check_against_naive(ps, m, LinkageStrategy::Automatic);
      check_against_naive(ps, m, LinkageStrategy::Generic);
    }
  }
}

TEST_CASE("generic strategy follows the tie-break on duplicate points") {
  // Three copies of one point plus one copy of another.
  const PointSet ps = PointSet::from_rows({{0, 0}, {1, 1}, {0, 0}, {0, 0}, {1, 1}});
  for (LinkageMethod m : kAllMethods) {
    CAPTURE(to_string(m));
    check_against_naive(ps, m, LinkageStrategy::Generic);
    const Dendrogram d = linkage(pairwise_distances(ps), m);
    CHECK(validate_dendrogram(d).ok());
    CHECK(d.merges()[0].height == 0.0);
    CHECK(d.merges()[1].height == 0.0);
    CHECK(d.merges()[2].height == 0.0);
  }
  const Dendrogram sin = linkage(pairwise_distances(ps), LinkageMethod::Single);
  CHECK(sin.merges()[0] == Merge{0, 2, 0.0, 2});
}

TEST_CASE("single linkage heights equal MST weights (n up to 200)") {
  Rng rng(77);
  for (std::size_t n : {3, 10, 57, 200}) {
    const PointSet ps = oracle::random_points(rng, n, 2);
    const auto dist = pairwise_distances(ps);
    const auto expected = oracle::prim_mst_weights(oracle::rows_of(ps));
    const auto mst = oracle::sorted_heights(linkage_single_mst(dist));
    const auto generic = oracle::sorted_heights(linkage(dist, LinkageMethod::Single, LinkageStrategy::Generic));
    REQUIRE(mst.size() == expected.size());
    for (std::size_t i = 0; i < mst.size(); ++i) {
      CHECK(std::abs(mst[i] - expected[i]) < 1e-9);
      CHECK(std::abs(generic[i] - expected[i]) < 1e-9);
    }
  }
}

TEST_CASE("monotone methods never invert; heights are non-negative everywhere") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const PointSet ps = oracle::random_points(rng, 60, 3);
    const auto dist = pairwise_distances(ps);
    for (LinkageMethod m : kAllMethods) {
      const Dendrogram d = linkage(dist, m);
      CHECK(validate_dendrogram(d).ok());
      for (std::size_t i = 0; i < d.merges().size(); ++i) {
        CHECK(d.merges()[i].height >= 0.0);
        if (is_monotone(m) && i > 0) CHECK(d.merges()[i].height >= d.merges()[i - 1].height);
      }
    }
  }
}

TEST_CASE("permuting the input keeps the merge height multiset") {
  Rng rng(9);
  const PointSet ps = oracle::random_points(rng, 40, 2);
  std::vector<std::size_t> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = 39; i > 0; --i) std::swap(perm[i], perm[static_cast<std::size_t>(rng.uniform() * (i + 1))]);
  std::vector<std::vector<double>> rows;
  for (std::size_t p : perm) rows.emplace_back(ps[p].begin(), ps[p].end());
  const PointSet shuffled = PointSet::from_rows(rows);
  for (LinkageMethod m : kAllMethods) {
    const auto a = oracle::sorted_heights(linkage(pairwise_distances(ps), m));
    const auto b = oracle::sorted_heights(linkage(pairwise_distances(shuffled), m));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-9);
  }
}

TEST_CASE("flat clusters") {
  const Dendrogram d = linkage(pairwise_distances(line({0, 1, 2, 10, 11, 12})), LinkageMethod::Single);
  CHECK(flat_clusters(d, 1.0) == std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
  CHECK(flat_clusters(d, 0.5) == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  CHECK(flat_clusters(d, 8.0) == std::vector<std::size_t>{0, 0, 0, 0, 0, 0});
}

TEST_CASE("validate_dendrogram") {
  const Dendrogram good = linkage(pairwise_distances(line({0, 1, 3, 7})), LinkageMethod::Average);
  CHECK(validate_dendrogram(good).ok());

  SUBCASE("size fault") {
    auto merges = good.merges();
    merges[1].size += 1;
    const auto report = validate_dendrogram(Dendrogram(4, merges));
    REQUIRE(report.has(Violation::Kind::SizeMismatch));
    CHECK(report.violations.front().merge_index == 1);
  }
  SUBCASE("double parent") {
    auto merges = good.merges();
    merges[2].left = merges[0].left;
    CHECK(validate_dendrogram(Dendrogram(4, merges)).has(Violation::Kind::DoubleParent));
  }
  SUBCASE("forward reference and unknown child") {
    auto merges = good.merges();
    merges[0].right = 5;
    CHECK(validate_dendrogram(Dendrogram(4, merges)).has(Violation::Kind::ForwardReference));
    merges[0].right = 42;
    CHECK(validate_dendrogram(Dendrogram(4, merges)).has(Violation::Kind::UnknownChild));
  }
  SUBCASE("wrong merge count") {
    auto merges = good.merges();
    merges.pop_back();
    const auto report = validate_dendrogram(Dendrogram(4, merges));
    CHECK(report.has(Violation::Kind::MergeCount));
    CHECK(report.has(Violation::Kind::RootSize));
  }
}

TEST_CASE("dendrogram JSON") {
  const Dendrogram d = linkage(pairwise_distances(line({0, 1, 3, 7.25})), LinkageMethod::Ward);
  const std::string text = dendrogram_to_json(d);
  CHECK(text.find("\"n\":4") != std::string::npos);
  const Dendrogram back = dendrogram_from_json(text);
  CHECK(back.point_count() == 4);
  CHECK(back.merges() == d.merges());
  CHECK_THROWS_AS(dendrogram_from_json("{\"n\":3,\"merges\":[[0,1,1.0,2]]}"), ValidationError);
  CHECK_THROWS_AS(dendrogram_from_json("not json"), ValidationError);
}

TEST_CASE("method names") {
  for (LinkageMethod m : kAllMethods) CHECK(parse_linkage_method(to_string(m)) == m);
  CHECK(parse_linkage_method("ward") == LinkageMethod::Ward);
  CHECK_THROWS_AS(parse_linkage_method("wpgma"), ValidationError);
}
