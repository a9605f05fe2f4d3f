#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "agglo/bench.hpp"
#include "agglo/errors.hpp"
#include "agglo/svg.hpp"

using namespace agglo;
namespace fs = std::filesystem;

namespace {

ReplicateRecord rec(std::size_t n_pred, double relevance) {
  ReplicateRecord r;
  r.n_pred = n_pred;
  r.relevance = relevance;
  return r;
}

RunConfig small_config() {
  RunConfig c;
  c.seed = 5;
  c.replicates = 2;
  c.n = 60;
  c.methods = {LinkageMethod::Single, LinkageMethod::Ward};
  c.workers = 1;
  return c;
}

std::string records_text(const BenchResult& r) {
  std::ostringstream out;
  write_records_csv(out, r.records);
  write_features_csv(out, r.records, FeatureVariant::RawCurve, r.config.curve_samples);
  write_features_csv(out, r.records, FeatureVariant::PolyFit, r.config.curve_samples);
  return out.str();
}

// Crude well-formedness check: every opened element is closed in order.
bool tags_balanced(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    const std::size_t end = xml.find('>', pos);
    if (end == std::string::npos) return false;
    std::string tag = xml.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag.back() == '/') continue;
    if (tag[0] == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
      continue;
    }
    stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
  }
  return stack.empty();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("agglo_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("relevance vector accumulation") {
  const std::vector<ReplicateRecord> triple{rec(2, 0.89), rec(2, 0.91), rec(1, 0.6)};
  const auto v = accumulate(triple);
  CHECK(v.r1 == doctest::Approx(0.6));
  CHECK(v.r2 == doctest::Approx(1.80));
  CHECK(v.count1 == 1);
  CHECK(v.count2 == 2);

  const auto empty = accumulate(std::vector<ReplicateRecord>{});
  CHECK(empty.r1 == 0.0);
  CHECK(empty.r2 == 0.0);
  CHECK(empty.total() == 0);

  const std::vector<ReplicateRecord> ideal(7, rec(1, 1.0));
  const auto w = accumulate(ideal);
  CHECK(w.r1 == 7.0);
  CHECK(w.r2 == 0.0);

  const std::vector<ReplicateRecord> mixed{rec(3, 0.5), rec(0, 0.0), rec(1, 0.2)};
  CHECK(accumulate(mixed).other == 2);
  CHECK(accumulate(mixed).total() == 3);
}

TEST_CASE("accumulated error") {
  CHECK(accumulated_error({5, 0, 5, 0, 0}, 5, Modality::Unimodal) == 0.0);
  CHECK(accumulated_error({0, 5, 0, 5, 0}, 5, Modality::Unimodal) == doctest::Approx(std::sqrt(2.0)));
  CHECK(accumulated_error({0, 9, 0, 10, 0}, 10, Modality::Bimodal) == doctest::Approx(0.1));
  CHECK_THROWS_AS(accumulated_error({}, 0, Modality::Bimodal), ValidationError);
  // Moving the mean vector toward the ideal never increases l.
  double prev = 10.0;
  for (int i = 0; i <= 10; ++i) {
    const double l = accumulated_error({static_cast<double>(i), 10.0 - i, 0, 0, 0}, 10, Modality::Unimodal);
    CHECK(l <= prev);
    CHECK(l >= 0.0);
    CHECK(l <= std::sqrt(2.0) + 1e-12);
    prev = l;
  }
}

TEST_CASE("run_cell") {
  RunConfig c = small_config();
  c.replicates = 1;
  for (LinkageMethod m : kAllMethods) {
    const auto one = run_cell(c, Family::Gaussian, 2, Modality::Bimodal, m);
    REQUIRE(one.size() == 1);
    CHECK(one[0].ok());
    CHECK((one[0].n_pred == 1 || one[0].n_pred == 2));
    CHECK(one[0].raw_features.size() == 104);
    CHECK(one[0].poly_features.size() == 8);
    if (one[0].n_pred == 1) CHECK(one[0].r2 == 0.0);
    if (one[0].n_pred == 2) CHECK(one[0].r1 == 0.0);
  }
  c.replicates = 3;
  const auto a = run_cell(c, Family::Power, 2, Modality::Unimodal, LinkageMethod::Average);
  const auto b = run_cell(c, Family::Power, 2, Modality::Unimodal, LinkageMethod::Average);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].seed == b[i].seed);
    CHECK(a[i].relevance == b[i].relevance);
    CHECK(a[i].raw_features == b[i].raw_features);
  }
  CHECK(a[0].seed != a[1].seed);
}

TEST_CASE("all methods see the same dataset") {
  RunConfig c = small_config();
  const std::vector<LinkageMethod> methods{LinkageMethod::Single, LinkageMethod::Complete};
  const auto recs = run_replicate(c, Family::Uniform, 2, Modality::Unimodal, methods, 0);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].seed == recs[1].seed);
  const auto alone = run_cell(c, Family::Uniform, 2, Modality::Unimodal, LinkageMethod::Complete);
  CHECK(alone[0].relevance == recs[1].relevance);
}

TEST_CASE("bench determinism across worker counts") {
  RunConfig c = small_config();
  const auto serial = run_bench(c);
  c.workers = 3;
  const auto threaded = run_bench(c);
  CHECK(serial.failures() == 0);
  CHECK(records_text(serial) == records_text(threaded));
  // 4 families x 2 modalities x 1 dim x 2 methods x 2 replicates
  CHECK(serial.records.size() == 32);
}

TEST_CASE("summarize") {
  const auto result = run_bench(small_config());
  const Report& rep = result.report;
  CHECK(rep.cells.size() == 16);
  for (const auto& cell : rep.cells) {
    CHECK(cell.vec.total() == cell.replicates);
    CHECK(cell.replicates == 2);
    CHECK(cell.frac1 + cell.frac2 <= 1.0 + 1e-12);
    CHECK(cell.l == doctest::Approx(accumulated_error(cell.vec, cell.replicates, cell.cell.modality)));
  }
  const auto* agg = rep.find(LinkageMethod::Ward, Modality::Unimodal, 2);
  REQUIRE(agg != nullptr);
  CHECK(agg->datasets == 8);
  CHECK(rep.find(LinkageMethod::Median, Modality::Unimodal, 2) == nullptr);

  std::vector<ReplicateRecord> twos;
  for (int i = 0; i < 4; ++i) {
    auto r = rec(2, 0.7);
    r.r2 = 0.7;
    r.cell = {Family::Gaussian, 2, Modality::Bimodal, LinkageMethod::Ward};
    r.replicate = static_cast<std::size_t>(i);
    twos.push_back(r);
  }
  const Report all2 = summarize(twos);
  REQUIRE(all2.cells.size() == 1);
  CHECK(all2.cells[0].frac2 == 1.0);
  CHECK(all2.cells[0].frac1 == 0.0);
  CHECK(all2.cells[0].mean_r2 == doctest::Approx(0.7));

  std::ostringstream csv;
  write_records_csv(csv, twos);
  CHECK(csv.str().rfind("family,dim,modality,method,replicate,seed,n_pred,relevance,r1,r2\n", 0) == 0);
}

TEST_CASE("run config JSON") {
  const RunConfig c = run_config_from_json(R"({"seed": 9, "replicates": 4, "methods": ["WAR"], "dims": [2, 4]})");
  CHECK(c.seed == 9);
  CHECK(c.replicates == 4);
  CHECK(c.methods == std::vector<LinkageMethod>{LinkageMethod::Ward});
  CHECK(c.dims == std::vector<std::size_t>{2, 4});
  const RunConfig back = run_config_from_json(run_config_to_json(c));
  CHECK(run_config_to_json(back) == run_config_to_json(c));
  CHECK_THROWS_AS(run_config_from_json(R"({"replicates": 2, "bogus": 1})"), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(R"({"replicates": 0})"), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(R"({"n": 61})"), ValidationError);
  CHECK_THROWS_AS(run_config_from_json("[1, 2"), ValidationError);
  CHECK(c.cut_params().s == 150);
  CHECK(c.cut_params().c == 10);
}

TEST_CASE("bench outputs") {
  const auto result = run_bench(small_config());
  const fs::path dir = scratch_dir("bench_outputs");
  write_bench_outputs(result, dir.string());
  for (const char* f : {"records.csv", "summary.csv", "aggregates.csv", "summary.json", "config.json",
                        "features_raw_curve.csv", "features_polyfit.csv"}) {
    CHECK(fs::exists(dir / f));
  }
  CHECK_FALSE(fs::exists(dir / "errors.csv"));
  std::ifstream in(dir / "features_polyfit.csv");
  const auto back = read_features_csv(in, FeatureVariant::PolyFit);
  REQUIRE(back.size() == result.records.size());
  CHECK(back[3].poly_features == result.records[3].poly_features);
  CHECK(back[3].cell == result.records[3].cell);
  fs::remove_all(dir);
}

TEST_CASE("pca study") {
  RunConfig c = small_config();
  c.replicates = 4;
  c.methods = {LinkageMethod::Single};
  const auto result = run_bench(c);
  PcaStudyRequest req;
  req.dims = {2};
  const auto proj = run_pca_study(result.records, req);
  REQUIRE(proj.size() == 1);
  CHECK(proj[0].coords.rows() == 32);
  CHECK(proj[0].coords.cols() == 2);
  CHECK(proj[0].labels.size() == 32);
  CHECK(proj[0].centroids.size() == 8);
  CHECK(proj[0].top2() <= 1.0 + 1e-12);
  CHECK(proj[0].centroid("uniform_bimodal") != nullptr);
  std::ostringstream csv;
  write_projection_csv(csv, proj[0]);
  CHECK(csv.str().rfind("x,y,family\n", 0) == 0);

  req.dims = {3};
  try {
    run_pca_study(result.records, req);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("D=3") != std::string::npos);
  }
  req.dims = {2};
  req.method = LinkageMethod::Ward;
  CHECK_THROWS_AS(run_pca_study(result.records, req), ValidationError);

  req.method = LinkageMethod::Single;
  req.distributions = {{Family::Gaussian, Modality::Unimodal}};
  const auto one = run_pca_study(result.records, req);
  REQUIRE(one.size() == 1);
  CHECK(one[0].coords.rows() == 4);
  CHECK(one[0].centroids.size() == 1);
}

TEST_CASE("cluster_csv") {
  const fs::path dir = scratch_dir("cluster_csv");
  const fs::path input = dir / "pts.csv";
  {
    std::ofstream out(input);
    out << "0,0\n1,0\n2,0\n10,0\n11,0\n12,0\n100,0\n";
  }
  const auto outcome = cluster_csv(input.string(), LinkageMethod::Single, {2, 3, 2}, (dir / "out").string());
  CHECK(outcome.cut.n_pred == 2);
  CHECK(outcome.cut.outliers == std::vector<std::size_t>{6});
  const std::string labels = slurp(dir / "out" / "labels.csv");
  CHECK(labels == "point,label\n0,cluster0\n1,cluster0\n2,cluster0\n3,cluster1\n4,cluster1\n5,cluster1\n6,outlier\n");
  for (const char* svg : {"scatter.svg", "dendrogram.svg"}) {
    const std::string text = slurp(dir / "out" / svg);
    CAPTURE(svg);
    CHECK(text.find("<svg") != std::string::npos);
    CHECK(tags_balanced(text));
  }
  CHECK(fs::exists(dir / "out" / "cut.json"));

  const fs::path empty = dir / "empty.csv";
  std::ofstream(empty).close();
  try {
    cluster_csv(empty.string(), LinkageMethod::Single, {2, 1, 0}, (dir / "out2").string());
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("empty.csv") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("svg helpers produce balanced markup") {
  std::vector<svg::Point2> pts{{0, 0}, {1, 1}, {2, 0.5}};
  CHECK(tags_balanced(svg::scatter(pts, {"a", "b", "a"}, "t & <x>")));
  CHECK(svg::escape("a<b&\"") == "a&lt;b&amp;&quot;");
  std::vector<std::vector<double>> cloud;
  for (int i = 0; i < 200; ++i) cloud.push_back({std::cos(i * 0.1) * (i % 7), std::sin(i * 0.1) * (i % 5)});
  CHECK(tags_balanced(svg::contour(PointSet::from_rows(cloud), 20, 4, "c")));
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS(parallel_for(10, 2, [](std::size_t i) {
    if (i == 7) throw std::runtime_error("boom");
  }));
}
