#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "agglo/datagen.hpp"
#include "agglo/dendro_analysis.hpp"
#include "agglo/features.hpp"
#include "agglo/linkage.hpp"
#include "agglo/pca.hpp"

namespace agglo {

struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t replicates = 50;
  std::size_t n = 500;
  std::vector<std::size_t> dims{2};
  std::vector<Family> families{std::begin(kAllFamilies), std::end(kAllFamilies)};
  std::vector<Modality> modalities{std::begin(kAllModalities), std::end(kAllModalities)};
  std::vector<LinkageMethod> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::size_t k = 2;
  double s_fraction = 0.3;
  double p_fraction = 0.02;
  double alpha = 4.0;
  Translation translation = Translation::AllAxes;
  FeatureVariant feature_variant = FeatureVariant::RawCurve;
  std::size_t curve_samples = kDefaultCurveSamples;
  LinkageMethod pca_method = LinkageMethod::Single;
  std::string output_dir;
  // 0: take AGGLO_WORKERS from the environment, else 1.
  std::size_t workers = 0;

  void validate() const;
  CutParams cut_params() const;
  std::size_t effective_workers() const;
};

// Unknown keys are rejected.
RunConfig run_config_from_json(std::string_view text);
std::string run_config_to_json(const RunConfig& config);

struct CellKey {
  Family family = Family::Uniform;
  std::size_t dim = 2;
  Modality modality = Modality::Unimodal;
  LinkageMethod method = LinkageMethod::Single;

  bool operator==(const CellKey&) const = default;
};

std::string distribution_label(Family family, Modality modality);

struct ReplicateRecord {
  CellKey cell;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::size_t n_pred = 0;  // 0 when the replicate failed
  double relevance = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  std::vector<double> raw_features;
  std::vector<double> poly_features;
  std::string error;

  bool ok() const { return error.empty(); }
};

// Runs one replicate of every method in `methods` on the same dataset.
std::vector<ReplicateRecord> run_replicate(const RunConfig& config, Family family, std::size_t dim,
                                           Modality modality, std::span<const LinkageMethod> methods,
                                           std::size_t replicate);

std::vector<ReplicateRecord> run_cell(const RunConfig& config, Family family, std::size_t dim,
                                      Modality modality, LinkageMethod method);

struct RelevanceVector {
  double r1 = 0.0;
  double r2 = 0.0;
  std::size_t count1 = 0;
  std::size_t count2 = 0;
  std::size_t other = 0;

  std::size_t total() const { return count1 + count2 + other; }
};

// n_pred = 1 contributes (r, 0), n_pred = 2 contributes (0, r); anything
// else is counted under `other`.
RelevanceVector accumulate(std::span<const ReplicateRecord> records);

// Distance of (r1, r2) / M from (1, 0) for unimodal cells, (0, 1) for bimodal.
double accumulated_error(const RelevanceVector& v, std::size_t replicates, Modality modality);

struct CellSummary {
  CellKey cell;
  std::size_t replicates = 0;
  std::size_t failures = 0;
  RelevanceVector vec;
  double frac1 = 0.0;
  double frac2 = 0.0;
  double mean_r1 = 0.0;
  double mean_r2 = 0.0;
  double mean_relevance = 0.0;
  double l = 0.0;
};

// Pooled over every family of one (method, modality, dim).
struct MethodAggregate {
  LinkageMethod method = LinkageMethod::Single;
  Modality modality = Modality::Unimodal;
  std::size_t dim = 2;
  std::size_t datasets = 0;
  double frac1 = 0.0;
  double frac2 = 0.0;
  double mean_l = 0.0;
};

struct Report {
  std::vector<CellSummary> cells;
  std::vector<MethodAggregate> aggregates;

  const CellSummary* find(const CellKey& key) const;
  const MethodAggregate* find(LinkageMethod method, Modality modality, std::size_t dim) const;
};

Report summarize(std::span<const ReplicateRecord> records);

struct BenchResult {
  RunConfig config;
  std::vector<ReplicateRecord> records;  // grouped by cell (family, dim, modality, method), then replicate
  Report report;
  std::size_t failures() const;
};

BenchResult run_bench(const RunConfig& config);

void write_records_csv(std::ostream& out, std::span<const ReplicateRecord> records);
void write_summary_csv(std::ostream& out, const Report& report);
void write_aggregates_csv(std::ostream& out, const Report& report);
std::string report_to_json(const Report& report);
void write_features_csv(std::ostream& out, std::span<const ReplicateRecord> records, FeatureVariant variant,
                        std::size_t samples);

// Writes records.csv, summary.csv, aggregates.csv, summary.json,
// features_<variant>.csv and (if failures occurred) errors.csv into dir.
void write_bench_outputs(const BenchResult& result, const std::string& dir);

// Records read back from the features CSV, enough for a PCA study.
std::vector<ReplicateRecord> read_features_csv(std::istream& in, FeatureVariant variant);

struct PcaStudyRequest {
  std::vector<std::size_t> dims;
  std::vector<std::pair<Family, Modality>> distributions;  // empty: all eight
  FeatureVariant variant = FeatureVariant::RawCurve;
  LinkageMethod method = LinkageMethod::Single;
  PcaScaling scaling = PcaScaling::Center;
};

struct PcaProjection {
  std::size_t dim = 0;
  Eigen::MatrixXd coords;           // rows x 2
  std::vector<std::string> labels;  // distribution label per row
  std::vector<double> explained;    // ratios of the two leading axes
  std::vector<std::pair<std::string, Eigen::Vector2d>> centroids;

  double top2() const;
  const Eigen::Vector2d* centroid(const std::string& label) const;
};

std::vector<PcaProjection> run_pca_study(std::span<const ReplicateRecord> records, const PcaStudyRequest& request);

void write_projection_csv(std::ostream& out, const PcaProjection& p);

struct ClusterOutcome {
  PointSet points;
  Dendrogram dendrogram;
  CutResult cut;
  RegionLabels labels;
  std::vector<std::string> written;
};

// Full pipeline on a user CSV. Writes cut.json and labels.csv into out_dir,
// plus scatter.svg and dendrogram.svg for 2-D input.
ClusterOutcome cluster_csv(const std::string& path, LinkageMethod method, const CutParams& params,
                           const std::string& out_dir);

// Runs fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace agglo
