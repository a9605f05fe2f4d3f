// Command-line front end: dataset generation, linkage, cuts, the synthetic
// benchmark protocol, the feature PCA study and SVG plotting.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "agglo/bench.hpp"
#include "agglo/datagen.hpp"
#include "agglo/dendro_analysis.hpp"
#include "agglo/errors.hpp"
#include "agglo/linkage.hpp"
#include "agglo/svg.hpp"

namespace fs = std::filesystem;
using namespace agglo;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

// Rows of a headed CSV as column-name -> value maps.
std::vector<std::map<std::string, std::string>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  const auto header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ValidationError(path + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(header.size()));
    }
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < header.size(); ++i) m[header[i]] = cells[i];
    rows.push_back(std::move(m));
  }
  return rows;
}

const std::string& column(const std::map<std::string, std::string>& row, const std::string& key,
                          const std::string& path) {
  const auto it = row.find(key);
  if (it == row.end()) throw ValidationError(path + ": missing column '" + key + "'");
  return it->second;
}

std::vector<std::string> plot_summary(const std::string& path, const fs::path& out_dir) {
  const auto rows = read_table(path);
  // (modality, dim) -> family -> method -> (mean_r1, mean_r2, l)
  struct Entry {
    std::string method;
    double r1, r2, l;
  };
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<Entry>>> groups;
  for (const auto& row : rows) {
    groups[{column(row, "modality", path), column(row, "dim", path)}][column(row, "family", path)].push_back(
        {column(row, "method", path), std::stod(column(row, "mean_r1", path)),
         std::stod(column(row, "mean_r2", path)), std::stod(column(row, "l", path))});
  }
  std::vector<std::string> written;
  for (const auto& [key, families] : groups) {
    const auto& [modality, dim] = key;
    const svg::Point2 ideal = modality == "unimodal" ? svg::Point2{1.0, 0.0} : svg::Point2{0.0, 1.0};
    std::vector<std::string> categories;
    std::map<std::string, std::vector<double>> by_method;
    for (const auto& [family, entries] : families) {
      std::vector<svg::Arrow> arrows;
      for (const auto& e : entries) {
        arrows.push_back({e.method, {e.r1, e.r2}});
        by_method[e.method].push_back(e.l);
      }
      categories.push_back(family);
      const fs::path file = out_dir / ("vectors_" + modality + "_" + family + "_D" + dim + ".svg");
      spit(file, svg::vector_plot(arrows, ideal, family + " " + modality + ", D=" + dim));
      written.push_back(file.string());
    }
    std::vector<svg::Series> series;
    for (const auto& [method, values] : by_method) series.push_back({method, values});
    const fs::path file = out_dir / ("error_" + modality + "_D" + dim + ".svg");
    spit(file, svg::line_chart(categories, series, "accumulated error, " + modality + ", D=" + dim, "l"));
    written.push_back(file.string());
  }
  return written;
}

std::string plot_projection(const std::string& path) {
  const auto rows = read_table(path);
  std::vector<svg::Point2> pts;
  std::vector<std::string> labels;
  for (const auto& row : rows) {
    pts.push_back({std::stod(column(row, "x", path)), std::stod(column(row, "y", path))});
    labels.push_back(column(row, "family", path));
  }
  return svg::scatter(pts, labels, "PCA of dendrogram features");
}

int run(int argc, char** argv) {
  CLI::App app{"Agglomerative clustering, dendrogram cuts and false-positive benchmarks"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Emit one synthetic dataset as CSV plus a JSON sidecar");
  DistributionSpec spec;
  std::string family = "uniform", modality = "unimodal", translation = "all_axes", gen_out, gen_meta;
  std::optional<std::size_t> replicate;
  gen->add_option("--family", family, "uniform | gaussian | power | exponential");
  gen->add_option("--dim", spec.dim, "Dimension D");
  gen->add_option("--modality", modality, "unimodal | bimodal");
  gen->add_option("--n", spec.n, "Number of points");
  gen->add_option("--alpha", spec.alpha, "Bimodal separation factor");
  gen->add_option("--seed", spec.seed, "Dataset seed (master seed when --replicate is given)");
  gen->add_option("--replicate", replicate, "Derive the dataset seed as the bench would for this replicate");
  gen->add_option("--translation", translation, "all_axes | first_axis");
  gen->add_option("--out", gen_out, "Output CSV")->required();
  gen->add_option("--meta", gen_meta, "Sidecar JSON (default: <out>.json)");

  // linkage
  auto* lnk = app.add_subcommand("linkage", "Build a dendrogram from a CSV of points");
  std::string lnk_in, lnk_method = "SIN", lnk_out, lnk_strategy = "auto";
  lnk->add_option("--input", lnk_in, "Points CSV")->required();
  lnk->add_option("--method", lnk_method, "SIN | COM | AVG | CEN | MED | WAR");
  lnk->add_option("--strategy", lnk_strategy, "auto | generic");
  lnk->add_option("--out", lnk_out, "Dendrogram JSON")->required();

  // cut
  auto* cutc = app.add_subcommand("cut", "Identify clusters and outliers in a dendrogram");
  std::string cut_in, cut_out, cut_labels;
  CutParams cut_params;
  cutc->add_option("--dendrogram", cut_in, "Dendrogram JSON")->required();
  cutc->add_option("--k", cut_params.k, "Target cluster count");
  cutc->add_option("--s", cut_params.s, "Minimum cluster size (points)")->required();
  cutc->add_option("--c", cut_params.c, "Outlier threshold (points)");
  cutc->add_option("--out", cut_out, "CutResult JSON")->required();
  cutc->add_option("--labels", cut_labels, "Optional per-point region label CSV");

  // cluster
  auto* clu = app.add_subcommand("cluster", "Run linkage and cut on a CSV, writing labels and plots");
  std::string clu_in, clu_method = "SIN", clu_out;
  CutParams clu_params;
  clu->add_option("--input", clu_in, "Points CSV")->required();
  clu->add_option("--method", clu_method, "Linkage method");
  clu->add_option("--k", clu_params.k, "Target cluster count");
  clu->add_option("--s", clu_params.s, "Minimum cluster size (points)")->required();
  clu->add_option("--c", clu_params.c, "Outlier threshold (points)");
  clu->add_option("--out-dir", clu_out, "Output directory")->required();

  // bench
  auto* ben = app.add_subcommand("bench", "Run the synthetic false-positive protocol");
  std::string ben_config, ben_out;
  bool ben_full = false, ben_plots = false;
  std::optional<std::size_t> ben_reps;
  ben->add_option("--config", ben_config, "RunConfig JSON")->required();
  ben->add_option("--out-dir", ben_out, "Output directory (overrides output_dir)");
  ben->add_option("--replicates", ben_reps, "Override the replicate count");
  ben->add_flag("--full", ben_full, "Use M = 400 replicates");
  ben->add_flag("--plots", ben_plots, "Also write SVG plots of the summary");

  // pca
  auto* pca = app.add_subcommand("pca", "PCA of dendrogram feature vectors from a bench run");
  std::string pca_in, pca_out, pca_variant = "raw_curve", pca_method = "SIN";
  std::vector<std::size_t> pca_dims;
  pca->add_option("--features", pca_in, "features_<variant>.csv from bench")->required();
  pca->add_option("--variant", pca_variant, "raw_curve | polyfit");
  pca->add_option("--method", pca_method, "Linkage method whose features are analysed");
  std::string pca_scaling = "center";
  pca->add_option("--scaling", pca_scaling, "center | standardize")
      ->check(CLI::IsMember({"center", "standardize"}));
  pca->add_option("--dims", pca_dims, "Dimensions to analyse (default: all present)");
  pca->add_option("--out-dir", pca_out, "Output directory")->required();

  // plot
  auto* plt = app.add_subcommand("plot", "Emit SVG plots from result CSVs");
  std::string plt_summary, plt_projection, plt_points, plt_out;
  plt->add_option("--summary", plt_summary, "summary.csv: relevance vectors and accumulated error");
  plt->add_option("--projection", plt_projection, "PCA projection CSV (x,y,family)");
  plt->add_option("--points", plt_points, "Points CSV: density isolines of the first two columns");
  plt->add_option("--out-dir", plt_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (*gen) {
    spec.family = parse_family(family);
    spec.modality = parse_modality(modality);
    spec.translation = parse_translation(translation);
    if (replicate) spec.seed = dataset_seed(spec.seed, spec.family, spec.dim, spec.modality, *replicate);
    const Sample sample = generate(spec);
    write_points_csv(gen_out, sample.points);
    spit(gen_meta.empty() ? gen_out + ".json" : gen_meta, spec_to_json(spec) + "\n");
  } else if (*lnk) {
    const PointSet points = read_points_csv(lnk_in);
    const LinkageStrategy strategy =
        lnk_strategy == "generic" ? LinkageStrategy::Generic
        : lnk_strategy == "auto"  ? LinkageStrategy::Automatic
                                  : throw ValidationError("unknown strategy '" + lnk_strategy + "'");
    const Dendrogram d = linkage(pairwise_distances(points), parse_linkage_method(lnk_method), strategy);
    spit(lnk_out, dendrogram_to_json(d) + "\n");
  } else if (*cutc) {
    const Dendrogram d = dendrogram_from_json(slurp(cut_in));
    const CutResult r = cut(d, cut_params);
    spit(cut_out, cut_result_to_json(r) + "\n");
    if (!cut_labels.empty()) {
      std::ostringstream csv;
      csv << "point,label\n";
      const auto labels = region_labels(r.n, r);
      for (std::size_t i = 0; i < labels.size(); ++i) csv << i << ',' << label_name(labels[i]) << '\n';
      spit(cut_labels, csv.str());
    }
  } else if (*clu) {
    const auto outcome = cluster_csv(clu_in, parse_linkage_method(clu_method), clu_params, clu_out);
    std::cout << "n_pred=" << outcome.cut.n_pred << " relevance=" << outcome.cut.relevance
              << " outliers=" << outcome.cut.outliers.size() << '\n';
  } else if (*ben) {
    RunConfig config = run_config_from_json(slurp(ben_config));
    if (ben_full) config.replicates = 400;
    if (ben_reps) config.replicates = *ben_reps;
    if (!ben_out.empty()) config.output_dir = ben_out;
    if (config.output_dir.empty()) throw ValidationError("bench: no output directory (--out-dir or output_dir)");
    config.validate();
    const BenchResult result = run_bench(config);
    write_bench_outputs(result, config.output_dir);
    if (ben_plots) plot_summary((fs::path(config.output_dir) / "summary.csv").string(), fs::path(config.output_dir) / "plots");
    for (const auto& a : result.report.aggregates) {
      std::cout << to_string(a.method) << ' ' << to_string(a.modality) << " D=" << a.dim
                << " frac1=" << a.frac1 << " frac2=" << a.frac2 << " mean_l=" << a.mean_l << '\n';
    }
    if (result.failures() > 0) {
      std::cerr << result.failures() << " replicate(s) failed; see errors.csv\n";
      return 2;
    }
  } else if (*pca) {
    const FeatureVariant variant = parse_feature_variant(pca_variant);
    std::ifstream in(pca_in);
    if (!in) throw ValidationError("cannot open '" + pca_in + "'");
    const auto records = read_features_csv(in, variant);
    PcaStudyRequest request;
    request.variant = variant;
    request.method = parse_linkage_method(pca_method);
    request.scaling = pca_scaling == "standardize" ? PcaScaling::Standardize : PcaScaling::Center;
    request.dims = pca_dims;
    std::vector<std::pair<Family, Modality>> present;
    for (const auto& r : records) {
      if (r.cell.method != request.method) continue;
      if (pca_dims.empty() && std::find(request.dims.begin(), request.dims.end(), r.cell.dim) == request.dims.end()) {
        request.dims.push_back(r.cell.dim);
      }
      const std::pair<Family, Modality> key{r.cell.family, r.cell.modality};
      if (std::find(present.begin(), present.end(), key) == present.end()) present.push_back(key);
    }
    request.distributions = present;
    const auto study = run_pca_study(records, request);
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& p : study) {
      std::ostringstream csv;
      write_projection_csv(csv, p);
      const std::string stem = "pca_" + std::string(to_string(variant)) + "_D" + std::to_string(p.dim);
      spit(fs::path(pca_out) / (stem + ".csv"), csv.str());
      std::vector<svg::Point2> pts;
      for (Eigen::Index i = 0; i < p.coords.rows(); ++i) pts.push_back({p.coords(i, 0), p.coords(i, 1)});
      spit(fs::path(pca_out) / (stem + ".svg"), svg::scatter(pts, p.labels, "PCA, D=" + std::to_string(p.dim)));
      summary.push_back({{"dim", p.dim}, {"explained", p.explained}, {"top2", p.top2()}});
      std::cout << "D=" << p.dim << " top2 explained=" << p.top2() << '\n';
    }
    spit(fs::path(pca_out) / ("pca_" + std::string(to_string(variant)) + ".json"), summary.dump(2) + "\n");
  } else if (*plt) {
    if (plt_summary.empty() && plt_projection.empty() && plt_points.empty()) {
      throw ValidationError("plot: give at least one of --summary, --projection, --points");
    }
    const fs::path out(plt_out);
    if (!plt_summary.empty()) plot_summary(plt_summary, out);
    if (!plt_projection.empty()) spit(out / "projection.svg", plot_projection(plt_projection));
    if (!plt_points.empty()) spit(out / "contour.svg", svg::contour(read_points_csv(plt_points), 24, 6, plt_points));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return 2;
  }
}
