#include "agglo/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "agglo/errors.hpp"
#include "agglo/pca.hpp"
#include "agglo/svg.hpp"

namespace agglo {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string fmt_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = line.find(sep, start);
    out.push_back(line.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (replicates < 1) throw ValidationError("config: replicates must be >= 1");
  if (n < 2) throw ValidationError("config: n must be >= 2");
  if (dims.empty()) throw ValidationError("config: dims must not be empty");
  for (std::size_t d : dims) {
    if (d < 1) throw ValidationError("config: every dim must be >= 1");
  }
  if (families.empty() || modalities.empty() || methods.empty()) {
    throw ValidationError("config: families, modalities and methods must not be empty");
  }
  if (!(s_fraction > 0.0 && s_fraction < 1.0)) throw ValidationError("config: s_fraction must lie in (0, 1)");
  if (!(p_fraction > 0.0 && p_fraction < 1.0)) throw ValidationError("config: p_fraction must lie in (0, 1)");
  if (k < 1) throw ValidationError("config: k must be >= 1");
  if (!(alpha >= 0.0)) throw ValidationError("config: alpha must be >= 0");
  if (curve_samples < 2) throw ValidationError("config: curve_samples must be >= 2");
  for (Modality m : modalities) {
    if (m == Modality::Bimodal && n % 2 != 0) throw ValidationError("config: bimodal runs need an even n");
  }
  cut_params().validate(n);
}

CutParams RunConfig::cut_params() const { return CutParams::from_fractions(n, k, s_fraction, p_fraction); }

std::size_t RunConfig::effective_workers() const {
  if (workers > 0) return workers;
  if (const char* env = std::getenv("AGGLO_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 1;
}

RunConfig run_config_from_json(std::string_view text) {
  static const std::set<std::string> known{
      "seed",         "replicates",      "n",             "dims",       "families",   "modalities",
      "methods",      "k",               "s_fraction",    "p_fraction", "alpha",      "translation",
      "feature_variant", "curve_samples", "pca_method",   "output_dir", "workers"};
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config JSON must be an object");
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) throw ValidationError("config: unknown key '" + item.key() + "'");
  }
  RunConfig c;
  try {
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("replicates")) c.replicates = doc["replicates"].get<std::size_t>();
    if (doc.contains("n")) c.n = doc["n"].get<std::size_t>();
    if (doc.contains("dims")) c.dims = doc["dims"].get<std::vector<std::size_t>>();
    if (doc.contains("families")) {
      c.families.clear();
      for (const auto& f : doc["families"]) c.families.push_back(parse_family(f.get<std::string>()));
    }
    if (doc.contains("modalities")) {
      c.modalities.clear();
      for (const auto& m : doc["modalities"]) c.modalities.push_back(parse_modality(m.get<std::string>()));
    }
    if (doc.contains("methods")) {
      c.methods.clear();
      for (const auto& m : doc["methods"]) c.methods.push_back(parse_linkage_method(m.get<std::string>()));
    }
    if (doc.contains("k")) c.k = doc["k"].get<std::size_t>();
    if (doc.contains("s_fraction")) c.s_fraction = doc["s_fraction"].get<double>();
    if (doc.contains("p_fraction")) c.p_fraction = doc["p_fraction"].get<double>();
    if (doc.contains("alpha")) c.alpha = doc["alpha"].get<double>();
    if (doc.contains("translation")) c.translation = parse_translation(doc["translation"].get<std::string>());
    if (doc.contains("feature_variant")) {
      c.feature_variant = parse_feature_variant(doc["feature_variant"].get<std::string>());
    }
    if (doc.contains("curve_samples")) c.curve_samples = doc["curve_samples"].get<std::size_t>();
    if (doc.contains("pca_method")) c.pca_method = parse_linkage_method(doc["pca_method"].get<std::string>());
    if (doc.contains("output_dir")) c.output_dir = doc["output_dir"].get<std::string>();
    if (doc.contains("workers")) c.workers = doc["workers"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config JSON: ") + e.what());
  }
  c.validate();
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  nlohmann::json doc;
  doc["seed"] = c.seed;
  doc["replicates"] = c.replicates;
  doc["n"] = c.n;
  doc["dims"] = c.dims;
  for (Family f : c.families) doc["families"].push_back(to_string(f));
  for (Modality m : c.modalities) doc["modalities"].push_back(to_string(m));
  for (LinkageMethod m : c.methods) doc["methods"].push_back(to_string(m));
  doc["k"] = c.k;
  doc["s_fraction"] = c.s_fraction;
  doc["p_fraction"] = c.p_fraction;
  doc["alpha"] = c.alpha;
  doc["translation"] = to_string(c.translation);
  doc["feature_variant"] = to_string(c.feature_variant);
  doc["curve_samples"] = c.curve_samples;
  doc["pca_method"] = to_string(c.pca_method);
  doc["output_dir"] = c.output_dir;
  doc["workers"] = c.workers;
  return doc.dump(2);
}

std::string distribution_label(Family family, Modality modality) {
  return std::string(to_string(family)) + "_" + std::string(to_string(modality));
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<ReplicateRecord> run_replicate(const RunConfig& config, Family family, std::size_t dim,
                                           Modality modality, std::span<const LinkageMethod> methods,
                                           std::size_t replicate) {
  const std::uint64_t seed = dataset_seed(config.seed, family, dim, modality, replicate);
  std::vector<ReplicateRecord> records;
  for (LinkageMethod m : methods) {
    ReplicateRecord r;
    r.cell = {family, dim, modality, m};
    r.replicate = replicate;
    r.seed = seed;
    records.push_back(std::move(r));
  }

  std::optional<CondensedDistances> dist;
  try {
    DistributionSpec spec;
    spec.family = family;
    spec.dim = dim;
    spec.modality = modality;
    spec.alpha = config.alpha;
    spec.n = config.n;
    spec.seed = seed;
    spec.translation = config.translation;
    dist.emplace(pairwise_distances(generate(spec).points));
  } catch (const std::exception& e) {
    for (auto& r : records) r.error = std::string("datagen: ") + e.what();
    return records;
  }

  const CutParams params = config.cut_params();
  for (auto& r : records) {
    try {
      const Dendrogram d = linkage(*dist, r.cell.method);
      const CutResult cr = cut(d, params);
      r.n_pred = cr.n_pred;
      r.relevance = cr.relevance;
      if (cr.n_pred == 1) r.r1 = cr.relevance;
      if (cr.n_pred == 2) r.r2 = cr.relevance;
      r.raw_features = build_features(d, cr, FeatureVariant::RawCurve, config.curve_samples).values;
      r.poly_features = build_features(d, cr, FeatureVariant::PolyFit, config.curve_samples).values;
    } catch (const std::exception& e) {
      r.n_pred = 0;
      r.relevance = r.r1 = r.r2 = 0.0;
      r.error = e.what();
    }
  }
  return records;
}

std::vector<ReplicateRecord> run_cell(const RunConfig& config, Family family, std::size_t dim,
                                      Modality modality, LinkageMethod method) {
  config.validate();
  std::vector<ReplicateRecord> records(config.replicates);
  const LinkageMethod methods[] = {method};
  parallel_for(config.replicates, config.effective_workers(), [&](std::size_t i) {
    records[i] = std::move(run_replicate(config, family, dim, modality, methods, i).front());
  });
  return records;
}

RelevanceVector accumulate(std::span<const ReplicateRecord> records) {
  RelevanceVector v;
  for (const auto& r : records) {
    if (r.n_pred == 1) {
      v.r1 += r.relevance;
      ++v.count1;
    } else if (r.n_pred == 2) {
      v.r2 += r.relevance;
      ++v.count2;
    } else {
      ++v.other;
    }
  }
  return v;
}

double accumulated_error(const RelevanceVector& v, std::size_t replicates, Modality modality) {
  if (replicates == 0) throw ValidationError("accumulated_error needs M > 0");
  const double m = static_cast<double>(replicates);
  const double ideal1 = modality == Modality::Unimodal ? 1.0 : 0.0;
  const double ideal2 = 1.0 - ideal1;
  return std::hypot(v.r1 / m - ideal1, v.r2 / m - ideal2);
}

const CellSummary* Report::find(const CellKey& key) const {
  for (const auto& c : cells) {
    if (c.cell == key) return &c;
  }
  return nullptr;
}

const MethodAggregate* Report::find(LinkageMethod method, Modality modality, std::size_t dim) const {
  for (const auto& a : aggregates) {
    if (a.method == method && a.modality == modality && a.dim == dim) return &a;
  }
  return nullptr;
}

Report summarize(std::span<const ReplicateRecord> records) {
  std::vector<CellKey> order;
  std::vector<std::vector<ReplicateRecord>> groups;
  for (const auto& r : records) {
    std::size_t g = 0;
    while (g < order.size() && !(order[g] == r.cell)) ++g;
    if (g == order.size()) {
      order.push_back(r.cell);
      groups.emplace_back();
    }
    groups[g].push_back(r);
  }

  Report report;
  for (std::size_t g = 0; g < order.size(); ++g) {
    const auto& recs = groups[g];
    CellSummary s;
    s.cell = order[g];
    s.replicates = recs.size();
    s.vec = accumulate(recs);
    const double m = static_cast<double>(s.replicates);
    for (const auto& r : recs) {
      s.failures += !r.ok();
      s.mean_relevance += r.relevance;
    }
    s.mean_relevance /= m;
    s.frac1 = static_cast<double>(s.vec.count1) / m;
    s.frac2 = static_cast<double>(s.vec.count2) / m;
    s.mean_r1 = s.vec.r1 / m;
    s.mean_r2 = s.vec.r2 / m;
    s.l = accumulated_error(s.vec, s.replicates, s.cell.modality);
    report.cells.push_back(s);
  }

  for (const auto& s : report.cells) {
    MethodAggregate* agg = nullptr;
    for (auto& a : report.aggregates) {
      if (a.method == s.cell.method && a.modality == s.cell.modality && a.dim == s.cell.dim) agg = &a;
    }
    if (!agg) {
      report.aggregates.push_back({s.cell.method, s.cell.modality, s.cell.dim, 0, 0.0, 0.0, 0.0});
      agg = &report.aggregates.back();
    }
    agg->datasets += s.replicates;
    agg->frac1 += static_cast<double>(s.vec.count1);
    agg->frac2 += static_cast<double>(s.vec.count2);
    agg->mean_l += s.l;
  }
  for (auto& a : report.aggregates) {
    std::size_t cells = 0;
    for (const auto& s : report.cells) {
      cells += s.cell.method == a.method && s.cell.modality == a.modality && s.cell.dim == a.dim;
    }
    a.frac1 /= static_cast<double>(a.datasets);
    a.frac2 /= static_cast<double>(a.datasets);
    a.mean_l /= static_cast<double>(cells);
  }
  return report;
}

std::size_t BenchResult::failures() const {
  std::size_t f = 0;
  for (const auto& r : records) f += !r.ok();
  return f;
}

BenchResult run_bench(const RunConfig& config) {
  config.validate();
  struct Task {
    Family family;
    std::size_t dim;
    Modality modality;
    std::size_t replicate;
  };
  std::vector<Task> tasks;
  for (Family f : config.families) {
    for (std::size_t dim : config.dims) {
      for (Modality m : config.modalities) {
        for (std::size_t r = 0; r < config.replicates; ++r) tasks.push_back({f, dim, m, r});
      }
    }
  }
  std::vector<std::vector<ReplicateRecord>> per_task(tasks.size());
  parallel_for(tasks.size(), config.effective_workers(), [&](std::size_t i) {
    const Task& t = tasks[i];
    per_task[i] = run_replicate(config, t.family, t.dim, t.modality, config.methods, t.replicate);
  });

  BenchResult result;
  result.config = config;
  for (auto& recs : per_task) {
    for (auto& r : recs) result.records.push_back(std::move(r));
  }
  // Group by cell for the report: cells keep the (family, dim, modality, method) order.
  std::vector<ReplicateRecord> by_cell;
  by_cell.reserve(result.records.size());
  const std::size_t methods = config.methods.size();
  const std::size_t reps = config.replicates;
  for (std::size_t block = 0; block < tasks.size() / reps; ++block) {
    for (std::size_t m = 0; m < methods; ++m) {
      for (std::size_t r = 0; r < reps; ++r) by_cell.push_back(result.records[(block * reps + r) * methods + m]);
    }
  }
  result.records = std::move(by_cell);
  result.report = summarize(result.records);
  return result;
}

void write_records_csv(std::ostream& out, std::span<const ReplicateRecord> records) {
  out << "family,dim,modality,method,replicate,seed,n_pred,relevance,r1,r2\n";
  for (const auto& r : records) {
    out << to_string(r.cell.family) << ',' << r.cell.dim << ',' << to_string(r.cell.modality) << ','
        << to_string(r.cell.method) << ',' << r.replicate << ',' << r.seed << ',' << r.n_pred << ','
        << fmt_double(r.relevance) << ',' << fmt_double(r.r1) << ',' << fmt_double(r.r2) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const Report& report) {
  out << "family,dim,modality,method,replicates,failures,n_pred1,n_pred2,other,frac1,frac2,r1,r2,mean_r1,"
         "mean_r2,mean_relevance,l\n";
  for (const auto& s : report.cells) {
    out << to_string(s.cell.family) << ',' << s.cell.dim << ',' << to_string(s.cell.modality) << ','
        << to_string(s.cell.method) << ',' << s.replicates << ',' << s.failures << ',' << s.vec.count1 << ','
        << s.vec.count2 << ',' << s.vec.other << ',' << fmt_double(s.frac1) << ',' << fmt_double(s.frac2) << ','
        << fmt_double(s.vec.r1) << ',' << fmt_double(s.vec.r2) << ',' << fmt_double(s.mean_r1) << ','
        << fmt_double(s.mean_r2) << ',' << fmt_double(s.mean_relevance) << ',' << fmt_double(s.l) << '\n';
  }
}

void write_aggregates_csv(std::ostream& out, const Report& report) {
  out << "method,modality,dim,datasets,frac1,frac2,mean_l\n";
  for (const auto& a : report.aggregates) {
    out << to_string(a.method) << ',' << to_string(a.modality) << ',' << a.dim << ',' << a.datasets << ','
        << fmt_double(a.frac1) << ',' << fmt_double(a.frac2) << ',' << fmt_double(a.mean_l) << '\n';
  }
}

std::string report_to_json(const Report& report) {
  nlohmann::json doc;
  doc["cells"] = nlohmann::json::array();
  for (const auto& s : report.cells) {
    doc["cells"].push_back({
        {"family", to_string(s.cell.family)},
        {"dim", s.cell.dim},
        {"modality", to_string(s.cell.modality)},
        {"method", to_string(s.cell.method)},
        {"replicates", s.replicates},
        {"failures", s.failures},
        {"counts", {s.vec.count1, s.vec.count2, s.vec.other}},
        {"relevance_vector", {s.vec.r1, s.vec.r2}},
        {"mean_relevance_vector", {s.mean_r1, s.mean_r2}},
        {"frac1", s.frac1},
        {"frac2", s.frac2},
        {"mean_relevance", s.mean_relevance},
        {"l", s.l},
    });
  }
  doc["aggregates"] = nlohmann::json::array();
  for (const auto& a : report.aggregates) {
    doc["aggregates"].push_back({{"method", to_string(a.method)},
                                 {"modality", to_string(a.modality)},
                                 {"dim", a.dim},
                                 {"datasets", a.datasets},
                                 {"frac1", a.frac1},
                                 {"frac2", a.frac2},
                                 {"mean_l", a.mean_l}});
  }
  return doc.dump(2);
}

void write_features_csv(std::ostream& out, std::span<const ReplicateRecord> records, FeatureVariant variant,
                        std::size_t samples) {
  out << "family,dim,modality,method,replicate";
  for (const auto& name : feature_names(variant, samples)) out << ',' << name;
  out << '\n';
  for (const auto& r : records) {
    if (!r.ok()) continue;
    out << to_string(r.cell.family) << ',' << r.cell.dim << ',' << to_string(r.cell.modality) << ','
        << to_string(r.cell.method) << ',' << r.replicate;
    for (double v : variant == FeatureVariant::RawCurve ? r.raw_features : r.poly_features) {
      out << ',' << fmt_double(v);
    }
    out << '\n';
  }
}

std::vector<ReplicateRecord> read_features_csv(std::istream& in, FeatureVariant variant) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("features CSV is empty");
  const auto header = split(line, ',');
  if (header.size() < 6 || header[0] != "family" || header[4] != "replicate") {
    throw ValidationError("features CSV: unexpected header");
  }
  std::vector<ReplicateRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw ValidationError("features CSV: row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(header.size()));
    }
    ReplicateRecord r;
    try {
      r.cell = {parse_family(cells[0]), std::stoul(cells[1]), parse_modality(cells[2]),
                parse_linkage_method(cells[3])};
      r.replicate = std::stoul(cells[4]);
      std::vector<double> values;
      for (std::size_t i = 5; i < cells.size(); ++i) values.push_back(std::stod(cells[i]));
      (variant == FeatureVariant::RawCurve ? r.raw_features : r.poly_features) = std::move(values);
    } catch (const std::logic_error& e) {
      throw ValidationError("features CSV: row " + std::to_string(row) + ": " + e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_bench_outputs(const BenchResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);
  {
    auto out = open_out(base / "records.csv");
    write_records_csv(out, result.records);
  }
  {
    auto out = open_out(base / "summary.csv");
    write_summary_csv(out, result.report);
  }
  {
    auto out = open_out(base / "aggregates.csv");
    write_aggregates_csv(out, result.report);
  }
  {
    auto out = open_out(base / "summary.json");
    out << report_to_json(result.report) << '\n';
  }
  {
    auto out = open_out(base / "config.json");
    out << run_config_to_json(result.config) << '\n';
  }
  for (FeatureVariant v : {FeatureVariant::RawCurve, FeatureVariant::PolyFit}) {
    auto out = open_out(base / ("features_" + std::string(to_string(v)) + ".csv"));
    write_features_csv(out, result.records, v, result.config.curve_samples);
  }
  if (result.failures() > 0) {
    auto out = open_out(base / "errors.csv");
    out << "family,dim,modality,method,replicate,seed,error\n";
    for (const auto& r : result.records) {
      if (r.ok()) continue;
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << to_string(r.cell.family) << ',' << r.cell.dim << ',' << to_string(r.cell.modality) << ','
          << to_string(r.cell.method) << ',' << r.replicate << ',' << r.seed << ',' << msg << '\n';
    }
  }
}

double PcaProjection::top2() const {
  double sum = 0.0;
  for (double e : explained) sum += e;
  return sum;
}

const Eigen::Vector2d* PcaProjection::centroid(const std::string& label) const {
  for (const auto& [name, c] : centroids) {
    if (name == label) return &c;
  }
  return nullptr;
}

std::vector<PcaProjection> run_pca_study(std::span<const ReplicateRecord> records, const PcaStudyRequest& request) {
  if (request.dims.empty()) throw ValidationError("pca study needs at least one dim");
  std::vector<std::pair<Family, Modality>> dists = request.distributions;
  if (dists.empty()) {
    for (Family f : kAllFamilies) {
      for (Modality m : kAllModalities) dists.emplace_back(f, m);
    }
  }
  auto features_of = [&](const ReplicateRecord& r) -> const std::vector<double>& {
    return request.variant == FeatureVariant::RawCurve ? r.raw_features : r.poly_features;
  };

  std::string missing;
  for (std::size_t dim : request.dims) {
    for (const auto& [f, m] : dists) {
      const bool present = std::any_of(records.begin(), records.end(), [&](const ReplicateRecord& r) {
        return r.ok() && r.cell.dim == dim && r.cell.family == f && r.cell.modality == m &&
               r.cell.method == request.method && !features_of(r).empty();
      });
      if (!present) missing += " (" + distribution_label(f, m) + ", D=" + std::to_string(dim) + ")";
    }
  }
  if (!missing.empty()) throw ValidationError("pca study: no feature vectors for" + missing);

  std::vector<PcaProjection> out;
  for (std::size_t dim : request.dims) {
    std::vector<const ReplicateRecord*> rows;
    std::vector<std::string> labels;
    for (const auto& [f, m] : dists) {
      for (const auto& r : records) {
        if (r.ok() && r.cell.dim == dim && r.cell.family == f && r.cell.modality == m &&
            r.cell.method == request.method) {
          rows.push_back(&r);
          labels.push_back(distribution_label(f, m));
        }
      }
    }
    const std::size_t width = features_of(*rows.front()).size();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& v = features_of(*rows[i]);
      if (v.size() != width) throw ValidationError("pca study: inconsistent feature vector lengths");
      for (std::size_t j = 0; j < width; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
    }
    PcaProjection p;
    p.dim = dim;
    if (rows.size() < 2) throw ValidationError("pca study: need at least 2 feature vectors per dim");
    const PcaModel model = pca_fit(x, request.scaling);
    p.coords = pca_project(model, x, 2);
    for (Eigen::Index j = 0; j < std::min<Eigen::Index>(2, model.explained.size()); ++j) {
      p.explained.push_back(model.explained(j));
    }
    p.labels = labels;
    for (const auto& [f, m] : dists) {
      const std::string label = distribution_label(f, m);
      Eigen::Vector2d sum = Eigen::Vector2d::Zero();
      std::size_t count = 0;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != label) continue;
        sum(0) += p.coords(static_cast<Eigen::Index>(i), 0);
        if (p.coords.cols() > 1) sum(1) += p.coords(static_cast<Eigen::Index>(i), 1);
        ++count;
      }
      p.centroids.emplace_back(label, sum / static_cast<double>(count));
    }
    out.push_back(std::move(p));
  }
  return out;
}

void write_projection_csv(std::ostream& out, const PcaProjection& p) {
  out << "x,y,family\n";
  for (Eigen::Index i = 0; i < p.coords.rows(); ++i) {
    out << fmt_double(p.coords(i, 0)) << ',' << fmt_double(p.coords.cols() > 1 ? p.coords(i, 1) : 0.0) << ','
        << p.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

ClusterOutcome cluster_csv(const std::string& path, LinkageMethod method, const CutParams& params,
                           const std::string& out_dir) {
  namespace fs = std::filesystem;
  PointSet points = read_points_csv(path);
  params.validate(points.size());
  Dendrogram d = linkage(pairwise_distances(points), method);
  CutResult cr = cut(d, params);
  RegionLabels labels = region_labels(points, cr);
  ClusterOutcome outcome{std::move(points), std::move(d), std::move(cr), std::move(labels), {}};

  fs::create_directories(out_dir);
  const fs::path base(out_dir);
  auto emit = [&](const std::string& name, const std::string& content) {
    auto out = open_out(base / name);
    out << content;
    outcome.written.push_back((base / name).string());
  };
  emit("dendrogram.json", dendrogram_to_json(outcome.dendrogram) + "\n");
  emit("cut.json", cut_result_to_json(outcome.cut) + "\n");
  {
    std::ostringstream csv;
    csv << "point,label\n";
    for (std::size_t i = 0; i < outcome.labels.size(); ++i) csv << i << ',' << label_name(outcome.labels[i]) << '\n';
    emit("labels.csv", csv.str());
  }
  if (outcome.points.dim() == 2) {
    const std::string title = std::string(to_string(method)) + " linkage";
    emit("scatter.svg", svg::region_scatter(outcome.points, outcome.labels, title));
    emit("dendrogram.svg", svg::dendrogram(outcome.dendrogram, &outcome.cut, title));
  }
  return outcome;
}

}  // namespace agglo
