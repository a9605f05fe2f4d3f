#include "agglo/datagen.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "agglo/errors.hpp"
#include "agglo/rng.hpp"

namespace agglo {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void draw_point(Family family, Rng& rng, std::span<double> out) {
  switch (family) {
    case Family::Uniform: {
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (double& x : out) {
          x = rng.normal();
          norm2 += x * x;
        }
      } while (norm2 == 0.0);
      const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(out.size()));
      const double scale = radius / std::sqrt(norm2);
      for (double& x : out) x *= scale;
      break;
    }
    case Family::Gaussian:
      for (double& x : out) x = rng.normal();
      break;
    case Family::Power:
      for (double& x : out) {
        const double u = rng.uniform_open_low();
        x = rng.sign() * u * u;
      }
      break;
    case Family::Exponential:
      for (double& x : out) x = rng.sign() * rng.exponential();
      break;
  }
}

std::vector<double> draw(Family family, std::size_t count, std::size_t dim, Rng& rng) {
  std::vector<double> coords(count * dim);
  for (std::size_t i = 0; i < count; ++i) draw_point(family, rng, {coords.data() + i * dim, dim});
  return coords;
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Uniform: return "uniform";
    case Family::Gaussian: return "gaussian";
    case Family::Power: return "power";
    case Family::Exponential: return "exponential";
  }
  return "?";
}

std::string_view to_string(Modality m) { return m == Modality::Unimodal ? "unimodal" : "bimodal"; }

std::string_view to_string(Translation t) { return t == Translation::AllAxes ? "all_axes" : "first_axis"; }

Family parse_family(std::string_view text) {
  const std::string t = lower(text);
  for (Family f : kAllFamilies) {
    if (t == to_string(f)) return f;
  }
  throw ValidationError("unknown distribution family '" + std::string(text) + "'");
}

Modality parse_modality(std::string_view text) {
  const std::string t = lower(text);
  if (t == "unimodal" || t == "uni") return Modality::Unimodal;
  if (t == "bimodal" || t == "bi") return Modality::Bimodal;
  throw ValidationError("unknown modality '" + std::string(text) + "'");
}

Translation parse_translation(std::string_view text) {
  const std::string t = lower(text);
  if (t == "all_axes") return Translation::AllAxes;
  if (t == "first_axis") return Translation::FirstAxis;
  throw ValidationError("unknown translation '" + std::string(text) + "'");
}

void DistributionSpec::validate() const {
  if (dim < 1) throw ValidationError("distribution dim must be >= 1");
  if (n < 2) throw ValidationError("distribution needs n >= 2");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be finite and >= 0");
  if (modality == Modality::Bimodal && n % 2 != 0) {
    throw ValidationError("bimodal datasets need an even n, got " + std::to_string(n));
  }
}

PointSet sample_unimodal(const DistributionSpec& spec) {
  spec.validate();
  if (spec.modality != Modality::Unimodal) throw ValidationError("sample_unimodal needs a unimodal spec");
  Rng rng(spec.seed);
  return PointSet(spec.n, spec.dim, draw(spec.family, spec.n, spec.dim, rng));
}

double dispersion(std::span<const double> coords, std::size_t dim) {
  const std::size_t count = coords.size() / dim;
  if (count < 2) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < count; ++i) mean += coords[i * dim + k];
    mean /= static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double diff = coords[i * dim + k] - mean;
      ss += diff * diff;
    }
    total += ss / static_cast<double>(count - 1);
  }
  return std::sqrt(total / static_cast<double>(dim));
}

Sample make_bimodal(const DistributionSpec& spec) {
  spec.validate();
  if (spec.modality != Modality::Bimodal) throw ValidationError("make_bimodal needs a bimodal spec");
  const std::size_t half = spec.n / 2;
  const std::size_t dim = spec.dim;
  Rng rng(spec.seed);
  std::vector<double> first = draw(spec.family, half, dim, rng);
  std::vector<double> second = draw(spec.family, half, dim, rng);

  BimodalDerivation der;
  der.sigma1 = dispersion(first, dim);
  der.sigma2 = dispersion(second, dim);
  der.sigma = (der.sigma1 + der.sigma2) / 2.0;
  der.d = spec.alpha * der.sigma / 2.0;

  if (spec.family == Family::Power) {
    for (double& x : second) x = -x;
  }
  const std::size_t shifted = spec.translation == Translation::AllAxes ? dim : 1;
  for (std::size_t i = 0; i < half; ++i) {
    for (std::size_t k = 0; k < shifted; ++k) {
      first[i * dim + k] += der.d;
      second[i * dim + k] -= der.d;
    }
  }
  first.insert(first.end(), second.begin(), second.end());
  std::vector<int> mode(spec.n, 0);
  std::fill(mode.begin() + static_cast<std::ptrdiff_t>(half), mode.end(), 1);
  return Sample{PointSet(spec.n, dim, std::move(first)), std::move(mode), der};
}

Sample generate(const DistributionSpec& spec) {
  if (spec.modality == Modality::Bimodal) return make_bimodal(spec);
  return Sample{sample_unimodal(spec), std::vector<int>(spec.n, 0), std::nullopt};
}

std::uint64_t dataset_seed(std::uint64_t master, Family family, std::size_t dim, Modality modality,
                           std::size_t replicate) {
  return derive_seed({master, static_cast<std::uint64_t>(family) + 1, dim,
                      static_cast<std::uint64_t>(modality) + 1, replicate});
}

std::string spec_to_json(const DistributionSpec& spec) {
  nlohmann::json doc{
      {"family", to_string(spec.family)},   {"dim", spec.dim},
      {"modality", to_string(spec.modality)}, {"alpha", spec.alpha},
      {"n", spec.n},                        {"seed", spec.seed},
      {"translation", to_string(spec.translation)},
  };
  return doc.dump(2);
}

DistributionSpec spec_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    DistributionSpec spec;
    spec.family = parse_family(doc.at("family").get<std::string>());
    spec.dim = doc.at("dim").get<std::size_t>();
    spec.modality = parse_modality(doc.at("modality").get<std::string>());
    spec.alpha = doc.value("alpha", 4.0);
    spec.n = doc.at("n").get<std::size_t>();
    spec.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("translation")) spec.translation = parse_translation(doc["translation"].get<std::string>());
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("distribution spec JSON: ") + e.what());
  }
}

void write_points_csv(std::ostream& out, const PointSet& points) {
  char buf[32];
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto row = points[i];
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      const auto res = std::to_chars(buf, buf + sizeof buf, row[k]);
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

void write_points_csv(const std::string& path, const PointSet& points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_points_csv(out, points);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

PointSet read_points_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t start = 0;
    std::size_t column = 0;
    for (;;) {
      ++column;
      const std::size_t end = line.find(',', start);
      std::string cell = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
      const auto first = cell.find_first_not_of(" \t");
      const auto last = cell.find_last_not_of(" \t");
      cell = first == std::string::npos ? std::string() : cell.substr(first, last - first + 1);
      double value = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
          !std::isfinite(value)) {
        throw ValidationError(source + ": row " + std::to_string(line_no) + ", column " +
                              std::to_string(column) + ": not a finite number: '" + cell + "'");
      }
      row.push_back(value);
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ValidationError(source + ": row " + std::to_string(line_no) + " has " +
                            std::to_string(row.size()) + " columns, expected " +
                            std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(source + ": no data rows");
  if (rows.size() < 2) throw ValidationError(source + ": need at least 2 points, found 1");
  return PointSet::from_rows(rows);
}

PointSet read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return read_points_csv(in, path);
}

}  // namespace agglo
