#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agglo/point_set.hpp"

namespace agglo {

enum class Family { Uniform, Gaussian, Power, Exponential };
enum class Modality { Unimodal, Bimodal };

// Direction of the bimodal displacement: every coordinate shifted by +/-d,
// or only the first one.
enum class Translation { AllAxes, FirstAxis };

inline constexpr Family kAllFamilies[] = {Family::Uniform, Family::Gaussian, Family::Power,
                                          Family::Exponential};
inline constexpr Modality kAllModalities[] = {Modality::Unimodal, Modality::Bimodal};

std::string_view to_string(Family f);
std::string_view to_string(Modality m);
std::string_view to_string(Translation t);
Family parse_family(std::string_view text);
Modality parse_modality(std::string_view text);
Translation parse_translation(std::string_view text);

struct DistributionSpec {
  Family family = Family::Uniform;
  std::size_t dim = 2;
  Modality modality = Modality::Unimodal;
  double alpha = 4.0;
  std::size_t n = 500;
  std::uint64_t seed = 0;
  Translation translation = Translation::AllAxes;

  void validate() const;
};

struct BimodalDerivation {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double sigma = 0.0;  // (sigma1 + sigma2) / 2
  double d = 0.0;      // alpha * sigma / 2
};

struct Sample {
  PointSet points;
  std::vector<int> mode;  // 0 for S1 (or unimodal), 1 for S2
  std::optional<BimodalDerivation> derivation;
};

// uniform: uniform in the unit D-ball. gaussian: identity covariance.
// exponential: each coordinate sign * Exp(1). power: each coordinate sign * U^2.
PointSet sample_unimodal(const DistributionSpec& spec);

// Two half-size draws S1, S2; S1 shifted by +d, S2 by -d, with S2 mirrored
// first for the power family. Points of S1 come first.
Sample make_bimodal(const DistributionSpec& spec);

Sample generate(const DistributionSpec& spec);

// Square root of the mean per-coordinate sample variance.
double dispersion(std::span<const double> coords, std::size_t dim);

// Independent stream per dataset, shared by all linkage methods.
std::uint64_t dataset_seed(std::uint64_t master, Family family, std::size_t dim, Modality modality,
                           std::size_t replicate);

std::string spec_to_json(const DistributionSpec& spec);
DistributionSpec spec_from_json(std::string_view text);

// Headerless CSV, one point per row.
void write_points_csv(std::ostream& out, const PointSet& points);
void write_points_csv(const std::string& path, const PointSet& points);
// Errors name the source and the 1-based row/column of the offending cell.
PointSet read_points_csv(std::istream& in, const std::string& source);
PointSet read_points_csv(const std::string& path);

}  // namespace agglo
