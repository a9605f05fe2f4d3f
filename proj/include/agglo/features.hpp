#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "agglo/dendro_analysis.hpp"
#include "agglo/linkage.hpp"

namespace agglo {

// Points incorporated into the dendrogram as a function of height: one entry
// per merge, heights ascending, counts[i] = points that took part in a merge
// at or below heights[i].
struct IncorporationCurve {
  std::vector<double> heights;
  std::vector<double> counts;
  std::size_t n = 0;

  // Heights divided by `scale` (no-op when scale <= 0).
  IncorporationCurve scaled_heights(double scale) const;
};

IncorporationCurve incorporation_curve(const Dendrogram& d);

// Piecewise-linear interpolation of counts / n at `samples` equally spaced
// heights over [min height, max height].
std::vector<double> resample_curve(const IncorporationCurve& curve, std::size_t samples);

struct CubicFit {
  // y = a x^3 + b x^2 + c x + d
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double residual_ss = 0.0;

  std::array<double, 4> coefficients() const { return {a, b, c, d}; }
};

// Least squares fit of counts / n against height.
CubicFit cubic_fit(const IncorporationCurve& curve);
CubicFit cubic_fit(const std::vector<double>& x, const std::vector<double>& y);

enum class FeatureVariant { RawCurve, PolyFit };

std::string_view to_string(FeatureVariant v);
FeatureVariant parse_feature_variant(std::string_view text);

inline constexpr std::size_t kDefaultCurveSamples = 100;

// [outlier height, cluster height, outlier fraction, clustered fraction,
//  curve features...]. Heights are relative to the root height.
struct FeatureVector {
  FeatureVariant variant = FeatureVariant::RawCurve;
  std::vector<double> values;
};

FeatureVector build_features(const Dendrogram& d, const CutResult& cr, FeatureVariant variant,
                             std::size_t samples = kDefaultCurveSamples);

std::vector<std::string> feature_names(FeatureVariant variant, std::size_t samples = kDefaultCurveSamples);

}  // namespace agglo
