#include "agglo/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "agglo/errors.hpp"

namespace agglo {

IncorporationCurve IncorporationCurve::scaled_heights(double scale) const {
  IncorporationCurve out = *this;
  if (scale > 0.0) {
    for (double& h : out.heights) h /= scale;
  }
  return out;
}

IncorporationCurve incorporation_curve(const Dendrogram& d) {
  const std::size_t n = d.point_count();
  const auto& merges = d.merges();
  std::vector<std::size_t> order(merges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return merges[x].height < merges[y].height; });

  IncorporationCurve curve;
  curve.n = n;
  curve.heights.reserve(merges.size());
  curve.counts.reserve(merges.size());
  std::size_t incorporated = 0;
  for (std::size_t i : order) {
    incorporated += merges[i].left < n;
    incorporated += merges[i].right < n;
    curve.heights.push_back(merges[i].height);
    curve.counts.push_back(static_cast<double>(incorporated));
  }
  return curve;
}

std::vector<double> resample_curve(const IncorporationCurve& curve, std::size_t samples) {
  if (curve.heights.empty() || curve.heights.size() != curve.counts.size()) {
    throw ValidationError("resample_curve needs a non-empty curve");
  }
  if (samples < 2) throw ValidationError("resample_curve needs at least 2 samples");
  const auto& h = curve.heights;
  const auto& c = curve.counts;
  const double norm = curve.n > 0 ? static_cast<double>(curve.n) : 1.0;
  const double lo = h.front();
  const double hi = h.back();

  std::vector<double> out(samples);
  if (!(hi > lo)) {
    std::fill(out.begin(), out.end(), c.back() / norm);
    return out;
  }
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = i + 1 == samples ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    // Last entry with height <= x carries the largest count reached at x.
    const auto it = std::upper_bound(h.begin(), h.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - h.begin()) - 1;
    double y = c[j];
    if (j + 1 < h.size()) {
      const double t = (x - h[j]) / (h[j + 1] - h[j]);
      y = c[j] + t * (c[j + 1] - c[j]);
    }
    out[i] = y / norm;
  }
  return out;
}

CubicFit cubic_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("cubic_fit: x and y lengths differ");
  std::vector<double> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 4) {
    throw ValidationError("cubic_fit: rank deficient, need >= 4 distinct heights, got " +
                          std::to_string(distinct.size()));
  }
  const auto m = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(m, 4);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    design(i, 0) = xi * xi * xi;
    design(i, 1) = xi * xi;
    design(i, 2) = xi;
    design(i, 3) = 1.0;
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector4d coef = design.colPivHouseholderQr().solve(rhs);
  CubicFit fit{coef(0), coef(1), coef(2), coef(3), (design * coef - rhs).squaredNorm()};
  return fit;
}

CubicFit cubic_fit(const IncorporationCurve& curve) {
  const double norm = curve.n > 0 ? static_cast<double>(curve.n) : 1.0;
  std::vector<double> y(curve.counts.size());
  std::transform(curve.counts.begin(), curve.counts.end(), y.begin(), [norm](double v) { return v / norm; });
  return cubic_fit(curve.heights, y);
}

std::string_view to_string(FeatureVariant v) { return v == FeatureVariant::RawCurve ? "raw_curve" : "polyfit"; }

FeatureVariant parse_feature_variant(std::string_view text) {
  if (text == "raw_curve" || text == "raw-curve" || text == "heights") return FeatureVariant::RawCurve;
  if (text == "polyfit") return FeatureVariant::PolyFit;
  throw ValidationError("unknown feature variant '" + std::string(text) + "'");
}

FeatureVector build_features(const Dendrogram& d, const CutResult& cr, FeatureVariant variant,
                             std::size_t samples) {
  const std::size_t n = d.point_count();
  if (cr.n != n) throw ValidationError("build_features: cut result covers a different point count");
  if (cr.cluster_heights.empty()) throw ValidationError("build_features: cut result has no clusters");
  const double root = d.root_height();
  auto normalized = [root](double h) { return root > 0.0 ? h / root : 0.0; };
  const double nd = static_cast<double>(n);

  FeatureVector fv;
  fv.variant = variant;
  fv.values.push_back(cr.outliers.empty() ? 1.0 : normalized(cr.outlier_stop_height));
  const double mean_height = std::accumulate(cr.cluster_heights.begin(), cr.cluster_heights.end(), 0.0) /
                             static_cast<double>(cr.cluster_heights.size());
  fv.values.push_back(normalized(mean_height));
  fv.values.push_back(static_cast<double>(cr.outliers.size()) / nd);
  std::size_t clustered = 0;
  for (const auto& c : cr.clusters) clustered += c.size();
  fv.values.push_back(static_cast<double>(clustered) / nd);

  const IncorporationCurve curve = incorporation_curve(d).scaled_heights(root);
  if (variant == FeatureVariant::RawCurve) {
    const auto resampled = resample_curve(curve, samples);
    fv.values.insert(fv.values.end(), resampled.begin(), resampled.end());
  } else {
    const auto coef = cubic_fit(curve).coefficients();
    fv.values.insert(fv.values.end(), coef.begin(), coef.end());
  }
  for (double v : fv.values) {
    if (!std::isfinite(v)) throw std::runtime_error("build_features: non-finite feature");
  }
  return fv;
}

std::vector<std::string> feature_names(FeatureVariant variant, std::size_t samples) {
  std::vector<std::string> names{"outlier_height", "cluster_height", "outlier_fraction", "cluster_fraction"};
  if (variant == FeatureVariant::RawCurve) {
    for (std::size_t i = 0; i < samples; ++i) names.push_back("curve_" + std::to_string(i));
  } else {
    for (const char* c : {"cubic_a", "cubic_b", "cubic_c", "cubic_d"}) names.emplace_back(c);
  }
  return names;
}

}  // namespace agglo
