#include "agglo/point_set.hpp"

#include <cmath>
#include <string>

#include "agglo/errors.hpp"

namespace agglo {

PointSet::PointSet(std::size_t n, std::size_t dim, std::vector<double> coords)
    : n_(n), dim_(dim), coords_(std::move(coords)) {
  if (n < 2) throw ValidationError("point set needs at least 2 points, got " + std::to_string(n));
  if (dim < 1) throw ValidationError("point set needs dimension >= 1");
  if (coords_.size() != n * dim) {
    throw ValidationError("coordinate buffer has " + std::to_string(coords_.size()) +
                          " values, expected " + std::to_string(n * dim));
  }
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    if (!std::isfinite(coords_[k])) {
      throw ValidationError("non-finite coordinate at point " + std::to_string(k / dim) +
                            ", column " + std::to_string(k % dim));
    }
  }
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ValidationError("point set needs at least 2 points, got 0");
  const std::size_t dim = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw ValidationError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                            " columns, expected " + std::to_string(dim));
    }
    coords.insert(coords.end(), rows[i].begin(), rows[i].end());
  }
  return PointSet(rows.size(), dim, std::move(coords));
}

CondensedDistances::CondensedDistances(std::size_t n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (n < 2) throw ValidationError("distance matrix needs at least 2 points");
  if (values_.size() != n * (n - 1) / 2) {
    throw ValidationError("condensed distances have " + std::to_string(values_.size()) +
                          " entries, expected " + std::to_string(n * (n - 1) / 2));
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("distances must be finite and non-negative");
  }
}

CondensedDistances pairwise_distances(const PointSet& points) {
  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  std::vector<double> values;
  values.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto a = points[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = points[j];
      double sum = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
      }
      values.push_back(std::sqrt(sum));
    }
  }
  return CondensedDistances(n, std::move(values));
}

}  // namespace agglo
