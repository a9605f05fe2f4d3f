#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace agglo {

// N x D matrix of finite coordinates, stored row-major.
class PointSet {
 public:
  PointSet(std::size_t n, std::size_t dim, std::vector<double> coords);

  static PointSet from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  const std::vector<double>& data() const { return coords_; }

 private:
  std::size_t n_;
  std::size_t dim_;
  std::vector<double> coords_;
};

// Upper triangle of the symmetric distance matrix, row-major:
// (0,1), (0,2), ..., (0,n-1), (1,2), ...
class CondensedDistances {
 public:
  CondensedDistances(std::size_t n, std::vector<double> values);

  std::size_t size() const { return n_; }
  const std::vector<double>& values() const { return values_; }

  static std::size_t index(std::size_t n, std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return n * i - i * (i + 1) / 2 + (j - i - 1);
  }

  double operator()(std::size_t i, std::size_t j) const { return values_[index(n_, i, j)]; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

CondensedDistances pairwise_distances(const PointSet& points);

}  // namespace agglo
