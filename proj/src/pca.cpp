#include "agglo/pca.hpp"

#include <cmath>
#include <string>

#include "agglo/errors.hpp"

namespace agglo {

PcaModel pca_fit(const Eigen::MatrixXd& rows, PcaScaling scaling) {
  if (rows.rows() < 2) throw ValidationError("pca_fit needs at least 2 rows");
  if (rows.cols() < 1) throw ValidationError("pca_fit needs at least 1 column");
  if (!rows.allFinite()) throw ValidationError("pca_fit: non-finite input");
  const auto n = rows.rows();
  const auto dim = rows.cols();

  PcaModel model;
  model.scaling = scaling;
  model.mean = rows.colwise().mean().transpose();
  Eigen::MatrixXd centered = rows.rowwise() - model.mean.transpose();
  model.scale = Eigen::VectorXd::Ones(dim);
  if (scaling == PcaScaling::Standardize) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double sd = std::sqrt(centered.col(k).squaredNorm() / static_cast<double>(n - 1));
      if (sd > 0.0) model.scale(k) = sd;
    }
    centered = centered.array().rowwise() / model.scale.transpose().array();
  }
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw std::runtime_error("pca_fit: eigendecomposition failed");
  // Eigen returns ascending order.
  model.variances = solver.eigenvalues().reverse().cwiseMax(0.0);
  model.axes = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::Index arg = 0;
    model.axes.col(j).cwiseAbs().maxCoeff(&arg);
    if (model.axes(arg, j) < 0.0) model.axes.col(j) *= -1.0;
  }
  const double total = model.variances.sum();
  model.explained = total > 0.0 ? Eigen::VectorXd(model.variances / total) : Eigen::VectorXd::Zero(dim);
  return model;
}

Eigen::MatrixXd pca_project(const PcaModel& model, const Eigen::MatrixXd& rows, std::size_t components) {
  const auto dim = model.mean.size();
  if (rows.cols() != dim) {
    throw ValidationError("pca_project: expected " + std::to_string(dim) + " columns, got " +
                          std::to_string(rows.cols()));
  }
  const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(components), dim);
  if (model.explained.sum() == 0.0) return Eigen::MatrixXd::Zero(rows.rows(), k);
  Eigen::MatrixXd z = rows.rowwise() - model.mean.transpose();
  z = z.array().rowwise() / model.scale.transpose().array();
  return z * model.axes.leftCols(k);
}

Eigen::MatrixXd pca_reconstruct(const PcaModel& model, const Eigen::MatrixXd& projected) {
  const auto k = projected.cols();
  Eigen::MatrixXd z = projected * model.axes.leftCols(k).transpose();
  z = z.array().rowwise() * model.scale.transpose().array();
  return z.rowwise() + model.mean.transpose();
}

}  // namespace agglo
