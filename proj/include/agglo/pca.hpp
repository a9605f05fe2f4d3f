#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace agglo {

enum class PcaScaling {
  Standardize,  // center and divide each column by its standard deviation
  Center,       // center only
};

struct PcaModel {
  PcaScaling scaling = PcaScaling::Center;
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;       // per-column divisor (1 for Center or constant columns)
  Eigen::MatrixXd axes;        // columns are principal axes, by decreasing variance
  Eigen::VectorXd variances;   // eigenvalues of the sample covariance
  Eigen::VectorXd explained;   // variances / total variance (all zero if total is 0)
};

// Each axis is signed so its largest-magnitude component is positive.
PcaModel pca_fit(const Eigen::MatrixXd& rows, PcaScaling scaling = PcaScaling::Center);

// Coordinates of each row on the leading `components` axes.
Eigen::MatrixXd pca_project(const PcaModel& model, const Eigen::MatrixXd& rows, std::size_t components = 2);

// Inverse of pca_project, exact for data of rank <= components.
Eigen::MatrixXd pca_reconstruct(const PcaModel& model, const Eigen::MatrixXd& projected);

}  // namespace agglo
