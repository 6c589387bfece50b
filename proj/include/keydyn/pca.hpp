#pragma once

#include <Eigen/Dense>

namespace keydyn {

/// Principal components of the training covariance (population form).
struct PcaModel {
  Eigen::MatrixXd components;         ///< k x d, orthonormal rows
  Eigen::RowVectorXd mean;            ///< training mean, length d
  Eigen::VectorXd explained_variance; ///< top-k eigenvalues, descending
  Eigen::VectorXd explained_ratio;    ///< eigenvalue / total variance
  Eigen::VectorXd all_eigenvalues;    ///< every eigenvalue, descending

  /// (x - mean) * components^T
  Eigen::MatrixXd project(const Eigen::MatrixXd& data) const;
};

/// Each component's largest-magnitude entry is made positive.
/// Throws std::invalid_argument when rows < max(2, k) or k > d.
PcaModel fit_pca(const Eigen::MatrixXd& train, Eigen::Index k = 2);

}  // namespace keydyn
