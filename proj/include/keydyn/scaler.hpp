#pragma once

#include <Eigen/Dense>

namespace keydyn {

/// Column-wise z-score with population standard deviation. Constant columns
/// map to zero.
struct Scaler {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd sd;

  static Scaler fit(const Eigen::MatrixXd& train);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& data) const;
};

}  // namespace keydyn
