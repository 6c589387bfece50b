#include "keydyn/pca.hpp"

#include <stdexcept>

namespace keydyn {

PcaModel fit_pca(const Eigen::MatrixXd& train, Eigen::Index k) {
  const auto n = train.rows();
  const auto d = train.cols();
  if (k < 1 || k > d) throw std::invalid_argument("component count must lie in [1, columns]");
  if (n < std::max<Eigen::Index>(2, k)) throw std::invalid_argument("fewer rows than components");

  PcaModel model;
  model.mean = train.colwise().mean();
  const Eigen::MatrixXd centred = train.rowwise() - model.mean;
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("covariance eigendecomposition failed");

  // Eigen returns ascending order.
  const Eigen::VectorXd values = eig.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
  const double total = values.sum();

  model.all_eigenvalues = values;
  model.explained_variance = values.head(k);
  model.explained_ratio = total > 0.0 ? Eigen::VectorXd(values.head(k) / total)
                                      : Eigen::VectorXd::Zero(k);
  model.components.resize(k, d);
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::VectorXd v = vectors.col(c);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    model.components.row(c) = v.transpose();
  }
  return model;
}

Eigen::MatrixXd PcaModel::project(const Eigen::MatrixXd& data) const {
  if (data.cols() != mean.size()) throw std::invalid_argument("projection column count mismatch");
  return (data.rowwise() - mean) * components.transpose();
}

}  // namespace keydyn
