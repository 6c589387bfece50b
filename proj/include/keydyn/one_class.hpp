#pragma once

#include <Eigen/Dense>
#include <cstddef>

namespace keydyn {

/// RBF kernel k(a, b) = exp(-|a - b|^2 / width), width being a squared length.
double rbf_kernel(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                  const Eigen::Ref<const Eigen::RowVectorXd>& b, double width);

/// Median pairwise squared distance; falls back to the mean (or 1) when the
/// median is zero.
double median_heuristic_width(const Eigen::MatrixXd& points);

struct OneClassModel {
  Eigen::MatrixXd support_vectors;
  Eigen::VectorXd alpha;  ///< sums to 1
  double rho = 0.0;
  double kernel_width = 1.0;
  double nu = 0.1;
  std::size_t iterations = 0;
  double kkt_gap = 0.0;

  /// sum_i alpha_i k(s_i, x) - rho
  double decision(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  bool is_inlier(const Eigen::Ref<const Eigen::RowVectorXd>& x) const { return decision(x) >= 0.0; }
};

struct OneClassOptions {
  double tolerance = 1e-4;         ///< maximal KKT violation at convergence
  std::size_t max_iterations = 0;  ///< 0 selects max(100000, 100 n)
};

/// Solves min 1/2 a^T K a subject to 0 <= a_i <= 1/(nu n), sum a = 1 by SMO
/// with second-order working-set selection. Throws std::invalid_argument for
/// fewer than 10 points or nu outside (0, 1]; SolverError if the iteration cap is hit.
OneClassModel fit_one_class(const Eigen::MatrixXd& points, double nu, double kernel_width,
                            OneClassOptions options = {});

/// Percentage of rows with decision >= 0. Throws on an empty test set.
double inlier_rate(const OneClassModel& model, const Eigen::MatrixXd& test);

}  // namespace keydyn
