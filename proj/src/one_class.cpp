#include "keydyn/one_class.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "keydyn/errors.hpp"

namespace keydyn {

double rbf_kernel(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                  const Eigen::Ref<const Eigen::RowVectorXd>& b, double width) {
  return std::exp(-(a - b).squaredNorm() / width);
}

double median_heuristic_width(const Eigen::MatrixXd& points) {
  std::vector<double> d2;
  const auto n = points.rows();
  d2.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) d2.push_back((points.row(i) - points.row(j)).squaredNorm());
  }
  if (d2.empty()) return 1.0;
  const auto mid = d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2);
  std::nth_element(d2.begin(), mid, d2.end());
  double median = *mid;
  if (d2.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(d2.begin(), mid));
  }
  if (median > 0.0) return median;
  double mean = 0.0;
  for (double v : d2) mean += v;
  mean /= static_cast<double>(d2.size());
  return mean > 0.0 ? mean : 1.0;
}

double OneClassModel::decision(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
    s += alpha(i) * rbf_kernel(support_vectors.row(i), x, kernel_width);
  }
  return s - rho;
}

OneClassModel fit_one_class(const Eigen::MatrixXd& points, double nu, double kernel_width,
                            OneClassOptions options) {
  const auto n = points.rows();
  if (n < 10) throw std::invalid_argument("one-class training needs at least 10 points");
  if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("nu must lie in (0, 1]");
  if (!(kernel_width > 0.0)) throw std::invalid_argument("kernel width must be positive");

  const double cap = 1.0 / (nu * static_cast<double>(n));
  const std::size_t max_iter =
      options.max_iterations ? options.max_iterations
                             : std::max<std::size_t>(100000, 100 * static_cast<std::size_t>(n));
  constexpr double kTau = 1e-12;

  Eigen::MatrixXd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    q(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) q(i, j) = q(j, i) = rbf_kernel(points.row(i), points.row(j), kernel_width);
  }

  // Feasible start: fill alphas at the cap in order until the budget of 1 is spent.
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  double remaining = 1.0;
  for (Eigen::Index i = 0; i < n && remaining > 0.0; ++i) {
    alpha(i) = std::min(cap, remaining);
    remaining -= alpha(i);
  }
  Eigen::VectorXd grad = q * alpha;

  auto at_upper = [&](Eigen::Index i) { return alpha(i) >= cap - 1e-15; };
  auto at_lower = [&](Eigen::Index i) { return alpha(i) <= 1e-15; };

  std::size_t iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  while (true) {
    // i: steepest ascent direction among variables that can grow.
    Eigen::Index i = -1;
    double g_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!at_upper(t) && -grad(t) > g_max) {
        g_max = -grad(t);
        i = t;
      }
    }
    Eigen::Index j = -1;
    double g_min = std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (at_lower(t)) continue;
      g_min = std::min(g_min, -grad(t));
      if (i < 0) continue;
      const double b = g_max + grad(t);
      if (b > 0.0) {
        double a = q(i, i) + q(t, t) - 2.0 * q(i, t);
        if (a <= 0.0) a = kTau;
        const double score = -(b * b) / a;
        if (score < best) {
          best = score;
          j = t;
        }
      }
    }
    gap = g_max - g_min;
    if (i < 0 || j < 0 || gap < options.tolerance) break;
    if (iter >= max_iter) {
      throw SolverError(fmt::format("one-class solver did not converge in {} iterations (KKT gap {:.3g})",
                                    max_iter, gap),
                        gap);
    }
    ++iter;

    double a = q(i, i) + q(j, j) - 2.0 * q(i, j);
    if (a <= 0.0) a = kTau;
    const double old_i = alpha(i);
    const double old_j = alpha(j);
    const double sum = old_i + old_j;
    double new_i = old_i + (grad(j) - grad(i)) / a;
    new_i = std::clamp(new_i, std::max(0.0, sum - cap), std::min(cap, sum));
    const double new_j = sum - new_i;
    alpha(i) = new_i;
    alpha(j) = new_j;
    grad += q.col(i) * (new_i - old_i) + q.col(j) * (new_j - old_j);
  }

  // rho: mean gradient over free variables, else midpoint of the feasible interval.
  double free_sum = 0.0;
  int free_count = 0;
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < n; ++t) {
    if (at_upper(t)) {
      lb = std::max(lb, grad(t));
    } else if (at_lower(t)) {
      ub = std::min(ub, grad(t));
    } else {
      free_sum += grad(t);
      ++free_count;
    }
  }

  OneClassModel model;
  model.rho = free_count > 0 ? free_sum / free_count : 0.5 * (ub + lb);
  model.kernel_width = kernel_width;
  model.nu = nu;
  model.iterations = iter;
  model.kkt_gap = gap;

  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (!at_lower(t)) sv.push_back(t);
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), points.cols());
  model.alpha.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    model.support_vectors.row(static_cast<Eigen::Index>(k)) = points.row(sv[k]);
    model.alpha(static_cast<Eigen::Index>(k)) = alpha(sv[k]);
  }
  return model;
}

double inlier_rate(const OneClassModel& model, const Eigen::MatrixXd& test) {
  if (test.rows() == 0) throw std::invalid_argument("inlier_rate needs a non-empty test set");
  Eigen::Index inliers = 0;
  for (Eigen::Index r = 0; r < test.rows(); ++r) {
    if (model.is_inlier(test.row(r))) ++inliers;
  }
  return 100.0 * static_cast<double>(inliers) / static_cast<double>(test.rows());
}

}  // namespace keydyn
