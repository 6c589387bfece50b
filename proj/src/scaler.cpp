#include "keydyn/scaler.hpp"

#include <cmath>
#include <stdexcept>

namespace keydyn {

namespace {
bool is_constant(double sd, double mean) { return sd <= 1e-12 * (std::abs(mean) + 1.0); }
}  // namespace

Scaler Scaler::fit(const Eigen::MatrixXd& train) {
  if (train.rows() == 0) throw std::invalid_argument("cannot fit a scaler on zero rows");
  Scaler s;
  s.mean = train.colwise().mean();
  const Eigen::MatrixXd centred = train.rowwise() - s.mean;
  s.sd = (centred.array().square().colwise().sum() / static_cast<double>(train.rows())).sqrt();
  return s;
}

Eigen::MatrixXd Scaler::apply(const Eigen::MatrixXd& data) const {
  if (data.cols() != mean.size()) throw std::invalid_argument("scaler column count mismatch");
  Eigen::MatrixXd out(data.rows(), data.cols());
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    if (is_constant(sd(c), mean(c))) {
      out.col(c).setZero();
    } else {
      out.col(c) = (data.col(c).array() - mean(c)) / sd(c);
    }
  }
  return out;
}

}  // namespace keydyn
