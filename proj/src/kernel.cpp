#include "gprnn/kernel.hpp"

#include <cmath>
#include <string>

#include "gprnn/error.hpp"
#include "gprnn/numeric_format.hpp"

namespace gprnn {

void KernelParams::validate() const {
  if (!std::isfinite(length) || !(length > 0.0)) {
    throw ConfigError("kernel length must be positive and finite, got " + format_short(length));
  }
  if (!std::isfinite(noise) || noise < 0.0) {
    throw ConfigError("noise must be nonnegative and finite, got " + format_short(noise));
  }
}

double additive_kernel(std::span<const double> y, std::span<const double> y_other, double length) {
  if (y.size() != y_other.size()) {
    throw DataError("additive kernel arguments differ in length (" + std::to_string(y.size()) +
                    " vs " + std::to_string(y_other.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) sum += rbf1d(y[n], y_other[n], length);
  return sum;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& y, double length) {
  if (!y.allFinite()) throw NumericalError("non-finite coordinates in Gram assembly");
  const Eigen::Index m = y.rows();
  const double inv = -1.0 / (2.0 * length * length);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index n = 0; n < y.cols(); ++n) {
    const auto col = y.col(n);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double yj = col(j);
      k(j, j) += 1.0;
      for (Eigen::Index i = j + 1; i < m; ++i) {
        const double d = col(i) - yj;
        k(i, j) += std::exp(d * d * inv);
      }
    }
  }
  k.triangularView<Eigen::StrictlyUpper>() = k.transpose();
  return k;
}

Eigen::MatrixXd cross_matrix(const Eigen::MatrixXd& y_query, const Eigen::MatrixXd& y_train,
                             double length) {
  if (y_query.cols() != y_train.cols()) {
    throw DataError("cross kernel coordinate counts differ (" + std::to_string(y_query.cols()) +
                    " vs " + std::to_string(y_train.cols()) + ")");
  }
  if (!y_query.allFinite() || !y_train.allFinite()) {
    throw NumericalError("non-finite coordinates in cross-kernel assembly");
  }
  const double inv = -1.0 / (2.0 * length * length);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(y_query.rows(), y_train.rows());
  for (Eigen::Index n = 0; n < y_query.cols(); ++n) {
    const auto q = y_query.col(n);
    const auto t = y_train.col(n);
    for (Eigen::Index m = 0; m < t.size(); ++m) {
      const double tm = t(m);
      for (Eigen::Index p = 0; p < q.size(); ++p) {
        const double d = q(p) - tm;
        k(p, m) += std::exp(d * d * inv);
      }
    }
  }
  return k;
}

}  // namespace gprnn
