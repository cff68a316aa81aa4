#pragma once

#include <cmath>
#include <span>

#include <Eigen/Core>

namespace gprnn {

/// Shared 1D RBF length (in rescaled-y units) and the noise added to the
/// Gram diagonal.
struct KernelParams {
  double length = 0.5;
  double noise = 1e-13;

  /// Throws ConfigError unless length > 0, noise >= 0, both finite.
  void validate() const;
};

/// exp(-(a-b)^2 / (2 l^2)).
inline double rbf1d(double a, double b, double length) {
  const double d = a - b;
  return std::exp(-(d * d) / (2.0 * length * length));
}

/// First-order additive kernel: sum of rbf1d over coordinates.
double additive_kernel(std::span<const double> y, std::span<const double> y_other, double length);

/// K_ij = additive_kernel(row i, row j), without noise. Assembled as a sum of
/// N one-dimensional Gram matrices, accumulated in coordinate order
/// 0..N-1, so the result is reproducible bit-for-bit.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& y, double length);

/// Entry (p, m) = additive_kernel(query row p, train row m), same
/// accumulation order as gram_matrix.
Eigen::MatrixXd cross_matrix(const Eigen::MatrixXd& y_query, const Eigen::MatrixXd& y_train,
                             double length);

}  // namespace gprnn
