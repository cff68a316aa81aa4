#pragma once

#include <cstddef>
#include <string_view>

#include <Eigen/Core>

#include "gprnn/sobol.hpp"

namespace gprnn {

/// augmented: N >= D, the first D rows start as the identity.
/// reduced: N < D, every row comes from the Sobol sequence.
enum class CoordinateMode { Augmented, Reduced };

std::string_view to_string(CoordinateMode mode);
CoordinateMode parse_coordinate_mode(std::string_view text);

/// The N x D matrix W of the redundant coordinates y = W x.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  /// Throws NumericalError for non-finite entries or zero rows.
  WeightMatrix(Eigen::MatrixXd w, CoordinateMode mode);

  std::size_t terms() const noexcept { return static_cast<std::size_t>(w_.rows()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(w_.cols()); }
  CoordinateMode mode() const noexcept { return mode_; }
  const Eigen::MatrixXd& matrix() const noexcept { return w_; }

 private:
  Eigen::MatrixXd w_;
  CoordinateMode mode_ = CoordinateMode::Augmented;
};

/// Identity rows followed by Sobol points 1..N-D when N >= D, otherwise
/// Sobol points 1..N. The null point at index 0 is always skipped. The
/// generator must be D-dimensional and positioned at index 0.
///
/// Rows are successive points of one D-dimensional sequence.
WeightMatrix build_initial_weights(std::size_t dimension, std::size_t terms, SobolGenerator& gen);
WeightMatrix build_initial_weights(std::size_t dimension, std::size_t terms);

/// Y = X W^T (M x N).
Eigen::MatrixXd map_features(const WeightMatrix& w, const Eigen::MatrixXd& x);

/// Per-coordinate affine map of y onto [0,1] over the training set.
class YScaler {
 public:
  YScaler() = default;
  YScaler(Eigen::VectorXd min, Eigen::VectorXd max);

  /// Throws DegenerateCoordinateError naming the first (near) constant column.
  static YScaler fit(const Eigen::MatrixXd& y_train);
  /// min 0, max 1: leaves coordinates untouched.
  static YScaler identity(std::size_t terms);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& y) const;

  std::size_t terms() const noexcept { return static_cast<std::size_t>(min_.size()); }
  const Eigen::VectorXd& min() const noexcept { return min_; }
  const Eigen::VectorXd& max() const noexcept { return max_; }

 private:
  Eigen::VectorXd min_;
  Eigen::VectorXd max_;
};

/// Relative spread below which a y-column counts as constant.
inline constexpr double kDegenerateSpread = 1e-12;

}  // namespace gprnn
