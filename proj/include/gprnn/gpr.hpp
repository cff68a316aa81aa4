#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "gprnn/coords.hpp"
#include "gprnn/features.hpp"
#include "gprnn/kernel.hpp"

namespace gprnn {

/// Fit-time gate on the normwise backward error
/// ||r|| / (||K + s2 I|| ||alpha|| + ||t||), r = t - (K + s2 I) alpha.
/// Iterative refinement drives the relative residual ||r|| / ||t|| below
/// the same bound whenever the conditioning allows it.
inline constexpr double kMaxFitResidual = 1e-8;

/// Zero-mean GPR posterior mean over the additive kernel in coordinate space.
class GprCore {
 public:
  GprCore() = default;
  /// Restores a previously fitted state (no refactorization).
  GprCore(Eigen::MatrixXd y_train, Eigen::VectorXd alpha, KernelParams params);

  /// Solves (K + s2 I) alpha = t by Cholesky factorization followed by
  /// iterative refinement with extended-precision residuals. Throws
  /// NumericalError if K + s2 I is not numerically positive definite or the
  /// backward error exceeds kMaxFitResidual.
  static GprCore fit(const Eigen::MatrixXd& y, const Eigen::VectorXd& t, const KernelParams& params);

  /// K(y_query, y_train) alpha, evaluated as the sum over n of the
  /// component functions so that it agrees bit-for-bit with component().
  Eigen::VectorXd predict(const Eigen::MatrixXd& y_query) const;

  /// f_n(g) = sum_k alpha_k rbf1d(g, y_train[k][n], l) for 0-based n.
  Eigen::VectorXd component(std::size_t n, std::span<const double> grid) const;

  const Eigen::MatrixXd& train_coordinates() const noexcept { return y_train_; }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  const KernelParams& params() const noexcept { return params_; }
  std::size_t terms() const noexcept { return static_cast<std::size_t>(y_train_.cols()); }
  /// ||t - (K + s2 I) alpha|| / ||t|| after refinement.
  double fit_residual() const noexcept { return residual_; }
  double backward_error() const noexcept { return backward_error_; }
  /// Posterior mean at the training points; empty for restored cores.
  const Eigen::VectorXd& fitted_values() const noexcept { return fitted_; }

 private:
  void accumulate_component(std::size_t n, Eigen::Ref<const Eigen::VectorXd> points,
                            Eigen::VectorXd& values) const;

  Eigen::MatrixXd y_train_;
  Eigen::VectorXd alpha_;
  KernelParams params_;
  Eigen::VectorXd fitted_;
  double residual_ = 0.0;
  double backward_error_ = 0.0;
};

double rmse(std::span<const double> predictions, std::span<const double> truth);
double rmse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truth);

/// Full trained pipeline: raw x -> unit cube -> y = W x -> y rescaling -> GPR.
class GprModel {
 public:
  GprModel() = default;
  GprModel(UnitCubeScaler x_scaler, WeightMatrix weights, YScaler y_scaler, GprCore core,
           double training_rmse);

  /// Fits on already unit-cube-scaled features. With `rescale_y` off the
  /// coordinates enter the kernel as W x.
  static GprModel fit(const UnitCubeScaler& x_scaler, const WeightMatrix& weights,
                      const Eigen::MatrixXd& x_scaled, const Eigen::VectorXd& t,
                      const KernelParams& params, bool rescale_y = true);

  /// Predictions in target units for raw feature rows.
  Eigen::VectorXd predict(const Eigen::MatrixXd& x_raw) const;

  /// Rescaled coordinates (the kernel's inputs) of raw feature rows.
  Eigen::MatrixXd coordinates(const Eigen::MatrixXd& x_raw) const;

  /// Component function f_n over a grid in rescaled-y units, 0-based n.
  Eigen::VectorXd component_function(std::size_t n, std::span<const double> grid) const;

  /// max - min of each component function over the grid.
  Eigen::VectorXd component_magnitudes(std::span<const double> grid) const;

  const UnitCubeScaler& x_scaler() const noexcept { return x_scaler_; }
  const WeightMatrix& weights() const noexcept { return weights_; }
  const YScaler& y_scaler() const noexcept { return y_scaler_; }
  const GprCore& core() const noexcept { return core_; }
  const KernelParams& params() const noexcept { return core_.params(); }
  double training_rmse() const noexcept { return training_rmse_; }
  std::size_t dimension() const noexcept { return weights_.dimension(); }
  std::size_t terms() const noexcept { return weights_.terms(); }

 private:
  UnitCubeScaler x_scaler_;
  WeightMatrix weights_;
  YScaler y_scaler_;
  GprCore core_;
  double training_rmse_ = 0.0;
};

/// Uniform grid of k >= 2 points on [0,1].
std::vector<double> unit_grid(std::size_t k);

}  // namespace gprnn
