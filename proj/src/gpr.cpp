#include "gprnn/gpr.hpp"

#include <cmath>
#include <limits>
#include <vector>
#include <string>

#include <Eigen/Cholesky>

#include "gprnn/error.hpp"
#include "gprnn/numeric_format.hpp"

namespace gprnn {
namespace {

constexpr int kMaxRefinementSteps = 10;

// t - A x with long double accumulation, so refinement can make progress
// past the double-precision residual floor.
Eigen::VectorXd residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const Eigen::Index n = b.size();
  std::vector<long double> acc(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] = b(i);
  for (Eigen::Index j = 0; j < n; ++j) {
    const long double xj = x(j);
    const double* col = a.col(j).data();
    for (Eigen::Index i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] -= col[i] * xj;
  }
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = static_cast<double>(acc[static_cast<std::size_t>(i)]);
  return r;
}

}  // namespace

GprCore::GprCore(Eigen::MatrixXd y_train, Eigen::VectorXd alpha, KernelParams params)
    : y_train_(std::move(y_train)), alpha_(std::move(alpha)), params_(params) {
  params_.validate();
  if (y_train_.rows() != alpha_.size()) throw DataError("alpha length differs from training rows");
}

GprCore GprCore::fit(const Eigen::MatrixXd& y, const Eigen::VectorXd& t, const KernelParams& params) {
  params.validate();
  if (y.rows() < 1) throw DataError("GPR fit needs at least one training point");
  if (y.rows() != t.size()) throw DataError("coordinate rows differ from target length");

  Eigen::MatrixXd k = gram_matrix(y, params.length);
  k.diagonal().array() += params.noise;

  const Eigen::LLT<Eigen::MatrixXd> llt(k);
  // Without regularization K itself must be nonsingular to working precision.
  bool singular = llt.info() != Eigen::Success;
  if (!singular && params.noise == 0.0) {
    const double floor = static_cast<double>(k.rows()) * std::numeric_limits<double>::epsilon() *
                         k.diagonal().maxCoeff();
    const Eigen::VectorXd pivots = llt.matrixLLT().diagonal().array().square();
    singular = pivots.minCoeff() <= floor;
  }
  if (singular) {
    throw NumericalError("Cholesky factorization of K + noise*I failed (matrix not positive "
                         "definite at noise " + format_short(params.noise) +
                         "); increase the noise parameter");
  }
  Eigen::VectorXd alpha = llt.solve(t);
  const double t_norm = t.norm();
  const double k_norm = k.lpNorm<Eigen::Infinity>();
  Eigen::VectorXd r = residual(k, alpha, t);
  double r_norm = r.norm();
  for (int step = 0; step < kMaxRefinementSteps && r_norm > 1e-3 * kMaxFitResidual * t_norm; ++step) {
    Eigen::VectorXd refined = alpha + llt.solve(r);
    Eigen::VectorXd refined_r = residual(k, refined, t);
    const double refined_norm = refined_r.norm();
    if (!(refined_norm < 0.5 * r_norm)) break;
    alpha = std::move(refined);
    r = std::move(refined_r);
    r_norm = refined_norm;
  }
  const double relative = t_norm > 0.0 ? r_norm / t_norm : r_norm;
  const double backward = r_norm / (k_norm * alpha.norm() + t_norm + std::numeric_limits<double>::min());
  if (!alpha.allFinite() || !(backward <= kMaxFitResidual)) {
    throw NumericalError("GPR solve backward error " + format_short(backward) + " exceeds " +
                         format_short(kMaxFitResidual) + " at noise " + format_short(params.noise) +
                         "; increase the noise parameter");
  }
  Eigen::VectorXd fitted = k * alpha - params.noise * alpha;
  GprCore core(y, std::move(alpha), params);
  core.residual_ = relative;
  core.backward_error_ = backward;
  core.fitted_ = std::move(fitted);
  return core;
}

Eigen::VectorXd GprCore::predict(const Eigen::MatrixXd& y_query) const {
  if (y_query.cols() != y_train_.cols()) {
    throw DataError("query has " + std::to_string(y_query.cols()) + " coordinates, model has " +
                    std::to_string(y_train_.cols()));
  }
  if (!y_query.allFinite()) throw NumericalError("non-finite query coordinates");
  // Sum of component functions, each evaluated exactly as component() does.
  Eigen::VectorXd out = Eigen::VectorXd::Zero(y_query.rows());
  Eigen::VectorXd f(y_query.rows());
  for (std::size_t n = 0; n < terms(); ++n) {
    accumulate_component(n, y_query.col(static_cast<Eigen::Index>(n)), f);
    out += f;
  }
  return out;
}

void GprCore::accumulate_component(std::size_t n, Eigen::Ref<const Eigen::VectorXd> points,
                                   Eigen::VectorXd& values) const {
  const auto col = y_train_.col(static_cast<Eigen::Index>(n));
  values.setZero(points.size());
  for (Eigen::Index k = 0; k < col.size(); ++k) {
    const double a = alpha_(k);
    const double yk = col(k);
    for (Eigen::Index g = 0; g < points.size(); ++g) values(g) += a * rbf1d(points(g), yk, params_.length);
  }
}

Eigen::VectorXd GprCore::component(std::size_t n, std::span<const double> grid) const {
  if (n >= terms()) {
    throw ConfigError("component index " + std::to_string(n + 1) + " outside 1.." +
                      std::to_string(terms()));
  }
  const Eigen::Map<const Eigen::VectorXd> points(grid.data(), static_cast<Eigen::Index>(grid.size()));
  Eigen::VectorXd out;
  accumulate_component(n, points, out);
  return out;
}

double rmse(std::span<const double> predictions, std::span<const double> truth) {
  if (predictions.size() != truth.size()) {
    throw DataError("rmse inputs differ in length (" + std::to_string(predictions.size()) + " vs " +
                    std::to_string(truth.size()) + ")");
  }
  if (predictions.empty()) throw DataError("rmse of an empty set");
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = predictions[i] - truth[i];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

double rmse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truth) {
  return rmse(std::span<const double>(predictions.data(), static_cast<std::size_t>(predictions.size())),
              std::span<const double>(truth.data(), static_cast<std::size_t>(truth.size())));
}

// ---------------------------------------------------------------------------

GprModel::GprModel(UnitCubeScaler x_scaler, WeightMatrix weights, YScaler y_scaler, GprCore core,
                   double training_rmse)
    : x_scaler_(std::move(x_scaler)),
      weights_(std::move(weights)),
      y_scaler_(std::move(y_scaler)),
      core_(std::move(core)),
      training_rmse_(training_rmse) {
  if (x_scaler_.dimension() != weights_.dimension()) {
    throw DataError("x-scaler dimension differs from weight matrix columns");
  }
  if (y_scaler_.terms() != weights_.terms() || core_.terms() != weights_.terms()) {
    throw DataError("coordinate count mismatch between weights, y-scaler and training coordinates");
  }
}

GprModel GprModel::fit(const UnitCubeScaler& x_scaler, const WeightMatrix& weights,
                       const Eigen::MatrixXd& x_scaled, const Eigen::VectorXd& t,
                       const KernelParams& params, bool rescale_y) {
  const Eigen::MatrixXd y = map_features(weights, x_scaled);
  YScaler y_scaler = rescale_y ? YScaler::fit(y) : YScaler::identity(weights.terms());
  Eigen::MatrixXd y_train = rescale_y ? y_scaler.apply(y) : y;
  GprCore core = GprCore::fit(y_train, t, params);
  const double train_rmse = rmse(core.fitted_values(), t);
  return GprModel(x_scaler, weights, std::move(y_scaler), std::move(core), train_rmse);
}

Eigen::MatrixXd GprModel::coordinates(const Eigen::MatrixXd& x_raw) const {
  if (static_cast<std::size_t>(x_raw.cols()) != dimension()) {
    throw DataError("query has " + std::to_string(x_raw.cols()) + " features, model expects " +
                    std::to_string(dimension()));
  }
  return y_scaler_.apply(map_features(weights_, x_scaler_.apply(x_raw)));
}

Eigen::VectorXd GprModel::predict(const Eigen::MatrixXd& x_raw) const {
  return core_.predict(coordinates(x_raw));
}

Eigen::VectorXd GprModel::component_function(std::size_t n, std::span<const double> grid) const {
  return core_.component(n, grid);
}

Eigen::VectorXd GprModel::component_magnitudes(std::span<const double> grid) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(terms()));
  for (std::size_t n = 0; n < terms(); ++n) {
    const Eigen::VectorXd f = component_function(n, grid);
    out(static_cast<Eigen::Index>(n)) = f.size() == 0 ? 0.0 : f.maxCoeff() - f.minCoeff();
  }
  return out;
}

std::vector<double> unit_grid(std::size_t k) {
  if (k < 2) throw ConfigError("grid needs at least 2 points, got " + std::to_string(k));
  std::vector<double> grid(k);
  for (std::size_t i = 0; i < k; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(k - 1);
  return grid;
}

}  // namespace gprnn
