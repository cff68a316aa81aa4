#include "gprnn/coords.hpp"

#include <cmath>
#include <string>

#include "gprnn/error.hpp"

namespace gprnn {

std::string_view to_string(CoordinateMode mode) {
  return mode == CoordinateMode::Augmented ? "augmented" : "reduced";
}

CoordinateMode parse_coordinate_mode(std::string_view text) {
  if (text == "augmented") return CoordinateMode::Augmented;
  if (text == "reduced") return CoordinateMode::Reduced;
  throw DataError("unknown coordinate mode '" + std::string(text) + "'");
}

WeightMatrix::WeightMatrix(Eigen::MatrixXd w, CoordinateMode mode) : w_(std::move(w)), mode_(mode) {
  if (w_.rows() < 1 || w_.cols() < 1) throw ConfigError("weight matrix must be non-empty");
  if (!w_.allFinite()) throw NumericalError("weight matrix has non-finite entries");
  for (Eigen::Index i = 0; i < w_.rows(); ++i) {
    if (w_.row(i).isZero(0.0)) {
      throw NumericalError("weight row " + std::to_string(i + 1) + " is the zero vector");
    }
  }
}

WeightMatrix build_initial_weights(std::size_t dimension, std::size_t terms, SobolGenerator& gen) {
  if (terms == 0) throw ConfigError("number of terms N must be at least 1");
  if (gen.dimension() != dimension) {
    throw ConfigError("Sobol generator dimension " + std::to_string(gen.dimension()) +
                      " does not match feature dimension " + std::to_string(dimension));
  }
  if (gen.index() != 0) throw ConfigError("Sobol generator must start at index 0");

  const auto n = static_cast<Eigen::Index>(terms);
  const auto d = static_cast<Eigen::Index>(dimension);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, d);
  const bool augmented = terms >= dimension;
  const Eigen::Index first_sobol_row = augmented ? d : 0;
  if (augmented) w.topRows(d).setIdentity();

  gen.next();  // null vector
  for (Eigen::Index i = first_sobol_row; i < n; ++i) {
    const auto point = gen.next();
    for (Eigen::Index k = 0; k < d; ++k) w(i, k) = point[static_cast<std::size_t>(k)];
  }
  return WeightMatrix(std::move(w), augmented ? CoordinateMode::Augmented : CoordinateMode::Reduced);
}

WeightMatrix build_initial_weights(std::size_t dimension, std::size_t terms) {
  SobolGenerator gen(dimension);
  return build_initial_weights(dimension, terms, gen);
}

Eigen::MatrixXd map_features(const WeightMatrix& w, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != w.dimension()) {
    throw DataError("feature matrix has " + std::to_string(x.cols()) + " columns, weights expect " +
                    std::to_string(w.dimension()));
  }
  return x * w.matrix().transpose();
}

YScaler::YScaler(Eigen::VectorXd min, Eigen::VectorXd max) : min_(std::move(min)), max_(std::move(max)) {
  if (min_.size() != max_.size()) throw DataError("y-scaler min/max lengths differ");
  for (Eigen::Index n = 0; n < min_.size(); ++n) {
    if (!(max_(n) > min_(n))) {
      throw DataError("y-scaler range for coordinate " + std::to_string(n + 1) + " is empty");
    }
  }
}

YScaler YScaler::fit(const Eigen::MatrixXd& y_train) {
  if (y_train.rows() < 1) throw DataError("cannot fit a y-scaler on zero rows");
  Eigen::VectorXd lo = y_train.colwise().minCoeff().transpose();
  Eigen::VectorXd hi = y_train.colwise().maxCoeff().transpose();
  for (Eigen::Index n = 0; n < y_train.cols(); ++n) {
    const double scale = std::max({1.0, std::abs(lo(n)), std::abs(hi(n))});
    if (!(hi(n) - lo(n) > kDegenerateSpread * scale)) {
      throw DegenerateCoordinateError(
          static_cast<std::size_t>(n),
          "redundant coordinate " + std::to_string(n + 1) +
              " is constant over the training set (degenerate weight row)");
    }
  }
  return YScaler(std::move(lo), std::move(hi));
}

YScaler YScaler::identity(std::size_t terms) {
  const auto n = static_cast<Eigen::Index>(terms);
  return YScaler(Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n));
}

Eigen::MatrixXd YScaler::apply(const Eigen::MatrixXd& y) const {
  if (static_cast<std::size_t>(y.cols()) != terms()) {
    throw DataError("y-scaler expects " + std::to_string(terms()) + " coordinates, got " +
                    std::to_string(y.cols()));
  }
  Eigen::MatrixXd out(y.rows(), y.cols());
  for (Eigen::Index n = 0; n < y.cols(); ++n) {
    out.col(n) = (y.col(n).array() - min_(n)) / (max_(n) - min_(n));
  }
  return out;
}

}  // namespace gprnn
