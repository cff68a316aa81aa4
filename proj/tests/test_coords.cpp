#include <doctest.h>

#include <random>

#include "gprnn/coords.hpp"
#include "gprnn/error.hpp"
#include "gprnn/gpr.hpp"
#include "sobol_reference.hpp"

using namespace gprnn;

TEST_CASE("initial weights: N == D gives the identity") {
  const auto w = build_initial_weights(3, 3);
  CHECK(w.mode() == CoordinateMode::Augmented);
  CHECK(w.matrix() == Eigen::MatrixXd::Identity(3, 3));
}

TEST_CASE("initial weights: augmented rows follow the identity with Sobol points from index 1") {
  const auto w = build_initial_weights(2, 3);
  Eigen::MatrixXd expected(3, 2);
  expected << 1, 0, 0, 1, 0.5, 0.5;
  CHECK(w.matrix() == expected);

  const auto big = build_initial_weights(6, 20);
  CHECK(big.matrix().topRows(6) == Eigen::MatrixXd::Identity(6, 6));
  for (int i = 6; i < 20; ++i) {
    for (int d = 0; d < 6; ++d) CHECK(big.matrix()(i, d) == kSobolReference6[i - 6 + 1][d]);
  }
}

TEST_CASE("initial weights: reduced mode uses only Sobol rows") {
  const auto w = build_initial_weights(16, 8);
  CHECK(w.mode() == CoordinateMode::Reduced);
  CHECK(w.terms() == 8);
  CHECK(w.dimension() == 16);
  SobolGenerator gen(16);
  gen.next();
  for (int i = 0; i < 8; ++i) {
    const auto p = gen.next();
    for (int d = 0; d < 16; ++d) CHECK(w.matrix()(i, d) == p[d]);
  }
  const auto w6 = build_initial_weights(6, 3);
  for (int i = 0; i < 3; ++i) {
    for (int d = 0; d < 6; ++d) CHECK(w6.matrix()(i, d) == kSobolReference6[i + 1][d]);
  }
}

TEST_CASE("initial weights: errors") {
  CHECK_THROWS_AS(build_initial_weights(3, 0), ConfigError);
  SobolGenerator wrong(2);
  CHECK_THROWS_AS(build_initial_weights(3, 5, wrong), ConfigError);
  CHECK_THROWS_AS(WeightMatrix(Eigen::MatrixXd::Zero(2, 2), CoordinateMode::Augmented), NumericalError);
}

TEST_CASE("map_features: dot products and linearity") {
  Eigen::MatrixXd x(1, 2);
  x << 1, 1;
  WeightMatrix row(Eigen::RowVector2d(0.5, 0.5), CoordinateMode::Reduced);
  CHECK(map_features(row, x)(0, 0) == 1.0);

  const auto ident = build_initial_weights(2, 2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd a(7, 2), b(7, 2);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a.data()[i] = u(rng);
    b.data()[i] = u(rng);
  }
  CHECK(map_features(ident, a) == a);

  const auto w = build_initial_weights(2, 9);
  const Eigen::MatrixXd lhs = map_features(w, 0.7 * a - 1.3 * b);
  const Eigen::MatrixXd rhs = 0.7 * map_features(w, a) - 1.3 * map_features(w, b);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(lhs.rows() == 7);
  CHECK(lhs.cols() == 9);

  const WeightMatrix doubled(2.0 * w.matrix(), w.mode());
  CHECK((map_features(doubled, a) - 2.0 * map_features(w, a)).cwiseAbs().maxCoeff() <= 1e-15);

  CHECK_THROWS_AS(map_features(w, Eigen::MatrixXd(3, 3)), DataError);
}

TEST_CASE("y-scaler: unit interval on training data, extrapolates outside") {
  Eigen::MatrixXd y(2, 1);
  y << 0, 2;
  const auto s = YScaler::fit(y);
  const Eigen::MatrixXd out = s.apply(y);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(1, 0) == 1.0);
  Eigen::MatrixXd below(1, 1);
  below << -1;
  CHECK(s.apply(below)(0, 0) == -0.5);
}

TEST_CASE("y-scaler: constant column names the weight row") {
  Eigen::MatrixXd y(3, 3);
  y << 0, 1, 4, 1, 1, 5, 2, 1, 6;
  try {
    YScaler::fit(y);
    FAIL("expected degenerate coordinate");
  } catch (const DegenerateCoordinateError& e) {
    CHECK(e.row() == 1);
  }
}

TEST_CASE("y-scaler: identity W on unit-cube data is the identity map") {
  Eigen::MatrixXd x(3, 2);
  x << 0, 1, 0.5, 0.25, 1, 0;
  const auto w = build_initial_weights(2, 2);
  const auto y = map_features(w, x);
  CHECK(YScaler::fit(y).apply(y) == x);
}

TEST_CASE("augmented N == D reduces to additive GPR on the scaled features") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  Eigen::MatrixXd x(30, 3);
  Eigen::VectorXd t(30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    for (int d = 0; d < 3; ++d) x(i, d) = u(rng);
    t(i) = std::sin(3 * x(i, 0)) + x(i, 1) * x(i, 2);
  }
  const auto scaler = UnitCubeScaler::fit(x);
  const Eigen::MatrixXd xs = scaler.apply(x);
  const KernelParams params{0.5, 1e-6};
  const auto model = GprModel::fit(scaler, build_initial_weights(3, 3), xs, t, params);
  const auto direct = GprCore::fit(xs, t, params);

  Eigen::MatrixXd q(10, 3);
  for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = u(rng);
  const Eigen::VectorXd a = model.predict(q);
  const Eigen::VectorXd b = direct.predict(scaler.apply(q));
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
}
