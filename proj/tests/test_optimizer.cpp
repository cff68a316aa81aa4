#include <doctest.h>

#include <sstream>

#include "gprnn/error.hpp"
#include "gprnn/optimizer.hpp"
#include "synthetic.hpp"

using namespace gprnn;
using gprnn::testing::synthetic_dataset;

namespace {

McConfig quick_config(std::size_t steps) {
  McConfig cfg;
  cfg.max_steps = steps;
  cfg.seed = 42;
  return cfg;
}

const KernelParams kParams{0.5, 1e-10};

}  // namespace

TEST_CASE("perturb: every row moves by at most c") {
  const auto w = build_initial_weights(3, 12);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto moved = perturb(w, 0.05, rng);
    CHECK(moved.mode() == w.mode());
    for (Eigen::Index i = 0; i < 12; ++i) {
      CHECK((moved.matrix().row(i) - w.matrix().row(i)).norm() <= 0.05 * (1 + 1e-15));
    }
  }
  std::mt19937_64 rng0(1);
  CHECK(perturb(w, 0.0, rng0).matrix() == w.matrix());
}

TEST_CASE("perturb: isotropic directions and uniform radius") {
  // r uniform on the sphere: each component has mean 0 and variance 1/D;
  // R uniform on [0,1]: mean 1/2, variance 1/12.
  WeightMatrix w(Eigen::RowVector3d(1, 1, 1), CoordinateMode::Reduced);
  std::mt19937_64 rng(77);
  const int draws = 10000;
  Eigen::Vector3d dir_sum = Eigen::Vector3d::Zero();
  double radius_sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Eigen::Vector3d delta = (perturb(w, 1.0, rng).matrix().row(0) - w.matrix().row(0)).transpose();
    dir_sum += delta.normalized();
    radius_sum += delta.norm();
  }
  const double dir_sigma = std::sqrt(1.0 / 3.0 / draws);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(dir_sum(k) / draws) <= 3 * dir_sigma);
  CHECK(std::abs(radius_sum / draws - 0.5) <= 3 * std::sqrt(1.0 / 12.0 / draws));
}

TEST_CASE("candidate streams are distinct and reproducible") {
  auto a = candidate_rng(5, 10, 0);
  auto b = candidate_rng(5, 10, 0);
  auto c = candidate_rng(5, 10, 1);
  auto d = candidate_rng(5, 11, 0);
  const auto va = a();
  CHECK(va == b());
  CHECK(va != c());
  CHECK(va != d());
}

TEST_CASE("mc_optimize: zero steps is the unoptimized model") {
  const Dataset train = synthetic_dataset(80, 1);
  const auto result = mc_optimize(train, 8, kParams, quick_config(0));
  const auto scaler = UnitCubeScaler::fit(train);
  const auto direct = GprModel::fit(scaler, build_initial_weights(3, 8), scaler.apply(train.x), train.t, kParams);
  CHECK(result.model.weights().matrix() == direct.weights().matrix());
  CHECK(result.model.predict(train.x) == direct.predict(train.x));
  CHECK(result.trace.steps.size() == 1);
  CHECK(result.trace.steps_run == 0);
  CHECK(result.trace.best_objective == result.trace.initial_objective);
}

TEST_CASE("mc_optimize: incumbent is monotone and acceptance is strict") {
  const Dataset train = synthetic_dataset(80, 2);
  const auto result = mc_optimize(train, 6, kParams, quick_config(60));
  const auto& steps = result.trace.steps;
  REQUIRE(steps.size() == 61);
  std::size_t accepted = 0;
  for (std::size_t i = 1; i < steps.size(); ++i) {
    CHECK(steps[i].step == i);
    CHECK(steps[i].incumbent_rmse <= steps[i - 1].incumbent_rmse);
    CHECK(steps[i].accepted == (steps[i].candidate_rmse < steps[i - 1].incumbent_rmse));
    if (steps[i].accepted) {
      CHECK(steps[i].incumbent_rmse == steps[i].candidate_rmse);
      ++accepted;
    } else {
      CHECK(steps[i].incumbent_rmse == steps[i - 1].incumbent_rmse);
    }
  }
  CHECK(accepted == result.trace.acceptances);
  CHECK(accepted > 0);
  CHECK(result.trace.best_objective < result.trace.initial_objective);
  CHECK(result.model.training_rmse() == result.trace.best_objective);
}

TEST_CASE("mc_optimize: seed determinism and test blindness") {
  const Dataset train = synthetic_dataset(60, 3);
  const Dataset test = synthetic_dataset(40, 4);
  const auto a = mc_optimize(train, 5, kParams, quick_config(30));
  const auto b = mc_optimize(train, 5, kParams, quick_config(30));
  const auto tracked = mc_optimize(train, 5, kParams, quick_config(30), &test);
  std::ostringstream ta, tb;
  write_trace_csv(a.trace, ta);
  write_trace_csv(b.trace, tb);
  CHECK(ta.str() == tb.str());
  CHECK(a.model.weights().matrix() == b.model.weights().matrix());
  CHECK(tracked.model.weights().matrix() == a.model.weights().matrix());
  for (std::size_t i = 0; i < a.trace.steps.size(); ++i) {
    CHECK(tracked.trace.steps[i].accepted == a.trace.steps[i].accepted);
    CHECK(tracked.trace.steps[i].incumbent_rmse == a.trace.steps[i].incumbent_rmse);
    CHECK(tracked.trace.steps[i].test_rmse.has_value());
    CHECK_FALSE(a.trace.steps[i].test_rmse.has_value());
  }
  McConfig other = quick_config(30);
  other.seed = 43;
  const auto c = mc_optimize(train, 5, kParams, other);
  CHECK(c.model.weights().matrix() != a.model.weights().matrix());
}

TEST_CASE("mc_optimize: parallel candidates do not depend on the thread count") {
  const Dataset train = synthetic_dataset(50, 5);
  McConfig cfg = quick_config(10);
  cfg.candidates_per_step = 4;
  const auto serial = mc_optimize(train, 5, kParams, cfg);
  cfg.threads = 3;
  const auto parallel = mc_optimize(train, 5, kParams, cfg);
  CHECK(serial.model.weights().matrix() == parallel.model.weights().matrix());
  for (std::size_t i = 0; i < serial.trace.steps.size(); ++i) {
    CHECK(serial.trace.steps[i].candidate_rmse == parallel.trace.steps[i].candidate_rmse);
  }
}

TEST_CASE("mc_optimize: validation objective") {
  const Dataset train = synthetic_dataset(100, 6);
  McConfig cfg = quick_config(20);
  cfg.objective = Objective::Validation;
  const auto result = mc_optimize(train, 6, kParams, cfg);
  CHECK(result.model.core().train_coordinates().rows() == 80);
  for (std::size_t i = 1; i < result.trace.steps.size(); ++i) {
    CHECK(result.trace.steps[i].incumbent_rmse <= result.trace.steps[i - 1].incumbent_rmse);
  }
  cfg.validation_fraction = 1.0;
  CHECK_THROWS_AS(mc_optimize(train, 6, kParams, cfg), ConfigError);
}

TEST_CASE("mc_optimize: reduced mode and y-rescale off") {
  const Dataset train = synthetic_dataset(60, 7);
  const auto reduced = mc_optimize(train, 2, kParams, quick_config(10));
  CHECK(reduced.model.weights().mode() == CoordinateMode::Reduced);
  McConfig raw = quick_config(10);
  raw.rescale_y = false;
  const auto literal = mc_optimize(train, 6, kParams, raw);
  CHECK(literal.model.y_scaler().min().isZero(0.0));
  CHECK(literal.model.y_scaler().max().isOnes(0.0));
}

TEST_CASE("mc_optimize: configuration errors") {
  const Dataset train = synthetic_dataset(20, 8);
  McConfig cfg = quick_config(1);
  cfg.step_scale = 0.0;
  CHECK_THROWS_AS(mc_optimize(train, 4, kParams, cfg), ConfigError);
  CHECK_THROWS_AS(mc_optimize(train, 0, kParams, quick_config(1)), ConfigError);
}

TEST_CASE("trace csv layout") {
  TrainTrace trace;
  trace.steps.push_back({0, 2.0, 2.0, false, std::nullopt});
  trace.steps.push_back({1, 1.5, 1.5, true, 0.25});
  std::ostringstream out;
  write_trace_csv(trace, out);
  CHECK(out.str() ==
        "step,candidate_rmse,incumbent_rmse,accepted,test_rmse\n0,2,2,0,\n1,1.5,1.5,1,0.25\n");
}

TEST_CASE("sweep_n: one ini and one opt row per N") {
  const Dataset train = synthetic_dataset(60, 9);
  const Dataset test = synthetic_dataset(30, 10);
  const std::vector<std::size_t> ns{2, 5};
  const auto rows = sweep_n(train, test, ns, kParams, quick_config(5));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].terms == 2);
  CHECK(rows[0].variant() == "ini");
  CHECK(rows[1].variant() == "opt");
  CHECK(rows[3].terms == 5);
  CHECK(rows[1].train_rmse <= rows[0].train_rmse);
  std::ostringstream out;
  write_sweep_csv(rows, out);
  CHECK(out.str().rfind("N,variant,train_rmse,test_rmse\n2,ini,", 0) == 0);
  CHECK_THROWS_AS(sweep_n(train, test, std::vector<std::size_t>{}, kParams, quick_config(1)), ConfigError);
}
