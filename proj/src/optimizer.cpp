#include "gprnn/optimizer.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <ostream>

#include "gprnn/error.hpp"
#include "gprnn/numeric_format.hpp"

namespace gprnn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller on our own uniforms so draws do not depend on the standard
// library's distribution implementations.
double standard_normal(std::mt19937_64& rng) {
  double u1 = 0.0;
  do {
    u1 = uniform01(rng);
  } while (u1 == 0.0);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

struct Evaluation {
  std::optional<GprModel> model;
  double objective = kInf;
};

class Problem {
 public:
  Problem(const Dataset& train, const KernelParams& params, const McConfig& config)
      : params_(params), config_(config) {
    if (config.objective == Objective::Validation) {
      const std::size_t m = train.size();
      const auto n_fit = static_cast<std::size_t>(
          std::llround(static_cast<double>(m) * (1.0 - config.validation_fraction)));
      if (n_fit < 1 || n_fit >= m) {
        throw ConfigError("validation split leaves an empty fit or validation part (M = " +
                          std::to_string(m) + ")");
      }
      auto parts = split(train, n_fit, config.seed);
      fit_ = std::move(parts.train);
      validation_ = std::move(parts.test);
    } else {
      fit_ = train;
    }
    x_scaler_ = UnitCubeScaler::fit(fit_);
    x_fit_ = x_scaler_.apply(fit_.x);
  }

  // Throws on failure.
  Evaluation evaluate(const WeightMatrix& w) const {
    Evaluation e;
    e.model = GprModel::fit(x_scaler_, w, x_fit_, fit_.t, params_, config_.rescale_y);
    e.objective = config_.objective == Objective::Train
                      ? e.model->training_rmse()
                      : rmse(e.model->predict(validation_.x), validation_.t);
    return e;
  }

  // Failures become an infinite objective.
  Evaluation try_evaluate(const WeightMatrix& incumbent, std::size_t step, std::size_t candidate) const {
    auto rng = candidate_rng(config_.seed, step, candidate);
    try {
      const WeightMatrix w = perturb(incumbent, config_.step_scale, rng);
      return evaluate(w);
    } catch (const NumericalError&) {
      return {};
    }
  }

  std::size_t dimension() const { return fit_.dimension(); }

 private:
  KernelParams params_;
  McConfig config_;
  Dataset fit_;
  Dataset validation_;
  UnitCubeScaler x_scaler_;
  Eigen::MatrixXd x_fit_;
};

}  // namespace

std::string_view to_string(Objective objective) {
  return objective == Objective::Train ? "train" : "validation";
}

Objective parse_objective(std::string_view text) {
  if (text == "train") return Objective::Train;
  if (text == "validation") return Objective::Validation;
  throw ConfigError("objective must be 'train' or 'validation', got '" + std::string(text) + "'");
}

void McConfig::validate() const {
  if (!std::isfinite(step_scale) || !(step_scale > 0.0)) {
    throw ConfigError("MC step scale must be positive, got " + format_short(step_scale));
  }
  if (candidates_per_step < 1) throw ConfigError("candidates per step must be at least 1");
  if (threads < 1) throw ConfigError("thread count must be at least 1");
  if (objective == Objective::Validation && !(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation fraction must lie in (0,1), got " + format_short(validation_fraction));
  }
}

std::mt19937_64 candidate_rng(std::uint64_t seed, std::size_t step, std::size_t candidate) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(step));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(candidate) << 32));
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

WeightMatrix perturb(const WeightMatrix& w, double step_scale, std::mt19937_64& rng) {
  Eigen::MatrixXd out = w.matrix();
  const Eigen::Index d = out.cols();
  Eigen::VectorXd r(d);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double norm = 0.0;
    do {
      for (Eigen::Index k = 0; k < d; ++k) r(k) = standard_normal(rng);
      norm = r.norm();
    } while (norm == 0.0);
    const double radius = uniform01(rng);
    out.row(i) += (r / norm * (radius * step_scale)).transpose();
  }
  return WeightMatrix(std::move(out), w.mode());
}

McResult mc_optimize(const Dataset& train, std::size_t terms, const KernelParams& params,
                     const McConfig& config, const Dataset* track_test) {
  config.validate();
  params.validate();
  train.validate();
  if (track_test != nullptr && track_test->dimension() != train.dimension()) {
    throw DataError("tracked test set has " + std::to_string(track_test->dimension()) +
                    " features, training set " + std::to_string(train.dimension()));
  }
  const Problem problem(train, params, config);

  WeightMatrix incumbent_w = build_initial_weights(problem.dimension(), terms);
  Evaluation incumbent = problem.evaluate(incumbent_w);

  auto test_rmse = [&](const GprModel& model) -> std::optional<double> {
    if (track_test == nullptr) return std::nullopt;
    return rmse(model.predict(track_test->x), track_test->t);
  };

  TrainTrace trace;
  trace.initial_objective = incumbent.objective;
  std::optional<double> incumbent_test = test_rmse(*incumbent.model);
  trace.steps.push_back({0, incumbent.objective, incumbent.objective, false, incumbent_test});

  const std::size_t n_candidates = config.candidates_per_step;
  std::vector<Evaluation> candidates(n_candidates);
  for (std::size_t step = 1; step <= config.max_steps; ++step) {
    if (config.threads > 1 && n_candidates > 1) {
      for (std::size_t begin = 0; begin < n_candidates; begin += config.threads) {
        const std::size_t end = std::min(n_candidates, begin + config.threads);
        std::vector<std::future<Evaluation>> jobs;
        for (std::size_t c = begin; c < end; ++c) {
          jobs.push_back(std::async(std::launch::async, [&, c] {
            return problem.try_evaluate(incumbent_w, step, c);
          }));
        }
        for (std::size_t c = begin; c < end; ++c) candidates[c] = jobs[c - begin].get();
      }
    } else {
      for (std::size_t c = 0; c < n_candidates; ++c) candidates[c] = problem.try_evaluate(incumbent_w, step, c);
    }

    std::size_t best = 0;
    for (std::size_t c = 0; c < n_candidates; ++c) {
      if (!candidates[c].model) ++trace.invalid_candidates;
      if (candidates[c].objective < candidates[best].objective) best = c;
    }
    const double candidate_rmse = candidates[best].objective;
    const bool accepted = candidate_rmse < incumbent.objective;
    if (accepted) {
      incumbent = std::move(candidates[best]);
      incumbent_w = incumbent.model->weights();
      incumbent_test = test_rmse(*incumbent.model);
      ++trace.acceptances;
    }
    trace.steps.push_back({step, candidate_rmse, incumbent.objective, accepted, incumbent_test});
    trace.steps_run = step;
  }
  trace.best_objective = incumbent.objective;
  return {std::move(*incumbent.model), std::move(trace)};
}

void write_trace_csv(const TrainTrace& trace, std::ostream& out) {
  out << "step,candidate_rmse,incumbent_rmse,accepted,test_rmse\n";
  for (const auto& s : trace.steps) {
    out << s.step << ',' << format_double(s.candidate_rmse) << ',' << format_double(s.incumbent_rmse)
        << ',' << (s.accepted ? 1 : 0) << ',';
    if (s.test_rmse) out << format_double(*s.test_rmse);
    out << '\n';
  }
}

std::vector<SweepRow> sweep_n(const Dataset& train, const Dataset& test,
                              std::span<const std::size_t> terms_list, const KernelParams& params,
                              const McConfig& config) {
  if (terms_list.empty()) throw ConfigError("sweep needs at least one N value");
  test.validate();
  std::vector<SweepRow> rows;
  rows.reserve(2 * terms_list.size());
  for (const std::size_t n : terms_list) {
    if (n < 1) throw ConfigError("N values must be at least 1");
    for (const bool optimized : {false, true}) {
      McConfig run = config;
      if (!optimized) run.max_steps = 0;
      const McResult result = mc_optimize(train, n, params, run);
      rows.push_back({n, optimized, rmse(result.model.predict(train.x), train.t),
                      rmse(result.model.predict(test.x), test.t)});
    }
  }
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out) {
  out << "N,variant,train_rmse,test_rmse\n";
  for (const auto& r : rows) {
    out << r.terms << ',' << r.variant() << ',' << format_double(r.train_rmse) << ','
        << format_double(r.test_rmse) << '\n';
  }
}

}  // namespace gprnn
