#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gprnn/coords.hpp"
#include "gprnn/features.hpp"
#include "gprnn/gpr.hpp"
#include "gprnn/kernel.hpp"

namespace gprnn {

enum class Objective { Train, Validation };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view text);

struct McConfig {
  double step_scale = 0.05;
  std::size_t max_steps = 2000;
  Objective objective = Objective::Train;
  /// Share of the training rows held out when objective == Validation.
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
  std::size_t candidates_per_step = 1;
  /// Worker threads for candidate fits; results do not depend on it.
  std::size_t threads = 1;
  bool rescale_y = true;

  void validate() const;
};

struct TraceStep {
  std::size_t step = 0;
  double candidate_rmse = 0.0;  // +inf when every candidate was degenerate
  double incumbent_rmse = 0.0;  // after this step's decision
  bool accepted = false;
  std::optional<double> test_rmse;  // incumbent model on the tracked test set
};

/// Row 0 holds the initial (unoptimized) model; rows 1..steps the MC steps.
struct TrainTrace {
  std::vector<TraceStep> steps;
  std::size_t steps_run = 0;
  std::size_t acceptances = 0;
  std::size_t invalid_candidates = 0;
  double initial_objective = 0.0;
  double best_objective = 0.0;
};

void write_trace_csv(const TrainTrace& trace, std::ostream& out);

/// Adds r_i R_i c to every row i: r_i uniform on the unit sphere, R_i
/// uniform on [0,1]. Each row gets an independent draw.
WeightMatrix perturb(const WeightMatrix& w, double step_scale, std::mt19937_64& rng);

/// Independent RNG stream for one candidate of one step.
std::mt19937_64 candidate_rng(std::uint64_t seed, std::size_t step, std::size_t candidate);

struct McResult {
  GprModel model;
  TrainTrace trace;
};

/// Monte Carlo optimization of the redundant-coordinate weights.
///
/// Starts from build_initial_weights(D, N) and refits the GPR from scratch
/// for every candidate W. The best candidate of a step replaces the
/// incumbent only when its objective rmse is strictly lower. Candidates
/// whose coordinates degenerate or whose fit fails are rejected and
/// counted. In validation mode the training rows are split once (seeded)
/// into a fit part, on which scalers and GPR are fitted, and a validation
/// part that drives acceptance. `track_test` is observed only.
McResult mc_optimize(const Dataset& train, std::size_t terms, const KernelParams& params,
                     const McConfig& config, const Dataset* track_test = nullptr);

struct SweepRow {
  std::size_t terms = 0;
  bool optimized = false;
  double train_rmse = 0.0;
  double test_rmse = 0.0;

  std::string_view variant() const noexcept { return optimized ? "opt" : "ini"; }
};

/// For each N: an unoptimized ("ini", zero MC steps) and an optimized
/// ("opt") run, both seeded with config.seed. Train rmse is over all of
/// `train`.
std::vector<SweepRow> sweep_n(const Dataset& train, const Dataset& test,
                              std::span<const std::size_t> terms_list, const KernelParams& params,
                              const McConfig& config);

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out);

}  // namespace gprnn
