#include "gprnn/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "gprnn/error.hpp"
#include "gprnn/features.hpp"
#include "gprnn/gpr.hpp"
#include "gprnn/model_io.hpp"
#include "gprnn/numeric_format.hpp"
#include "gprnn/optimizer.hpp"

namespace gprnn::cli {
namespace {

namespace fs = std::filesystem;

// Error raised while a particular pipeline stage runs.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const Error& cause)
      : Error(cause.kind(), stage + ": " + cause.what()) {}
};

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

struct McFlags {
  std::size_t mc_steps = 2000;
  double mc_scale = 0.05;
  std::uint64_t seed = 0;
  std::string objective = "train";
  double validation_fraction = 0.2;
  std::size_t candidates = 1;
  std::size_t threads = 1;
  std::string y_rescale = "on";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--mc-steps", mc_steps, "Maximum Monte Carlo steps (0 = unoptimized GPRNN)")
        ->capture_default_str();
    cmd.add_option("--mc-scale", mc_scale, "MC step scale c")->capture_default_str();
    cmd.add_option("--seed", seed, "RNG seed")->capture_default_str();
    cmd.add_option("--objective", objective, "Acceptance objective")
        ->check(CLI::IsMember({"train", "validation"}))
        ->capture_default_str();
    cmd.add_option("--validation-fraction", validation_fraction,
                   "Held-out share of training rows in validation mode")
        ->capture_default_str();
    cmd.add_option("--candidates", candidates, "Candidates evaluated per MC step")->capture_default_str();
    cmd.add_option("--threads", threads, "Worker threads for candidate fits")->capture_default_str();
    cmd.add_option("--y-rescale", y_rescale, "Rescale redundant coordinates to [0,1]")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
  }

  McConfig config() const {
    McConfig cfg;
    cfg.max_steps = mc_steps;
    cfg.step_scale = mc_scale;
    cfg.seed = seed;
    cfg.objective = parse_objective(objective);
    cfg.validation_fraction = validation_fraction;
    cfg.candidates_per_step = candidates;
    cfg.threads = threads;
    cfg.rescale_y = y_rescale == "on";
    cfg.validate();
    return cfg;
  }
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

// Echo of the parsed flags for the model provenance block.
std::string config_echo(const std::vector<std::string>& args) {
  std::string echo;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (i > 1) echo += ' ';
    echo += args[i];
  }
  std::replace(echo.begin(), echo.end(), '\n', ' ');
  return echo;
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size() || v < 1) {
      throw ConfigError("--n-list entries must be positive integers, got '" + item + "'");
    }
    values.push_back(static_cast<std::size_t>(v));
  }
  if (values.empty()) throw ConfigError("--n-list is empty");
  return values;
}

// ---------------------------------------------------------------------------

struct TrainCommand {
  std::string data, out, trace, test;
  std::size_t terms = 0;
  KernelParams params;
  McFlags mc;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Fit a GPRNN / opt-GPRNN model");
    cmd->add_option("--data", data, "Training CSV")->required();
    cmd->add_option("--n", terms, "Number of redundant coordinates N")->required();
    cmd->add_option("--length", params.length, "RBF length parameter")->required();
    cmd->add_option("--noise", params.noise, "Noise (diagonal regularization)")->required();
    cmd->add_option("--out", out, "Model output path")->required();
    cmd->add_option("--trace", trace, "Trace CSV output path");
    cmd->add_option("--test", test, "Test CSV, tracked for reporting only");
    mc.add_to(*cmd);
  }

  int run(const std::vector<std::string>& args, std::ostream& os) const {
    const McConfig cfg = mc.config();
    params.validate();
    const Dataset train = stage("loading training data", [&] { return load_csv(data); });
    std::optional<Dataset> test_data;
    if (!test.empty()) test_data = stage("loading test data", [&] { return load_csv(test); });
    const McResult result = stage("training", [&] {
      return mc_optimize(train, terms, params, cfg, test_data ? &*test_data : nullptr);
    });
    stage("writing model", [&] {
      save_model(result.model, {cfg.seed, config_echo(args), utc_timestamp(), cfg.rescale_y}, out);
      return 0;
    });
    if (!trace.empty()) {
      stage("writing trace", [&] {
        auto f = open_output(trace);
        write_trace_csv(result.trace, f);
        return 0;
      });
    }
    os << "train_rmse=" << format_double(rmse(result.model.predict(train.x), train.t)) << '\n';
    if (test_data) {
      os << "test_rmse=" << format_double(rmse(result.model.predict(test_data->x), test_data->t)) << '\n';
    }
    os << "steps=" << result.trace.steps_run << '\n';
    os << "accepted=" << result.trace.acceptances << '\n';
    return kSuccess;
  }
};

struct EvalCommand {
  std::string model, data, predictions;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "Evaluate a saved model on a CSV dataset");
    cmd->add_option("--model", model, "Model file")->required();
    cmd->add_option("--data", data, "Dataset CSV")->required();
    cmd->add_option("--predictions", predictions, "Optional CSV of per-row predictions");
  }

  int run(std::ostream& os) const {
    const LoadedModel loaded = stage("loading model", [&] { return load_model(model); });
    const Dataset ds = stage("loading data", [&] { return load_csv(data); });
    if (ds.dimension() != loaded.model.dimension()) {
      throw DataError("dataset has " + std::to_string(ds.dimension()) + " features, model expects " +
                      std::to_string(loaded.model.dimension()));
    }
    const Eigen::VectorXd pred = stage("predicting", [&] { return loaded.model.predict(ds.x); });
    if (!predictions.empty()) {
      auto f = open_output(predictions);
      f << "prediction,truth\n";
      for (Eigen::Index i = 0; i < pred.size(); ++i) {
        f << format_double(pred(i)) << ',' << format_double(ds.t(i)) << '\n';
      }
    }
    os << "test_rmse=" << format_double(rmse(pred, ds.t)) << '\n';
    return kSuccess;
  }
};

struct SweepCommand {
  std::string data, test, n_list, out;
  KernelParams params;
  McFlags mc;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("sweep", "Train ini/opt models over a list of N values");
    cmd->add_option("--data", data, "Training CSV")->required();
    cmd->add_option("--test", test, "Test CSV")->required();
    cmd->add_option("--n-list", n_list, "Comma-separated N values")->required();
    cmd->add_option("--length", params.length, "RBF length parameter")->required();
    cmd->add_option("--noise", params.noise, "Noise (diagonal regularization)")->required();
    cmd->add_option("--out", out, "Sweep CSV output path")->required();
    mc.add_to(*cmd);
  }

  int run(std::ostream& os) const {
    const McConfig cfg = mc.config();
    params.validate();
    const auto terms = parse_n_list(n_list);
    const Dataset train = stage("loading training data", [&] { return load_csv(data); });
    const Dataset test_data = stage("loading test data", [&] { return load_csv(test); });
    const auto rows = stage("sweeping", [&] { return sweep_n(train, test_data, terms, params, cfg); });
    auto f = open_output(out);
    write_sweep_csv(rows, f);
    write_sweep_csv(rows, os);
    return kSuccess;
  }
};

struct SplitCommand {
  std::string data, train_out, test_out;
  std::size_t n_train = 0, n_test = 0;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("split", "Seeded random train/test split of a CSV dataset");
    cmd->add_option("--data", data, "Dataset CSV")->required();
    cmd->add_option("--n-train", n_train, "Training rows")->required();
    cmd->add_option("--n-test", n_test, "Test rows drawn from the remainder (0 = all)")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
    cmd->add_option("--train-out", train_out, "Training CSV output")->required();
    cmd->add_option("--test-out", test_out, "Test CSV output")->required();
  }

  int run(std::ostream& os) const {
    const Dataset all = stage("loading data", [&] { return load_csv(data); });
    const Split parts = split(all, n_train, seed, n_test);
    save_csv(parts.train, train_out);
    save_csv(parts.test, test_out);
    os << "train_rows=" << parts.train.size() << "\ntest_rows=" << parts.test.size() << '\n';
    return kSuccess;
  }
};

struct FeaturizeCommand {
  std::string xyz_dir, targets, out;
  std::size_t atoms = 0;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("featurize-ecm", "Coulomb-matrix eigenspectrum features from XYZ files");
    cmd->add_option("--xyz-dir", xyz_dir, "Directory of XYZ files")->required();
    cmd->add_option("--targets", targets, "CSV mapping file name to target (header: file,<target>)")
        ->required();
    cmd->add_option("--atoms", atoms, "Required atom count A")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--out", out, "Feature CSV output path")->required();
  }

  int run(std::ostream& os, std::ostream& es) const {
    std::ifstream tf(targets);
    if (!tf) throw DataError("cannot open " + targets);
    std::string line;
    std::string target_name = "target";
    if (std::getline(tf, line)) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw DataError(targets + ":1: expected header 'file,<target>'");
      target_name = line.substr(comma + 1);
      if (!target_name.empty() && target_name.back() == '\r') target_name.pop_back();
    }
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> values;
    std::size_t skipped_size = 0, failed = 0, line_no = 1;
    while (std::getline(tf, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) {
        throw DataError(targets + ":" + std::to_string(line_no) + ": expected 'file,target'");
      }
      const std::string file = line.substr(0, comma);
      double target = 0.0;
      try {
        std::size_t used = 0;
        const std::string tv = line.substr(comma + 1);
        target = std::stod(tv, &used);
        if (used != tv.size()) throw std::invalid_argument(tv);
      } catch (const std::exception&) {
        throw DataError(targets + ":" + std::to_string(line_no) + ": non-numeric target");
      }
      Molecule mol;
      try {
        mol = load_xyz(fs::path(xyz_dir) / file);
      } catch (const Error& e) {
        es << "warning: skipping " << file << ": " << e.what() << '\n';
        ++failed;
        continue;
      }
      if (mol.atom_count() != atoms) {
        es << "warning: skipping " << file << ": " << mol.atom_count() << " atoms, expected " << atoms << '\n';
        ++skipped_size;
        continue;
      }
      rows.push_back(ecm(mol));
      values.push_back(target);
    }
    if (rows.empty()) throw DataError("no molecules with " + std::to_string(atoms) + " atoms were featurized");

    Dataset ds;
    ds.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(atoms));
    ds.t.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ds.x.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      ds.t(static_cast<Eigen::Index>(i)) = values[i];
    }
    for (std::size_t a = 0; a < atoms; ++a) ds.feature_names.push_back("e" + std::to_string(a + 1));
    ds.target_name = target_name;
    save_csv(ds, out);
    os << "rows=" << rows.size() << "\nskipped_atom_count=" << skipped_size << "\nunparseable=" << failed
       << '\n';
    return kSuccess;
  }
};

struct ComponentsCommand {
  std::string model, out, summary;
  std::size_t grid = 101;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("components", "Export component functions f_n and their magnitudes");
    cmd->add_option("--model", model, "Model file")->required();
    cmd->add_option("--grid", grid, "Grid points K on [0,1]")->capture_default_str();
    cmd->add_option("--out", out, "Long-format curve CSV (n,g,value)")->required();
    cmd->add_option("--summary", summary, "Magnitude CSV (default: <out stem>_magnitudes.csv)");
  }

  int run(std::ostream& os) const {
    const LoadedModel loaded = stage("loading model", [&] { return load_model(model); });
    const auto g = unit_grid(grid);
    const GprModel& m = loaded.model;
    {
      auto f = open_output(out);
      f << "n,g,value\n";
      for (std::size_t n = 0; n < m.terms(); ++n) {
        const Eigen::VectorXd values = m.component_function(n, g);
        for (std::size_t k = 0; k < g.size(); ++k) {
          f << n + 1 << ',' << format_double(g[k]) << ',' << format_double(values(static_cast<Eigen::Index>(k)))
            << '\n';
        }
      }
    }
    fs::path summary_path = summary;
    if (summary_path.empty()) {
      const fs::path o(out);
      summary_path = o.parent_path() / (o.stem().string() + "_magnitudes.csv");
    }
    const Eigen::VectorXd mags = m.component_magnitudes(g);
    auto f = open_output(summary_path);
    f << "n,magnitude";
    for (std::size_t d = 0; d < m.dimension(); ++d) f << ",w" << d + 1;
    f << '\n';
    for (std::size_t n = 0; n < m.terms(); ++n) {
      f << n + 1 << ',' << format_double(mags(static_cast<Eigen::Index>(n)));
      const auto row = m.weights().matrix().row(static_cast<Eigen::Index>(n));
      for (Eigen::Index d = 0; d < row.size(); ++d) f << ',' << format_double(row(d));
      f << '\n';
    }
    os << "terms=" << m.terms() << "\nsummary=" << summary_path.string() << '\n';
    return kSuccess;
  }
};

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return kUsageError;
    case ErrorKind::Data: return kDataError;
    case ErrorKind::Numerical: return kNumericalError;
  }
  return kDataError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GPR with optimized redundant coordinates (GPRNN / opt-GPRNN)", "gprnn"};
  app.require_subcommand(1);

  TrainCommand train;
  EvalCommand eval;
  SweepCommand sweep;
  SplitCommand split_cmd;
  FeaturizeCommand featurize;
  ComponentsCommand components;
  train.add_to(app);
  eval.add_to(app);
  sweep.add_to(app);
  split_cmd.add_to(app);
  featurize.add_to(app);
  components.add_to(app);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kUsageError;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "train") return train.run(args, out);
    if (name == "eval") return eval.run(out);
    if (name == "sweep") return sweep.run(out);
    if (name == "split") return split_cmd.run(out);
    if (name == "featurize-ecm") return featurize.run(out, err);
    if (name == "components") return components.run(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return status_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace gprnn::cli
