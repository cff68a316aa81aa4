#include "gprnn/model_io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "gprnn/error.hpp"
#include "gprnn/numeric_format.hpp"

namespace gprnn {
namespace {

void write_row(std::ostream& out, const auto& row) {
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (i) out << ' ';
    out << format_double(row(i));
  }
  out << '\n';
}

void write_block(std::ostream& out, const char* name, const Eigen::MatrixXd& m) {
  out << name << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) write_row(out, m.row(r));
}

void write_block(std::ostream& out, const char* name, const Eigen::VectorXd& v) {
  out << name << '\n';
  write_row(out, v.transpose());
}

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  bool next_line(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw DataError(source_ + ":" + std::to_string(line_no_) + ": " + msg);
  }

  void expect_block(const std::string& name) {
    std::string line;
    if (!next_line(line)) fail("unexpected end of file, expected block '" + name + "'");
    if (line != name) fail("expected block '" + name + "', found '" + line + "'");
  }

  Eigen::MatrixXd read_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    std::string line;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (!next_line(line)) fail("unexpected end of file inside matrix block");
      std::istringstream fields(line);
      for (Eigen::Index c = 0; c < cols; ++c) {
        std::string tok;
        if (!(fields >> tok)) fail("matrix row has fewer than " + std::to_string(cols) + " values");
        m(r, c) = parse(tok);
      }
      std::string extra;
      if (fields >> extra) fail("matrix row has more than " + std::to_string(cols) + " values");
    }
    return m;
  }

  Eigen::VectorXd read_vector(Eigen::Index n) { return read_matrix(1, n).row(0).transpose(); }

  double parse(const std::string& tok) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      fail("invalid number '" + tok + "'");
    }
    if (used != tok.size()) fail("invalid number '" + tok + "'");
    return v;
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_model(const GprModel& model, const Provenance& provenance, std::ostream& out) {
  out << "format " << kModelFormat << '\n';
  out << "dimension " << model.dimension() << '\n';
  out << "terms " << model.terms() << '\n';
  out << "training_points " << model.core().train_coordinates().rows() << '\n';
  out << "mode " << to_string(model.weights().mode()) << '\n';
  out << "length " << format_double(model.params().length) << '\n';
  out << "noise " << format_double(model.params().noise) << '\n';
  out << "y_rescale " << (provenance.rescale_y ? "on" : "off") << '\n';
  out << "training_rmse " << format_double(model.training_rmse()) << '\n';
  out << "seed " << provenance.seed << '\n';
  out << "config " << provenance.config << '\n';
  out << "timestamp " << provenance.timestamp << '\n';
  write_block(out, "x_min", model.x_scaler().min());
  write_block(out, "x_max", model.x_scaler().max());
  write_block(out, "weights", model.weights().matrix());
  write_block(out, "y_min", model.y_scaler().min());
  write_block(out, "y_max", model.y_scaler().max());
  write_block(out, "train_coordinates", model.core().train_coordinates());
  write_block(out, "alpha", model.core().alpha());
  out << "end\n";
}

void save_model(const GprModel& model, const Provenance& provenance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file " + path.string());
  write_model(model, provenance, out);
  if (!out) throw DataError("failed writing model file " + path.string());
}

LoadedModel read_model(std::istream& in, const std::string& source_name) {
  Reader reader(in, source_name);
  std::map<std::string, std::string> header;
  std::string line;
  if (!reader.next_line(line)) reader.fail("empty model file");
  {
    const auto space = line.find(' ');
    if (line.substr(0, space) != "format") reader.fail("missing format tag");
    const std::string tag = space == std::string::npos ? "" : line.substr(space + 1);
    if (tag != kModelFormat) reader.fail("unsupported model format '" + tag + "' (expected " + kModelFormat + ")");
  }
  const char* keys[] = {"dimension", "terms", "training_points", "mode", "length", "noise",
                        "y_rescale", "training_rmse", "seed", "config", "timestamp"};
  for (const char* key : keys) {
    if (!reader.next_line(line)) reader.fail("unexpected end of header");
    const auto space = line.find(' ');
    const std::string k = line.substr(0, space);
    if (k != key) reader.fail("expected header key '" + std::string(key) + "', found '" + k + "'");
    header[k] = space == std::string::npos ? "" : line.substr(space + 1);
  }

  auto count = [&](const std::string& key) -> Eigen::Index {
    const double v = reader.parse(header[key]);
    if (!(v >= 1.0) || v != std::floor(v)) reader.fail("invalid " + key + " '" + header[key] + "'");
    return static_cast<Eigen::Index>(v);
  };
  const Eigen::Index d = count("dimension");
  const Eigen::Index n = count("terms");
  const Eigen::Index m = count("training_points");

  Provenance provenance;
  provenance.seed = std::stoull(header["seed"]);
  provenance.config = header["config"];
  provenance.timestamp = header["timestamp"];
  if (header["y_rescale"] != "on" && header["y_rescale"] != "off") reader.fail("invalid y_rescale value");
  provenance.rescale_y = header["y_rescale"] == "on";

  KernelParams params{reader.parse(header["length"]), reader.parse(header["noise"])};

  reader.expect_block("x_min");
  Eigen::VectorXd x_min = reader.read_vector(d);
  reader.expect_block("x_max");
  Eigen::VectorXd x_max = reader.read_vector(d);
  reader.expect_block("weights");
  Eigen::MatrixXd w = reader.read_matrix(n, d);
  reader.expect_block("y_min");
  Eigen::VectorXd y_min = reader.read_vector(n);
  reader.expect_block("y_max");
  Eigen::VectorXd y_max = reader.read_vector(n);
  reader.expect_block("train_coordinates");
  Eigen::MatrixXd y_train = reader.read_matrix(m, n);
  reader.expect_block("alpha");
  Eigen::VectorXd alpha = reader.read_vector(m);
  reader.expect_block("end");

  try {
    GprModel model(UnitCubeScaler(std::move(x_min), std::move(x_max)),
                   WeightMatrix(std::move(w), parse_coordinate_mode(header["mode"])),
                   YScaler(std::move(y_min), std::move(y_max)),
                   GprCore(std::move(y_train), std::move(alpha), params),
                   reader.parse(header["training_rmse"]));
    return {std::move(model), std::move(provenance)};
  } catch (const Error& e) {
    throw DataError(source_name + ": inconsistent model: " + e.what());
  }
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file " + path.string());
  return read_model(in, path.string());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace gprnn
