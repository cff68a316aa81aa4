#include "gprnn/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "gprnn/error.hpp"
#include "gprnn/numeric_format.hpp"

namespace gprnn {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string located(const std::string& source, std::size_t line, const std::string& msg) {
  return source + ":" + std::to_string(line) + ": " + msg;
}

}  // namespace

void Dataset::validate() const {
  if (x.rows() < 1) throw DataError("dataset has no rows");
  if (x.cols() < 1) throw DataError("dataset has no feature columns");
  if (x.rows() != t.size()) throw DataError("feature row count differs from target length");
  if (!x.allFinite() || !t.allFinite()) throw DataError("dataset contains non-finite values");
}

Dataset Dataset::rows(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(indices.size()), x.cols());
  out.t.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = static_cast<Eigen::Index>(indices[i]);
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(src);
    out.t(static_cast<Eigen::Index>(i)) = t(src);
  }
  out.feature_names = feature_names;
  out.target_name = target_name;
  return out;
}

Dataset read_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, header_line)) {
    ++line_no;
    if (!trim(header_line).empty()) break;
  }
  if (trim(header_line).empty()) throw DataError(located(source_name, line_no, "empty file"));
  // Strip a UTF-8 byte order mark.
  if (header_line.rfind("\xEF\xBB\xBF", 0) == 0) header_line.erase(0, 3);
  header = split_fields(header_line);
  if (header.size() < 2) {
    throw DataError(located(source_name, line_no, "header needs at least one feature and a target"));
  }
  const std::size_t width = header.size();

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != width) {
      throw DataError(located(source_name, line_no,
                              "expected " + std::to_string(width) + " fields, found " +
                                  std::to_string(fields.size())));
    }
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw DataError(located(source_name, line_no,
                                "non-numeric field '" + std::string(fields[c]) + "' in column " +
                                    std::to_string(c + 1)));
      }
      if (!std::isfinite(v)) throw DataError(located(source_name, line_no, "non-finite value"));
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw DataError(source_name + ": no data rows");

  Dataset data;
  const auto d = static_cast<Eigen::Index>(width - 1);
  data.x.resize(static_cast<Eigen::Index>(rows), d);
  data.t.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      data.x(static_cast<Eigen::Index>(r), c) = values[r * width + static_cast<std::size_t>(c)];
    }
    data.t(static_cast<Eigen::Index>(r)) = values[r * width + width - 1];
  }
  for (std::size_t c = 0; c + 1 < width; ++c) data.feature_names.emplace_back(header[c]);
  data.target_name = std::string(header.back());
  return data;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_csv(in, path.string());
}

void write_csv(const Dataset& data, std::ostream& out) {
  for (std::size_t c = 0; c < data.dimension(); ++c) {
    out << (c < data.feature_names.size() ? data.feature_names[c] : "x" + std::to_string(c + 1))
        << ',';
  }
  out << data.target_name << '\n';
  for (Eigen::Index r = 0; r < data.x.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.x.cols(); ++c) out << format_double(data.x(r, c)) << ',';
    out << format_double(data.t(r)) << '\n';
  }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv(data, out);
}

Split split(const Dataset& data, std::size_t n_train, std::uint64_t seed, std::size_t n_test) {
  const std::size_t m = data.size();
  if (n_train < 1 || n_train >= m) {
    throw ConfigError("n_train must be in [1, " + std::to_string(m - 1) + "], got " +
                      std::to_string(n_train));
  }
  if (n_test > m - n_train) {
    throw ConfigError("n_test " + std::to_string(n_test) + " exceeds the " +
                      std::to_string(m - n_train) + " rows left after the training split");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Explicit Fisher-Yates so the permutation does not depend on the
  // standard library's shuffle implementation.
  std::mt19937_64 rng(seed);
  for (std::size_t i = m - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  const std::size_t test_end = n_test == 0 ? m : n_train + n_test;
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                                    order.begin() + static_cast<std::ptrdiff_t>(test_end));
  return {data.rows(train_idx), data.rows(test_idx)};
}

// ---------------------------------------------------------------------------

UnitCubeScaler::UnitCubeScaler(Eigen::VectorXd min, Eigen::VectorXd max)
    : min_(std::move(min)), max_(std::move(max)) {
  if (min_.size() != max_.size()) throw DataError("scaler min/max lengths differ");
  for (Eigen::Index d = 0; d < min_.size(); ++d) {
    if (!(max_(d) > min_(d))) {
      throw DataError("scaler range for feature " + std::to_string(d + 1) + " is empty");
    }
  }
}

UnitCubeScaler UnitCubeScaler::fit(const Eigen::MatrixXd& x, const std::vector<std::string>& names) {
  if (x.rows() < 1) throw DataError("cannot fit a scaler on zero rows");
  Eigen::VectorXd lo = x.colwise().minCoeff().transpose();
  Eigen::VectorXd hi = x.colwise().maxCoeff().transpose();
  for (Eigen::Index d = 0; d < x.cols(); ++d) {
    if (!(hi(d) > lo(d))) {
      const auto idx = static_cast<std::size_t>(d);
      const std::string name =
          idx < names.size() ? names[idx] : "#" + std::to_string(d + 1);
      throw DataError("feature " + name + " is constant over the training set");
    }
  }
  return UnitCubeScaler(std::move(lo), std::move(hi));
}

Eigen::MatrixXd UnitCubeScaler::apply(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != dimension()) {
    throw DataError("scaler expects " + std::to_string(dimension()) + " features, got " +
                    std::to_string(x.cols()));
  }
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index d = 0; d < x.cols(); ++d) {
    out.col(d) = (x.col(d).array() - min_(d)) / (max_(d) - min_(d));
  }
  return out;
}

Dataset UnitCubeScaler::apply(const Dataset& data) const {
  Dataset out = data;
  out.x = apply(data.x);
  return out;
}

Eigen::MatrixXd UnitCubeScaler::invert(const Eigen::MatrixXd& scaled) const {
  if (static_cast<std::size_t>(scaled.cols()) != dimension()) {
    throw DataError("scaler dimension mismatch on invert");
  }
  Eigen::MatrixXd out(scaled.rows(), scaled.cols());
  for (Eigen::Index d = 0; d < scaled.cols(); ++d) {
    out.col(d) = scaled.col(d).array() * (max_(d) - min_(d)) + min_(d);
  }
  return out;
}

// ---------------------------------------------------------------------------

void Molecule::validate() const {
  const auto a = static_cast<Eigen::Index>(atomic_numbers.size());
  if (a < 1) throw DataError("molecule has no atoms");
  if (coordinates.rows() != a) throw DataError("coordinate rows differ from atom count");
  if (!coordinates.allFinite()) throw DataError("molecule has non-finite coordinates");
  for (int z : atomic_numbers) {
    if (z < 1) throw DataError("atomic numbers must be positive");
  }
  for (Eigen::Index i = 0; i < a; ++i) {
    for (Eigen::Index j = i + 1; j < a; ++j) {
      if ((coordinates.row(i) - coordinates.row(j)).norm() <= 1e-6) {
        throw DataError("singular geometry: atoms " + std::to_string(i + 1) + " and " +
                        std::to_string(j + 1) + " coincide");
      }
    }
  }
}

int atomic_number(const std::string& symbol) {
  if (symbol == "H") return 1;
  if (symbol == "C") return 6;
  if (symbol == "N") return 7;
  if (symbol == "O") return 8;
  if (symbol == "F") return 9;
  throw DataError("unsupported element '" + symbol + "' (expected H, C, N, O or F)");
}

Molecule read_xyz(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source_name + ": empty XYZ input");
  std::size_t count = 0;
  {
    const auto s = trim(line);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), count);
    if (ec != std::errc() || ptr != s.data() + s.size() || count == 0) {
      throw DataError(source_name + ":1: invalid atom count '" + std::string(s) + "'");
    }
  }
  if (!std::getline(in, line)) throw DataError(source_name + ": missing comment line");

  Molecule mol;
  mol.atomic_numbers.reserve(count);
  mol.coordinates.resize(static_cast<Eigen::Index>(count), 3);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) {
      throw DataError(source_name + ": expected " + std::to_string(count) + " atom lines, found " +
                      std::to_string(i));
    }
    std::istringstream fields(line);
    std::string symbol;
    std::string coord[3];
    fields >> symbol >> coord[0] >> coord[1] >> coord[2];
    if (symbol.empty() || coord[2].empty()) {
      throw DataError(source_name + ":" + std::to_string(i + 3) + ": malformed atom line");
    }
    mol.atomic_numbers.push_back(atomic_number(symbol));
    for (int k = 0; k < 3; ++k) {
      double v = 0.0;
      // QM9 files write some exponents Fortran-style (e.g. 1.2*^-6).
      std::string text = coord[k];
      if (const auto pos = text.find("*^"); pos != std::string::npos) text.replace(pos, 2, "e");
      if (!parse_double(text, v)) {
        throw DataError(source_name + ":" + std::to_string(i + 3) + ": bad coordinate '" +
                        coord[k] + "'");
      }
      mol.coordinates(static_cast<Eigen::Index>(i), k) = v;
    }
  }
  mol.validate();
  return mol;
}

Molecule load_xyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_xyz(in, path.string());
}

Eigen::MatrixXd coulomb_matrix(const Molecule& mol) {
  mol.validate();
  const auto a = static_cast<Eigen::Index>(mol.atom_count());
  Eigen::MatrixXd c(a, a);
  for (Eigen::Index i = 0; i < a; ++i) {
    const double zi = mol.atomic_numbers[static_cast<std::size_t>(i)];
    c(i, i) = 0.5 * std::pow(zi, 2.4);
    for (Eigen::Index j = i + 1; j < a; ++j) {
      const double zj = mol.atomic_numbers[static_cast<std::size_t>(j)];
      const double r = (mol.coordinates.row(i) - mol.coordinates.row(j)).norm() * kBohrPerAngstrom;
      c(i, j) = c(j, i) = zi * zj / r;
    }
  }
  return c;
}

Eigen::VectorXd ecm(const Molecule& mol) {
  const Eigen::MatrixXd c = coulomb_matrix(mol);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("Coulomb matrix eigensolver failed");
  // Eigen returns ascending order.
  return solver.eigenvalues().reverse();
}

}  // namespace gprnn
