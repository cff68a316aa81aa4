#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace gprnn {

/// Feature matrix (M x D) and target vector (M) in application units.
/// Targets are never rescaled anywhere in the library.
struct Dataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd t;
  std::vector<std::string> feature_names;
  std::string target_name = "t";

  std::size_t size() const noexcept { return static_cast<std::size_t>(x.rows()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(x.cols()); }

  /// Throws DataError unless M >= 1, D >= 1, shapes agree and all entries are finite.
  void validate() const;

  /// Rows at the given indices, in that order.
  Dataset rows(const std::vector<std::size_t>& indices) const;
};

/// Reads a header + comma-separated decimal rows file; the last column is the target.
Dataset load_csv(const std::filesystem::path& path);
Dataset read_csv(std::istream& in, const std::string& source_name = "<stream>");

void write_csv(const Dataset& data, std::ostream& out);
void save_csv(const Dataset& data, const std::filesystem::path& path);

struct Split {
  Dataset train;
  Dataset test;
};

/// Seeded random partition. `n_test` == 0 keeps the whole remainder as test,
/// otherwise only the first n_test remaining rows of the permutation.
Split split(const Dataset& data, std::size_t n_train, std::uint64_t seed, std::size_t n_test = 0);

/// Per-feature affine map onto [0,1] fitted on training rows.
class UnitCubeScaler {
 public:
  UnitCubeScaler() = default;
  UnitCubeScaler(Eigen::VectorXd min, Eigen::VectorXd max);

  /// Throws DataError naming the first constant feature.
  static UnitCubeScaler fit(const Eigen::MatrixXd& x, const std::vector<std::string>& names = {});
  static UnitCubeScaler fit(const Dataset& train) { return fit(train.x, train.feature_names); }

  /// No clipping: values outside the training range map outside [0,1].
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Dataset apply(const Dataset& data) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& scaled) const;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(min_.size()); }
  const Eigen::VectorXd& min() const noexcept { return min_; }
  const Eigen::VectorXd& max() const noexcept { return max_; }

 private:
  Eigen::VectorXd min_;
  Eigen::VectorXd max_;
};

// ---------------------------------------------------------------------------
// Coulomb-matrix eigenspectrum descriptors

inline constexpr double kBohrPerAngstrom = 1.8897261254578281;

struct Molecule {
  std::vector<int> atomic_numbers;
  Eigen::MatrixX3d coordinates;  // Angstrom
  double target = 0.0;

  std::size_t atom_count() const noexcept { return atomic_numbers.size(); }
  void validate() const;
};

/// Z for H, C, N, O, F; throws DataError otherwise.
int atomic_number(const std::string& symbol);

/// Parses one XYZ block (count line, comment line, "Symbol x y z" lines).
Molecule read_xyz(std::istream& in, const std::string& source_name = "<stream>");
Molecule load_xyz(const std::filesystem::path& path);

/// C_ii = 0.5 Z_i^2.4, C_ij = Z_i Z_j / |R_i - R_j| with distances in Bohr.
Eigen::MatrixXd coulomb_matrix(const Molecule& mol);

/// Eigenvalues of the Coulomb matrix in descending order.
Eigen::VectorXd ecm(const Molecule& mol);

}  // namespace gprnn
