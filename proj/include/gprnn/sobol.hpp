#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace gprnn {

/// Unscrambled Sobol sequence generator (Joe-Kuo direction numbers,
/// Gray-code construction).
///
/// The first emitted point is the origin. For dimension 1 the sequence
/// starts 0, 0.5, 0.75, 0.25, ... and every point lies in [0,1)^d. The
/// bundled table is new-joe-kuo-6.21201 truncated to kMaxDimension; see
/// scripts/gen_sobol_table.py.
class SobolGenerator {
 public:
  static constexpr std::size_t kMaxDimension = 256;
  static constexpr int kBits = 32;
  static constexpr std::uint64_t kMaxPoints = std::uint64_t{1} << kBits;

  explicit SobolGenerator(std::size_t dimension);

  /// Returns the point at index() and advances the cursor.
  std::vector<double> next();

  /// Advances the cursor by n points without returning them.
  void skip(std::uint64_t n);

  std::size_t dimension() const noexcept { return dimension_; }
  std::uint64_t index() const noexcept { return index_; }

 private:
  std::size_t dimension_;
  std::uint64_t index_ = 0;
  std::vector<std::array<std::uint32_t, kBits>> directions_;
  std::vector<std::uint32_t> state_;
};

}  // namespace gprnn
