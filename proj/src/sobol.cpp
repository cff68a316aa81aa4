#include "gprnn/sobol.hpp"

#include <bit>
#include <string>

#include "gprnn/error.hpp"

namespace gprnn {
namespace {

struct DirectionEntry {
  unsigned degree;
  unsigned coefficients;
  std::array<std::uint32_t, 16> initial;
};

constexpr DirectionEntry kTable[] = {
#include "sobol_direction_numbers.inc"
};

static_assert(std::size(kTable) + 1 == SobolGenerator::kMaxDimension);

std::array<std::uint32_t, SobolGenerator::kBits> first_dimension() {
  std::array<std::uint32_t, SobolGenerator::kBits> v{};
  for (int i = 0; i < SobolGenerator::kBits; ++i) v[i] = std::uint32_t{1} << (31 - i);
  return v;
}

std::array<std::uint32_t, SobolGenerator::kBits> directions_for(const DirectionEntry& e) {
  constexpr unsigned L = SobolGenerator::kBits;
  const unsigned s = e.degree;
  std::array<std::uint32_t, L> v{};
  for (unsigned i = 0; i < s && i < L; ++i) v[i] = e.initial[i] << (31 - i);
  for (unsigned i = s; i < L; ++i) {
    v[i] = v[i - s] ^ (v[i - s] >> s);
    for (unsigned k = 1; k < s; ++k) {
      if ((e.coefficients >> (s - 1 - k)) & 1u) v[i] ^= v[i - k];
    }
  }
  return v;
}

}  // namespace

SobolGenerator::SobolGenerator(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0 || dimension > kMaxDimension) {
    throw ConfigError("Sobol dimension must be in [1, " + std::to_string(kMaxDimension) +
                      "], got " + std::to_string(dimension));
  }
  directions_.reserve(dimension);
  directions_.push_back(first_dimension());
  for (std::size_t d = 1; d < dimension; ++d) directions_.push_back(directions_for(kTable[d - 1]));
  state_.assign(dimension, 0u);
}

std::vector<double> SobolGenerator::next() {
  if (index_ >= kMaxPoints) throw NumericalError("Sobol sequence exhausted after 2^32 points");
  constexpr double scale = 1.0 / 4294967296.0;
  std::vector<double> point(dimension_);
  for (std::size_t d = 0; d < dimension_; ++d) point[d] = state_[d] * scale;
  // Gray-code update: flip the direction number of the lowest zero bit of index_.
  if (index_ + 1 < kMaxPoints) {
    const int c = std::countr_one(index_);
    for (std::size_t d = 0; d < dimension_; ++d) state_[d] ^= directions_[d][c];
  }
  ++index_;
  return point;
}

void SobolGenerator::skip(std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) next();
}

}  // namespace gprnn
