#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "gprnn/gpr.hpp"

namespace gprnn {

inline constexpr const char* kModelFormat = "gprnn-model/1";

struct Provenance {
  std::uint64_t seed = 0;
  std::string config;     // single line echo of the training flags
  std::string timestamp;  // ISO 8601 UTC
  bool rescale_y = true;
};

struct LoadedModel {
  GprModel model;
  Provenance provenance;
};

/// Versioned text format: "key value" header lines followed by named
/// whitespace-separated blocks (x_min, x_max, weights, y_min, y_max,
/// train_coordinates, alpha) and a closing "end". Floats carry 17
/// significant digits so a save/load round trip is exact.
void write_model(const GprModel& model, const Provenance& provenance, std::ostream& out);
void save_model(const GprModel& model, const Provenance& provenance, const std::filesystem::path& path);

/// Throws DataError on unknown format tags or malformed content.
LoadedModel read_model(std::istream& in, const std::string& source_name = "<stream>");
LoadedModel load_model(const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace gprnn
