#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sitm/types.hpp"

namespace sitm {

/// The 88 eGeMAPSv02 functional names in the toolkit's output order.
std::span<const std::string_view> egemaps_v02_functionals();

/// Precomputed voice functionals for the three participant-speaking phases.
struct ProsodyFeatureSet {
  std::vector<std::string> names;
  /// Indexed by Emotion; each row has names.size() values.
  std::array<std::vector<double>, 3> values;

  std::size_t feature_count() const { return names.size() * 3; }
};

/// Reads `phase,<functional names...>`; exactly one row per speaking phase.
/// Row count != 3 or a listening/unknown/duplicate phase row -> SchemaError;
/// non-finite or unparsable cell -> ParseError with coordinates.
ProsodyFeatureSet load_prosody(const std::filesystem::path& path);
ProsodyFeatureSet parse_prosody(std::string text, const std::string& source);

/// Inverse of load_prosody; values are written with round-trip precision.
std::string format_prosody(const ProsodyFeatureSet& set);

}  // namespace sitm
