#pragma once

#include <string>

#include "sitm/fusion.hpp"
#include "sitm/gbdt.hpp"

namespace sitm {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON documents for fitted models. Loading checks the format
/// name and version and throws SchemaError on a mismatch.
std::string boosted_model_to_json(const BoostedModel& model);
BoostedModel boosted_model_from_json(const std::string& text);

std::string fusion_model_to_json(const FusionModel& model);
FusionModel fusion_model_from_json(const std::string& text);

}  // namespace sitm
