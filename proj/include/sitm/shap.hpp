#pragma once

#include <span>
#include <vector>

#include "sitm/gbdt.hpp"

namespace sitm {

/// Additive attribution of a model margin (log-odds):
/// base_value + sum(contributions) equals the margin of the explained row.
struct ShapAttribution {
  double base_value = 0.0;
  std::vector<double> contributions;  // one per model feature
};

/// Cover-weighted mean leaf value of a tree.
double expected_value(const RegressionTree& tree);

/// Path-dependent TreeSHAP for one tree; adds the attributions into `phi`.
void tree_shap(const RegressionTree& tree, std::span<const double> row, std::span<double> phi);

/// Attributions summed over every tree of the ensemble.
ShapAttribution tree_shap(const BoostedModel& model, std::span<const double> row);

}  // namespace sitm
