#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sitm/feature_table.hpp"

namespace sitm {

struct FusionParams {
  double regularization_c = 1.0;  // inverse L2 strength on standardized terms; intercept unpenalized
  double tolerance = 1e-8;        // gradient-norm stop
  int max_iterations = 10000;
  int inner_folds = 5;            // for nested out-of-fold stacking inputs
};

/// Degree-2 expansion [1, p_1..p_m, p_i p_j (i <= j)] with the quadratic
/// terms in row-major upper-triangle order: [a, b] -> [1, a, b, a^2, ab, b^2].
std::vector<double> polynomial_features(std::span<const double> p);
std::size_t polynomial_feature_count(std::size_t m);

/// Logistic regression on the standardized polynomial expansion of
/// unimodal probabilities.
struct FusionModel {
  std::vector<std::string> modality_order;
  std::vector<double> weights;  // 1 + m + m(m+1)/2; weights[0] is the intercept
  std::vector<double> center;   // per expanded term (center[0] unused)
  std::vector<double> scale;
  int iterations = 0;
  bool converged = false;

  double margin(std::span<const double> probabilities) const;
  double predict_proba(std::span<const double> probabilities) const;
};

/// Fits on rows of `probabilities` (participants x modalities) by damped
/// Newton iterations. Throws InputError on non-finite or out-of-range inputs.
FusionModel late_fusion_fit(const Matrix& probabilities, std::span<const std::uint8_t> labels,
                            std::span<const std::size_t> rows, const FusionParams& params = {},
                            std::vector<std::string> modality_order = {});
FusionModel late_fusion_fit(const Matrix& probabilities, std::span<const std::uint8_t> labels,
                            const FusionParams& params = {}, std::vector<std::string> modality_order = {});

}  // namespace sitm
