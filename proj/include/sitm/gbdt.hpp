#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sitm/feature_table.hpp"

namespace sitm {

/// Booster settings. Defaults match the common XGBoost defaults
/// (eta 0.3, depth 6, lambda 1).
struct GbdtParams {
  double learning_rate = 0.3;
  int max_depth = 6;
  int n_rounds = 100;
  double l2_lambda = 1.0;
  double min_child_weight = 1.0;
  double gamma = 0.0;
  double base_score = 0.5;
};

struct TreeNode {
  int feature = -1;           // -1 marks a leaf
  double threshold = 0.0;     // rows with value < threshold go left
  bool default_left = false;  // branch taken by missing values
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;    // margin contribution, learning rate applied
  double cover = 0.0;         // hessian sum of the training rows reaching the node
  double gain = 0.0;

  bool is_leaf() const { return feature < 0; }
};

class RegressionTree {
public:
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  /// Index of the leaf reached by `row`.
  std::size_t leaf_index(std::span<const double> row) const;
  double predict(std::span<const double> row) const { return nodes[leaf_index(row)].leaf_value; }
  /// Edges on the longest root-to-leaf path.
  int depth() const;
};

struct BoostedModel {
  std::vector<RegressionTree> trees;
  double base_score = 0.5;
  GbdtParams params;
  std::vector<std::string> feature_names;

  double base_margin() const;
  double margin(std::span<const double> row) const;
  double predict_proba(std::span<const double> row) const;
};

double sigmoid(double z);
double logit(double p);

/// Second-order gain of a split, given left/right gradient and hessian sums.
double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda, double gamma);

/// Exact greedy boosting on the given rows of `x` with the logistic loss.
/// Candidate thresholds are midpoints between consecutive distinct values;
/// missing values try both sides. Ties resolve to the lowest feature index,
/// then the lowest threshold, then missing-right. Throws DegenerateLabels if
/// the rows hold a single class.
BoostedModel train_gbdt(const Matrix& x, std::span<const std::uint8_t> labels, std::span<const std::size_t> rows,
                        const GbdtParams& params, std::vector<std::string> feature_names = {});
BoostedModel train_gbdt(const Matrix& x, std::span<const std::uint8_t> labels, const GbdtParams& params,
                        std::vector<std::string> feature_names = {});

}  // namespace sitm
