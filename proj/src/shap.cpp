#include "sitm/shap.hpp"

#include <cmath>

namespace sitm {
namespace {

// One feature on the current root-to-node path, with the fraction of
// "feature absent" (zero) and "feature present" (one) paths flowing through
// it and the permutation weight of subsets of the given size.
struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double weight = 0.0;
};

using Path = std::vector<PathElement>;

void extend_path(Path& path, int depth, double zero_fraction, double one_fraction, int feature) {
  path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  const double d1 = depth + 1;
  for (int i = depth - 1; i >= 0; --i) {
    path[i + 1].weight += one_fraction * path[i].weight * (i + 1) / d1;
    path[i].weight = zero_fraction * path[i].weight * (depth - i) / d1;
  }
}

void unwind_path(Path& path, int depth, int index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = depth + 1;
  double next = path[depth].weight;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = path[i].weight;
      path[i].weight = next * d1 / ((i + 1) * one);
      next = tmp - path[i].weight * zero * (depth - i) / d1;
    } else {
      path[i].weight = path[i].weight * d1 / (zero * (depth - i));
    }
  }
  for (int i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

// Total permutation weight if the element at `index` were removed.
double unwound_sum(const Path& path, int depth, int index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = depth + 1;
  double next = path[depth].weight;
  double total = 0.0;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = next * d1 / ((i + 1) * one);
      total += tmp;
      next = path[i].weight - tmp * zero * (depth - i) / d1;
    } else if (zero != 0.0) {
      total += path[i].weight / zero * d1 / (depth - i);
    }
  }
  return total;
}

bool goes_left(const TreeNode& node, double v) { return std::isnan(v) ? node.default_left : v < node.threshold; }

void recurse(const RegressionTree& tree, std::size_t id, std::span<const double> row, std::span<double> phi,
             Path path, int depth, double zero_fraction, double one_fraction, int feature) {
  path.resize(static_cast<std::size_t>(depth) + 1);
  extend_path(path, depth, zero_fraction, one_fraction, feature);
  const auto& node = tree.nodes[id];
  if (node.is_leaf()) {
    for (int i = 1; i <= depth; ++i) {
      const double w = unwound_sum(path, depth, i);
      phi[static_cast<std::size_t>(path[i].feature)] +=
          w * (path[i].one_fraction - path[i].zero_fraction) * node.leaf_value;
    }
    return;
  }

  const bool left = goes_left(node, row[static_cast<std::size_t>(node.feature)]);
  const auto hot = static_cast<std::size_t>(left ? node.left : node.right);
  const auto cold = static_cast<std::size_t>(left ? node.right : node.left);
  const double hot_zero = tree.nodes[hot].cover / node.cover;
  const double cold_zero = tree.nodes[cold].cover / node.cover;

  // A feature already on the path is merged rather than duplicated.
  double incoming_zero = 1.0, incoming_one = 1.0;
  for (int k = 1; k <= depth; ++k) {
    if (path[k].feature == node.feature) {
      incoming_zero = path[k].zero_fraction;
      incoming_one = path[k].one_fraction;
      unwind_path(path, depth, k);
      --depth;
      break;
    }
  }
  recurse(tree, hot, row, phi, path, depth + 1, hot_zero * incoming_zero, incoming_one, node.feature);
  recurse(tree, cold, row, phi, path, depth + 1, cold_zero * incoming_zero, 0.0, node.feature);
}

}  // namespace

double expected_value(const RegressionTree& tree) {
  const double root_cover = tree.nodes[0].cover;
  double sum = 0.0;
  for (const auto& node : tree.nodes) {
    if (node.is_leaf()) sum += node.leaf_value * node.cover;
  }
  return root_cover > 0.0 ? sum / root_cover : tree.nodes[0].leaf_value;
}

void tree_shap(const RegressionTree& tree, std::span<const double> row, std::span<double> phi) {
  if (tree.nodes.empty() || tree.nodes[0].is_leaf()) return;
  recurse(tree, 0, row, phi, Path{}, 0, 1.0, 1.0, -1);
}

ShapAttribution tree_shap(const BoostedModel& model, std::span<const double> row) {
  ShapAttribution out;
  out.base_value = model.base_margin();
  out.contributions.assign(row.size(), 0.0);
  for (const auto& tree : model.trees) {
    out.base_value += expected_value(tree);
    tree_shap(tree, row, out.contributions);
  }
  return out;
}

}  // namespace sitm
