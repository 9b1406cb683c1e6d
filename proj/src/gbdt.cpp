#include "sitm/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sitm/error.hpp"

namespace sitm {
namespace {

constexpr double kMinSplitGain = 1e-10;

// True when `candidate` should replace `best`; near-equal gains keep the
// earlier candidate so ties follow scan order.
bool improves(double candidate, double best) {
  if (std::isinf(best)) return candidate > best;
  return candidate > best + 1e-12 * std::max(1.0, std::abs(best));
}

struct SplitChoice {
  double gain = -std::numeric_limits<double>::infinity();
  int feature = -1;
  double threshold = 0.0;
  bool default_left = false;
  double g_left = 0.0, h_left = 0.0, g_right = 0.0, h_right = 0.0;
};

struct SlotStats {
  double g = 0.0, h = 0.0;  // all rows in node
  std::size_t count = 0;
  double g_nm = 0.0, h_nm = 0.0;  // rows with a value for the current feature
  std::size_t count_nm = 0;
  double g_left = 0.0, h_left = 0.0;
  double parent = 0.0;  // g^2 / (h + lambda)
  double last_value = 0.0;
  bool has_last = false;
  SplitChoice best;
};

// split_gain with the parent term precomputed and a single division.
inline double fast_gain(double gl, double hl, double gr, double hr, double lambda, double gamma, double parent) {
  const double dl = hl + lambda, dr = hr + lambda;
  return 0.5 * ((gl * gl * dr + gr * gr * dl) / (dl * dr) - parent) - gamma;
}

double midpoint(double a, double b) {
  double t = a + (b - a) / 2.0;
  if (!(t > a)) t = b;
  return t;
}

class TreeGrower {
public:
  TreeGrower(const std::vector<double>& columns, const std::vector<std::vector<std::uint32_t>>& order,
             std::size_t n, const GbdtParams& params)
      : columns_(columns), order_(order), n_(n), params_(params) {}

  // Grows one tree on gradients g/h; leaves position[k] = leaf node of row k.
  RegressionTree grow(const std::vector<double>& g, const std::vector<double>& h, std::vector<int>& position) {
    RegressionTree tree;
    position.assign(n_, 0);
    tree.nodes.emplace_back();
    std::vector<int> frontier = {0};
    std::vector<int> slot_of_node;

    for (int depth = 0; depth <= params_.max_depth && !frontier.empty(); ++depth) {
      slot_of_node.assign(tree.nodes.size(), -1);
      std::vector<SlotStats> slots(frontier.size());
      for (std::size_t s = 0; s < frontier.size(); ++s) slot_of_node[frontier[s]] = static_cast<int>(s);
      for (std::size_t k = 0; k < n_; ++k) {
        const int s = slot_of_node[position[k]];
        if (s < 0) continue;
        slots[s].g += g[k];
        slots[s].h += h[k];
        ++slots[s].count;
      }
      for (std::size_t s = 0; s < frontier.size(); ++s) tree.nodes[frontier[s]].cover = slots[s].h;

      const bool may_split = depth < params_.max_depth;
      if (may_split) {
        // Nodes too light for two children of min_child_weight are skipped in the scan.
        std::vector<int> scan_slot(slot_of_node);
        bool any = false;
        for (std::size_t s = 0; s < frontier.size(); ++s) {
          if (slots[s].count < 2 || slots[s].h < 2.0 * params_.min_child_weight) {
            scan_slot[frontier[s]] = -1;
          } else {
            any = true;
          }
        }
        if (any) {
          std::vector<int> row_slot(n_);
          for (std::size_t k = 0; k < n_; ++k) row_slot[k] = scan_slot[position[k]];
          find_splits(g, h, row_slot, slots);
        }
      }

      std::vector<int> next;
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        const int id = frontier[s];
        const auto& best = slots[s].best;
        if (!may_split || best.feature < 0 || !(best.gain > kMinSplitGain)) {
          tree.nodes[id].leaf_value = -slots[s].g / (slots[s].h + params_.l2_lambda) * params_.learning_rate;
          continue;
        }
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[id];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.default_left = best.default_left;
        node.gain = best.gain;
        node.left = left;
        node.right = left + 1;
        next.push_back(left);
        next.push_back(left + 1);
      }
      // Route rows of split nodes to their children.
      for (std::size_t k = 0; k < n_; ++k) {
        const auto& node = tree.nodes[position[k]];
        if (node.is_leaf()) continue;
        const double v = columns_[static_cast<std::size_t>(node.feature) * n_ + k];
        const bool go_left = std::isnan(v) ? node.default_left : v < node.threshold;
        position[k] = go_left ? node.left : node.right;
      }
      frontier = std::move(next);
    }
    return tree;
  }

private:
  // row_slot[k] is the frontier slot of row k, or -1 when its node is not scanned.
  void find_splits(const std::vector<double>& g, const std::vector<double>& h, const std::vector<int>& row_slot,
                   std::vector<SlotStats>& slots) const {
    const double lambda = params_.l2_lambda;
    const double mcw = params_.min_child_weight;
    const std::size_t n_features = order_.size();
    for (std::size_t f = 0; f < n_features; ++f) {
      const auto& ord = order_[f];
      const double* col = columns_.data() + f * n_;
      const bool complete = ord.size() == n_;
      for (auto& s : slots) {
        s.parent = s.g * s.g / (s.h + lambda);
        s.g_nm = complete ? s.g : 0.0;
        s.h_nm = complete ? s.h : 0.0;
        s.count_nm = complete ? s.count : 0;
        s.g_left = s.h_left = 0.0;
        s.has_last = false;
      }
      if (!complete) {
        for (auto k : ord) {
          const int s = row_slot[k];
          if (s < 0) continue;
          slots[s].g_nm += g[k];
          slots[s].h_nm += h[k];
          ++slots[s].count_nm;
        }
      }
      for (auto k : ord) {
        const int si = row_slot[k];
        if (si < 0) continue;
        auto& s = slots[si];
        const double v = col[k];
        if (s.has_last && v > s.last_value) {
          const double thr = midpoint(s.last_value, v);
          // Missing values to the right.
          {
            const double gl = s.g_left, hl = s.h_left;
            const double gr = s.g - gl, hr = s.h - hl;
            if (hl >= mcw && hr >= mcw) {
              const double gain = fast_gain(gl, hl, gr, hr, lambda, params_.gamma, s.parent);
              if (improves(gain, s.best.gain)) s.best = {gain, static_cast<int>(f), thr, false, gl, hl, gr, hr};
            }
          }
          // Missing values to the left, only distinct when there are some.
          if (s.count_nm < s.count) {
            const double gl = s.g_left + (s.g - s.g_nm), hl = s.h_left + (s.h - s.h_nm);
            const double gr = s.g_nm - s.g_left, hr = s.h_nm - s.h_left;
            if (hl >= mcw && hr >= mcw) {
              const double gain = fast_gain(gl, hl, gr, hr, lambda, params_.gamma, s.parent);
              if (improves(gain, s.best.gain)) s.best = {gain, static_cast<int>(f), thr, true, gl, hl, gr, hr};
            }
          }
        }
        s.g_left += g[k];
        s.h_left += h[k];
        s.last_value = v;
        s.has_last = true;
      }
    }
  }

  const std::vector<double>& columns_;
  const std::vector<std::vector<std::uint32_t>>& order_;
  std::size_t n_;
  const GbdtParams& params_;
};

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda, double gamma) {
  const double g = g_left + g_right;
  const double h = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) - g * g / (h + lambda)) -
         gamma;
}

std::size_t RegressionTree::leaf_index(std::span<const double> row) const {
  std::size_t id = 0;
  while (!nodes[id].is_leaf()) {
    const auto& node = nodes[id];
    const double v = row[static_cast<std::size_t>(node.feature)];
    const bool go_left = std::isnan(v) ? node.default_left : v < node.threshold;
    id = static_cast<std::size_t>(go_left ? node.left : node.right);
  }
  return id;
}

int RegressionTree::depth() const {
  std::vector<int> depth(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) continue;
    depth[nodes[i].left] = depth[i] + 1;
    depth[nodes[i].right] = depth[i] + 1;
    deepest = std::max(deepest, depth[i] + 1);
  }
  return deepest;
}

double BoostedModel::base_margin() const { return logit(base_score); }

double BoostedModel::margin(std::span<const double> row) const {
  double m = base_margin();
  for (const auto& t : trees) m += t.predict(row);
  return m;
}

double BoostedModel::predict_proba(std::span<const double> row) const { return sigmoid(margin(row)); }

BoostedModel train_gbdt(const Matrix& x, std::span<const std::uint8_t> labels, std::span<const std::size_t> rows,
                        const GbdtParams& params, std::vector<std::string> feature_names) {
  if (x.cols() == 0) throw Error(ErrorKind::InputError, "no features to train on");
  if (rows.empty()) throw Error(ErrorKind::InputError, "no training rows");
  if (!(params.base_score > 0.0 && params.base_score < 1.0)) {
    throw Error(ErrorKind::ConfigError, "base_score must lie in (0, 1)");
  }
  std::size_t positives = 0;
  for (auto r : rows) positives += labels[r] ? 1 : 0;
  if (positives == 0 || positives == rows.size()) {
    throw Error(ErrorKind::DegenerateLabels, "training labels contain a single class");
  }

  const std::size_t n = rows.size();
  const std::size_t n_features = x.cols();
  std::vector<double> columns(n_features * n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto row = x.row(rows[k]);
    for (std::size_t f = 0; f < n_features; ++f) columns[f * n + k] = row[f];
  }
  std::vector<std::vector<std::uint32_t>> order(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    const double* col = columns.data() + f * n;
    auto& ord = order[f];
    for (std::uint32_t k = 0; k < n; ++k) {
      if (!std::isnan(col[k])) ord.push_back(k);
    }
    std::stable_sort(ord.begin(), ord.end(), [col](auto a, auto b) { return col[a] < col[b]; });
  }

  BoostedModel model;
  model.base_score = params.base_score;
  model.params = params;
  model.feature_names = std::move(feature_names);
  model.trees.reserve(static_cast<std::size_t>(params.n_rounds));

  std::vector<double> margin(n, model.base_margin());
  std::vector<double> g(n), h(n);
  std::vector<int> position;
  TreeGrower grower(columns, order, n, params);
  for (int round = 0; round < params.n_rounds; ++round) {
    for (std::size_t k = 0; k < n; ++k) {
      const double p = sigmoid(margin[k]);
      g[k] = p - static_cast<double>(labels[rows[k]]);
      h[k] = std::max(p * (1.0 - p), 1e-16);
    }
    auto tree = grower.grow(g, h, position);
    for (std::size_t k = 0; k < n; ++k) margin[k] += tree.nodes[position[k]].leaf_value;
    model.trees.push_back(std::move(tree));
  }
  return model;
}

BoostedModel train_gbdt(const Matrix& x, std::span<const std::uint8_t> labels, const GbdtParams& params,
                        std::vector<std::string> feature_names) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return train_gbdt(x, labels, rows, params, std::move(feature_names));
}

}  // namespace sitm
