#include "sitm/serialize.hpp"

#include <json.hpp>

#include "sitm/error.hpp"

namespace sitm {
namespace {

using nlohmann::json;

constexpr const char* kBoostedFormat = "sit-markers/boosted-model";
constexpr const char* kFusionFormat = "sit-markers/fusion-model";

json params_json(const GbdtParams& p) {
  return {{"learning_rate", p.learning_rate}, {"max_depth", p.max_depth},       {"n_rounds", p.n_rounds},
          {"l2_lambda", p.l2_lambda},         {"min_child_weight", p.min_child_weight},
          {"gamma", p.gamma},                 {"base_score", p.base_score}};
}

json parse_checked(const std::string& text, const char* format) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("model JSON: ") + e.what());
  }
  if (doc.value("format", "") != format) throw Error(ErrorKind::SchemaError, std::string("expected a ") + format);
  if (doc.value("version", 0) != kModelFormatVersion) {
    throw Error(ErrorKind::SchemaError, "unsupported model version " + doc.value("version", json()).dump());
  }
  return doc;
}

}  // namespace

std::string boosted_model_to_json(const BoostedModel& model) {
  json trees = json::array();
  for (const auto& t : model.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
      if (n.is_leaf()) {
        nodes.push_back({{"leaf", n.leaf_value}, {"cover", n.cover}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"default_left", n.default_left},
                         {"left", n.left},
                         {"right", n.right},
                         {"gain", n.gain},
                         {"cover", n.cover}});
      }
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  json doc = {{"format", kBoostedFormat},
              {"version", kModelFormatVersion},
              {"objective", "binary:logistic"},
              {"base_score", model.base_score},
              {"params", params_json(model.params)},
              {"feature_names", model.feature_names},
              {"trees", std::move(trees)}};
  return doc.dump(1) + "\n";
}

BoostedModel boosted_model_from_json(const std::string& text) {
  const json doc = parse_checked(text, kBoostedFormat);
  try {
    BoostedModel m;
    m.base_score = doc.at("base_score").get<double>();
    const auto& p = doc.at("params");
    m.params.learning_rate = p.at("learning_rate").get<double>();
    m.params.max_depth = p.at("max_depth").get<int>();
    m.params.n_rounds = p.at("n_rounds").get<int>();
    m.params.l2_lambda = p.at("l2_lambda").get<double>();
    m.params.min_child_weight = p.at("min_child_weight").get<double>();
    m.params.gamma = p.at("gamma").get<double>();
    m.params.base_score = p.at("base_score").get<double>();
    m.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    for (const auto& t : doc.at("trees")) {
      RegressionTree tree;
      for (const auto& n : t.at("nodes")) {
        TreeNode node;
        node.cover = n.at("cover").get<double>();
        if (n.contains("leaf")) {
          node.leaf_value = n.at("leaf").get<double>();
        } else {
          node.feature = n.at("feature").get<int>();
          node.threshold = n.at("threshold").get<double>();
          node.default_left = n.at("default_left").get<bool>();
          node.left = n.at("left").get<int>();
          node.right = n.at("right").get<int>();
          node.gain = n.at("gain").get<double>();
        }
        tree.nodes.push_back(node);
      }
      m.trees.push_back(std::move(tree));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("boosted model JSON: ") + e.what());
  }
}

std::string fusion_model_to_json(const FusionModel& model) {
  json doc = {{"format", kFusionFormat},
              {"version", kModelFormatVersion},
              {"expansion", "degree-2 polynomial"},
              {"modality_order", model.modality_order},
              {"weights", model.weights},
              {"center", model.center},
              {"scale", model.scale},
              {"iterations", model.iterations},
              {"converged", model.converged}};
  return doc.dump(1) + "\n";
}

FusionModel fusion_model_from_json(const std::string& text) {
  const json doc = parse_checked(text, kFusionFormat);
  try {
    FusionModel m;
    m.modality_order = doc.at("modality_order").get<std::vector<std::string>>();
    m.weights = doc.at("weights").get<std::vector<double>>();
    m.center = doc.at("center").get<std::vector<double>>();
    m.scale = doc.at("scale").get<std::vector<double>>();
    m.iterations = doc.at("iterations").get<int>();
    m.converged = doc.at("converged").get<bool>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("fusion model JSON: ") + e.what());
  }
}

}  // namespace sitm
