#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sitm/extract.hpp"
#include "sitm/feature_table.hpp"
#include "sitm/fusion.hpp"
#include "sitm/gbdt.hpp"
#include "sitm/ingest.hpp"

namespace sitm {

using ConfigValue = std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>>;

/// Flat view of a small TOML subset: `[section]` headers, `key = value`
/// lines, numbers, quoted strings, booleans, single-line arrays and `#`
/// comments. Keys are stored as "section.key".
class ConfigFile {
public:
  static ConfigFile parse(std::string_view text, const std::string& source);
  static ConfigFile read(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, ConfigValue value) { values_[key] = std::move(value); }

  // Each accessor throws ConfigError when the key holds another type.
  std::optional<double> number(const std::string& key) const;
  std::optional<std::int64_t> integer(const std::string& key) const;
  std::optional<bool> boolean(const std::string& key) const;
  std::optional<std::string> string(const std::string& key) const;
  std::optional<std::vector<double>> numbers(const std::string& key, std::size_t expected_size) const;
  std::optional<std::vector<std::string>> strings(const std::string& key) const;

  /// Throws ConfigError naming the first key not in `known` (a trailing
  /// ".*" in `known` accepts a whole section).
  void require_known(const std::vector<std::string_view>& known) const;

private:
  std::string source_;
  std::map<std::string, ConfigValue> values_;
};

struct RunConfig {
  QualityRules quality;
  ExtractParams extract;
  GbdtParams gbdt;
  FusionParams fusion;
  std::uint64_t seed = 42;
  unsigned jobs = 1;
  std::vector<Modality> modalities{kModalities.begin(), kModalities.end()};
  std::string shap_model = "early_fusion";
  std::vector<std::string> compare_features = {"gaze_screen/disgust_listening/distance_std"};
};

/// Builds a run configuration from a parsed file; unknown keys and
/// out-of-range values raise ConfigError.
RunConfig make_run_config(const ConfigFile& file);
RunConfig load_run_config(const std::optional<std::filesystem::path>& path);

std::vector<Modality> parse_modality_list(const std::vector<std::string>& names);

}  // namespace sitm
