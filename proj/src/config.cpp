#include "sitm/config.hpp"

#include <cmath>

#include "sitm/csv.hpp"
#include "sitm/error.hpp"

namespace sitm {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::vector<std::string_view> split_items(std::string_view body) {
  std::vector<std::string_view> items;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i < body.size() && body[i] == '"') quoted = !quoted;
    if (i == body.size() || (body[i] == ',' && !quoted)) {
      const auto item = trim(body.substr(start, i - start));
      if (!item.empty()) items.push_back(item);
      start = i + 1;
    }
  }
  return items;
}

bool is_quoted(std::string_view s) { return s.size() >= 2 && s.front() == '"' && s.back() == '"'; }

ConfigValue parse_value(std::string_view text, const std::string& where) {
  if (text == "true") return true;
  if (text == "false") return false;
  if (is_quoted(text)) return std::string(text.substr(1, text.size() - 2));
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']') {
    const auto items = split_items(text.substr(1, text.size() - 2));
    if (!items.empty() && is_quoted(items.front())) {
      std::vector<std::string> out;
      for (auto item : items) {
        if (!is_quoted(item)) throw Error(ErrorKind::ConfigError, where + ": mixed array");
        out.emplace_back(item.substr(1, item.size() - 2));
      }
      return out;
    }
    std::vector<double> out;
    for (auto item : items) {
      const auto v = parse_double(item);
      if (!v) throw Error(ErrorKind::ConfigError, where + ": bad array element '" + std::string(item) + "'");
      out.push_back(*v);
    }
    return out;
  }
  const auto v = parse_double(text);
  if (!v) throw Error(ErrorKind::ConfigError, where + ": cannot parse value '" + std::string(text) + "'");
  return *v;
}

template <typename T>
const T* typed(const std::map<std::string, ConfigValue>& values, const std::string& key, const char* what) {
  const auto it = values.find(key);
  if (it == values.end()) return nullptr;
  const T* v = std::get_if<T>(&it->second);
  if (!v) throw Error(ErrorKind::ConfigError, "'" + key + "' must be " + what);
  return v;
}

void positive(double v, const std::string& key) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::ConfigError, "'" + key + "' must be positive");
}

void read_screen(const ConfigFile& f, const std::string& section, ScreenGeometry& g) {
  const bool size_given = f.has(section + ".size_mm");
  if (auto v = f.number(section + ".eye_to_screen_mm")) g.eye_to_screen_mm = *v;
  if (auto v = f.numbers(section + ".camera_offset_mm", 2)) g.camera_offset_mm = {(*v)[0], (*v)[1]};
  if (auto v = f.numbers(section + ".size_mm", 2)) g.screen_size_mm = {(*v)[0], (*v)[1]};
  if (auto v = f.numbers(section + ".resolution_px", 2)) {
    g.resolution_px = {static_cast<int>((*v)[0]), static_cast<int>((*v)[1])};
  }
  if (auto v = f.numbers(section + ".gaze_sign", 2)) g.gaze_sign = {(*v)[0], (*v)[1]};
  if (auto v = f.numbers(section + ".face_region_mm", 4)) {
    g.face_region_mm = {(*v)[0], (*v)[1], (*v)[2], (*v)[3]};
  } else if (auto px = f.numbers(section + ".face_region_px", 4)) {
    g.face_region_mm = g.pixels_to_mm({(*px)[0], (*px)[1], (*px)[2], (*px)[3]});
  } else if (size_given) {
    // Keep the default central-third region in step with a custom screen size.
    const double w = g.screen_size_mm.x / 6.0, h = g.screen_size_mm.y / 6.0;
    g.face_region_mm = {-w, -h, w, h};
  }
  g.validate();
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text, const std::string& source) {
  ConfigFile f;
  f.source_ = source;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::ConfigError, where + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::ConfigError, where + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::ConfigError, where + ": empty key");
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (f.has(full)) throw Error(ErrorKind::ConfigError, where + ": duplicate key '" + full + "'");
    f.values_[full] = parse_value(trim(line.substr(eq + 1)), where);
  }
  return f;
}

ConfigFile ConfigFile::read(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, "cannot read config '" + path.string() + "'");
  }
  return parse(text, path.string());
}

std::optional<double> ConfigFile::number(const std::string& key) const {
  const auto* v = typed<double>(values_, key, "a number");
  return v ? std::optional<double>(*v) : std::nullopt;
}

std::optional<std::int64_t> ConfigFile::integer(const std::string& key) const {
  const auto v = number(key);
  if (!v) return std::nullopt;
  if (std::trunc(*v) != *v || std::abs(*v) > 9.0e15) {
    throw Error(ErrorKind::ConfigError, "'" + key + "' must be an integer");
  }
  return static_cast<std::int64_t>(*v);
}

std::optional<bool> ConfigFile::boolean(const std::string& key) const {
  const auto* v = typed<bool>(values_, key, "true or false");
  return v ? std::optional<bool>(*v) : std::nullopt;
}

std::optional<std::string> ConfigFile::string(const std::string& key) const {
  const auto* v = typed<std::string>(values_, key, "a quoted string");
  return v ? std::optional<std::string>(*v) : std::nullopt;
}

std::optional<std::vector<double>> ConfigFile::numbers(const std::string& key, std::size_t expected_size) const {
  const auto* v = typed<std::vector<double>>(values_, key, "an array of numbers");
  if (!v) return std::nullopt;
  if (expected_size != 0 && v->size() != expected_size) {
    throw Error(ErrorKind::ConfigError, "'" + key + "' must have " + std::to_string(expected_size) + " elements");
  }
  return *v;
}

std::optional<std::vector<std::string>> ConfigFile::strings(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&it->second)) return std::vector<std::string>{*s};
  if (const auto* v = std::get_if<std::vector<double>>(&it->second); v && v->empty()) {
    return std::vector<std::string>{};
  }
  const auto* v = typed<std::vector<std::string>>(values_, key, "an array of strings");
  return *v;
}

void ConfigFile::require_known(const std::vector<std::string_view>& known) const {
  for (const auto& [key, value] : values_) {
    bool ok = false;
    for (auto k : known) {
      if (k.size() > 2 && k.substr(k.size() - 2) == ".*") {
        ok = std::string_view(key).substr(0, k.size() - 1) == k.substr(0, k.size() - 1);
      } else {
        ok = key == k;
      }
      if (ok) break;
    }
    if (!ok) throw Error(ErrorKind::ConfigError, source_ + ": unknown key '" + key + "'");
  }
}

std::vector<Modality> parse_modality_list(const std::vector<std::string>& names) {
  std::vector<Modality> out;
  for (const auto& n : names) {
    const auto m = parse_modality(n);
    if (!m) throw Error(ErrorKind::ConfigError, "unknown modality '" + n + "'");
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  if (out.empty()) throw Error(ErrorKind::ConfigError, "no modality selected");
  // Keep the canonical order so outputs do not depend on how the list was written.
  std::vector<Modality> ordered;
  for (auto m : kModalities) {
    if (std::find(out.begin(), out.end(), m) != out.end()) ordered.push_back(m);
  }
  return ordered;
}

RunConfig make_run_config(const ConfigFile& f) {
  static const std::vector<std::string_view> screen_keys = {"eye_to_screen_mm", "camera_offset_mm", "size_mm",
                                                            "resolution_px",    "face_region_mm",   "face_region_px",
                                                            "gaze_sign"};
  std::vector<std::string> owned;
  for (auto section : {"screen", "home_screen"}) {
    for (auto k : screen_keys) owned.push_back(std::string(section) + "." + std::string(k));
  }
  std::vector<std::string_view> known = {
      "quality.min_native_fps",       "quality.min_confidence",       "quality.max_invalid_fraction",
      "motion.ivt_threshold_deg_s",   "motion.stability_threshold_deg_s",
      "motion.nod_amplitude_deg",     "motion.nod_window_s",          "physio.pos_window_s",
      "physio.rolling_mean_window_s", "physio.refractory_s",          "physio.min_ibi_ms",
      "physio.max_ibi_ms",            "physio.min_lfhf_span_s",       "physio.band_low_hz",
      "physio.band_high_hz",       "model.learning_rate",
      "model.max_depth",              "model.n_rounds",               "model.l2_lambda",
      "model.min_child_weight",       "model.gamma",                  "model.base_score",
      "fusion.c",                     "fusion.inner_folds",           "fusion.tolerance",
      "fusion.max_iterations",        "run.seed",                     "run.jobs",
      "run.modalities",               "analysis.shap_model",          "analysis.compare_features"};
  for (const auto& k : owned) known.push_back(k);
  f.require_known(known);

  RunConfig c;
  if (auto v = f.number("quality.min_native_fps")) c.quality.min_native_fps = *v;
  if (auto v = f.number("quality.min_confidence")) c.quality.min_confidence = *v;
  if (auto v = f.number("quality.max_invalid_fraction")) c.quality.max_invalid_fraction = *v;
  if (c.quality.min_confidence < 0.0 || c.quality.min_confidence > 1.0 || c.quality.max_invalid_fraction < 0.0 ||
      c.quality.max_invalid_fraction > 1.0) {
    throw Error(ErrorKind::ConfigError, "quality fractions must lie in [0, 1]");
  }
  positive(c.quality.min_native_fps, "quality.min_native_fps");

  auto& m = c.extract.motion;
  if (auto v = f.number("motion.ivt_threshold_deg_s")) m.ivt_threshold_deg_s = *v;
  if (auto v = f.number("motion.stability_threshold_deg_s")) m.stability_threshold_deg_s = *v;
  if (auto v = f.number("motion.nod_amplitude_deg")) m.nod_amplitude_deg = *v;
  if (auto v = f.number("motion.nod_window_s")) m.nod_window_s = *v;
  positive(m.ivt_threshold_deg_s, "motion.ivt_threshold_deg_s");
  positive(m.stability_threshold_deg_s, "motion.stability_threshold_deg_s");
  positive(m.nod_amplitude_deg, "motion.nod_amplitude_deg");
  positive(m.nod_window_s, "motion.nod_window_s");

  read_screen(f, "screen", c.extract.screen);
  bool home = false;
  for (auto k : screen_keys) home = home || f.has("home_screen." + std::string(k));
  if (home) {
    ScreenGeometry g = c.extract.screen;
    read_screen(f, "home_screen", g);
    c.extract.home_screen = g;
  }

  auto& p = c.extract.physio;
  if (auto v = f.number("physio.pos_window_s")) p.pos_window_s = *v;
  if (auto v = f.number("physio.rolling_mean_window_s")) p.rolling_mean_window_s = *v;
  if (auto v = f.number("physio.refractory_s")) p.refractory_s = *v;
  if (auto v = f.number("physio.min_ibi_ms")) p.min_ibi_ms = *v;
  if (auto v = f.number("physio.max_ibi_ms")) p.max_ibi_ms = *v;
  if (auto v = f.number("physio.min_lfhf_span_s")) p.min_lfhf_span_s = *v;
  if (auto v = f.number("physio.band_low_hz")) p.band_low_hz = *v;
  if (auto v = f.number("physio.band_high_hz")) p.band_high_hz = *v;
  positive(p.pos_window_s, "physio.pos_window_s");
  positive(p.rolling_mean_window_s, "physio.rolling_mean_window_s");
  positive(p.band_low_hz, "physio.band_low_hz");
  if (!(p.band_high_hz > p.band_low_hz)) throw Error(ErrorKind::ConfigError, "physio.band_high_hz must exceed band_low_hz");
  if (!(p.max_ibi_ms > p.min_ibi_ms)) throw Error(ErrorKind::ConfigError, "physio.max_ibi_ms must exceed min_ibi_ms");

  auto& g = c.gbdt;
  if (auto v = f.number("model.learning_rate")) g.learning_rate = *v;
  if (auto v = f.integer("model.max_depth")) g.max_depth = static_cast<int>(*v);
  if (auto v = f.integer("model.n_rounds")) g.n_rounds = static_cast<int>(*v);
  if (auto v = f.number("model.l2_lambda")) g.l2_lambda = *v;
  if (auto v = f.number("model.min_child_weight")) g.min_child_weight = *v;
  if (auto v = f.number("model.gamma")) g.gamma = *v;
  if (auto v = f.number("model.base_score")) g.base_score = *v;
  positive(g.learning_rate, "model.learning_rate");
  if (g.max_depth < 0 || g.n_rounds < 0 || g.l2_lambda < 0.0 || g.min_child_weight < 0.0 || g.gamma < 0.0) {
    throw Error(ErrorKind::ConfigError, "model parameters must be non-negative");
  }
  if (!(g.base_score > 0.0 && g.base_score < 1.0)) throw Error(ErrorKind::ConfigError, "model.base_score must lie in (0, 1)");

  if (auto v = f.number("fusion.c")) c.fusion.regularization_c = *v;
  if (auto v = f.integer("fusion.inner_folds")) c.fusion.inner_folds = static_cast<int>(*v);
  if (auto v = f.number("fusion.tolerance")) c.fusion.tolerance = *v;
  if (auto v = f.integer("fusion.max_iterations")) c.fusion.max_iterations = static_cast<int>(*v);
  positive(c.fusion.regularization_c, "fusion.c");
  if (c.fusion.inner_folds < 2) throw Error(ErrorKind::ConfigError, "fusion.inner_folds must be at least 2");

  if (auto v = f.integer("run.seed")) {
    if (*v < 0) throw Error(ErrorKind::ConfigError, "run.seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = f.integer("run.jobs")) {
    if (*v < 1) throw Error(ErrorKind::ConfigError, "run.jobs must be at least 1");
    c.jobs = static_cast<unsigned>(*v);
  }
  if (auto v = f.strings("run.modalities")) c.modalities = parse_modality_list(*v);
  if (auto v = f.string("analysis.shap_model")) c.shap_model = *v;
  if (auto v = f.strings("analysis.compare_features")) c.compare_features = *v;
  return c;
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& path) {
  return make_run_config(path ? ConfigFile::read(*path) : ConfigFile{});
}

}  // namespace sitm
