#include "sitm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "sitm/csv.hpp"
#include "sitm/error.hpp"
#include "sitm/rng.hpp"
#include "sitm/serialize.hpp"

namespace sitm {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

std::vector<std::string> column_names(const FeatureTable& table, std::span<const std::size_t> cols) {
  std::vector<std::string> names;
  for (auto c : cols) names.push_back(table.columns[c]);
  return names;
}

std::string rect_row(const std::string& record, const Rect& r) {
  return record + "," + format_double(r.x0) + "," + format_double(r.y0) + "," + format_double(r.x1) + "," +
         format_double(r.y1) + "\n";
}

json test_json(const std::optional<TestResult>& t) {
  if (!t) return nullptr;
  return {{"statistic", t->statistic}, {"p_value", t->p_value}, {"effect_size", t->effect_size},
          {"z", t->z},                 {"n_a", t->n_a},         {"n_b", t->n_b}};
}

json metrics_json(const EvalReport& r) {
  const auto& m = r.metrics;
  return {{"model", r.model},     {"accuracy", m.accuracy}, {"precision", m.precision},
          {"recall", m.recall},   {"auc", m.auc},           {"tp", m.tp},
          {"fp", m.fp},           {"tn", m.tn},             {"fn", m.fn},
          {"flagged_folds", std::count(r.flagged.begin(), r.flagged.end(), std::uint8_t{1})}};
}

std::string roc_csv(const EvalReport& r) {
  std::string out = "fpr,tpr,threshold\n";
  for (const auto& p : r.metrics.roc) {
    out += format_double(p.fpr) + "," + format_double(p.tpr) + "," +
           (std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold)) + "\n";
  }
  return out;
}

CsvTable read_input(const fs::path& path, const std::string& hint) {
  if (!fs::exists(path)) {
    throw Error(ErrorKind::IOError, "missing " + path.string() + "; run `sit-markers " + hint + "` first");
  }
  return CsvTable::read(path);
}

}  // namespace

void OutputBundle::add(const std::string& relative_path, std::string contents) {
  files_[relative_path] = std::move(contents);
}

void OutputBundle::commit(const fs::path& dir) const {
  std::vector<fs::path> written;
  try {
    for (const auto& [rel, contents] : files_) {
      const fs::path target = dir / rel;
      std::error_code ec;
      fs::create_directories(target.parent_path(), ec);
      if (ec) throw Error(ErrorKind::IOError, "cannot create " + target.parent_path().string() + ": " + ec.message());
      write_file_atomic(target, contents);
      written.push_back(target);
    }
  } catch (...) {
    for (const auto& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    throw;
  }
}

// --- extract -------------------------------------------------------------------

ExtractResult run_extract(const fs::path& manifest, const RunConfig& config) {
  ExtractResult r{load_cohort(manifest, config.quality, config.jobs), {}};
  r.extraction = extract_cohort(r.cohort.participants, config.extract, config.jobs);
  return r;
}

ExtractResult run_extract(const std::vector<RawParticipant>& raw, const RunConfig& config) {
  ExtractResult r{build_cohort(raw, config.quality, config.jobs), {}};
  r.extraction = extract_cohort(r.cohort.participants, config.extract, config.jobs);
  return r;
}

OutputBundle extract_outputs(const ExtractResult& result, const RunConfig& config) {
  OutputBundle b;
  b.add("features.csv", format_features_csv(result.extraction.table));
  b.add("qc_log.csv", format_qc_log(result.cohort.qc_log));
  b.add("intermediates/gaze_points.csv", format_gaze_points(result.extraction));
  std::string screen = "record,x0_mm,y0_mm,x1_mm,y1_mm\n";
  screen += rect_row("screen", config.extract.screen.screen_rect());
  screen += rect_row("face_region", config.extract.screen.face_region_mm);
  if (config.extract.home_screen) {
    screen += rect_row("home_screen", config.extract.home_screen->screen_rect());
    screen += rect_row("home_face_region", config.extract.home_screen->face_region_mm);
  }
  b.add("intermediates/screen.csv", screen);
  return b;
}

// --- evaluate ------------------------------------------------------------------

std::vector<const EvalReport*> Evaluation::reports() const {
  std::vector<const EvalReport*> out;
  if (late_fusion) out.push_back(&*late_fusion);
  if (early_fusion) out.push_back(&*early_fusion);
  for (const auto& run : unimodal) out.push_back(&run.report);
  return out;
}

const EvalReport& Evaluation::headline() const { return *reports().front(); }

Evaluation run_evaluate(const FeatureTable& table, const RunConfig& config, const EvaluateOptions& options) {
  const std::size_t n = table.meta.size();
  if (n < 3) throw Error(ErrorKind::ConfigError, "evaluation needs at least 3 participants, got " + std::to_string(n));
  const auto labels = table.labels();
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  if (positives == 0 || positives == n) throw Error(ErrorKind::DegenerateLabels, "the cohort holds a single class");

  Evaluation ev;
  ev.meta = table.meta;
  std::vector<std::string> ids;
  for (const auto& m : table.meta) ids.push_back(m.id);
  const auto rows = all_rows(n);
  std::map<std::string, std::vector<std::size_t>> model_columns;

  std::vector<std::size_t> fused_cols;
  for (std::size_t k = 0; k < kModalities.size(); ++k) {
    const Modality m = kModalities[k];
    if (std::find(config.modalities.begin(), config.modalities.end(), m) == config.modalities.end()) continue;
    const std::string name(to_string(m));
    const auto cols = table.columns_of(m);
    if (cols.empty()) {
      ev.notes.push_back("modality " + name + " has no feature columns and was skipped");
      continue;
    }
    fused_cols.insert(fused_cols.end(), cols.begin(), cols.end());
    const Matrix x = table.values.select_columns(cols);
    auto run = run_modality(name, x, labels, config.gbdt, config.fusion, derive_seed(config.seed, k), config.jobs);
    run.report.ids = ids;
    ev.models[name] = train_gbdt(impute_from_training(x, rows, {}), labels, config.gbdt, column_names(table, cols));
    model_columns[name] = cols;
    ev.unimodal.push_back(std::move(run));
  }
  if (ev.unimodal.empty()) throw Error(ErrorKind::ConfigError, "none of the selected modalities has features");

  if (ev.unimodal.size() >= 2) {
    std::sort(fused_cols.begin(), fused_cols.end());
    const Matrix x = table.values.select_columns(fused_cols);
    auto early = loocv(x, labels, gbdt_trainer(config.gbdt), {true, config.jobs});
    early.model = "early_fusion";
    early.ids = ids;
    ev.early_fusion = std::move(early);
    ev.models["early_fusion"] =
        train_gbdt(impute_from_training(x, rows, {}), labels, config.gbdt, column_names(table, fused_cols));
    model_columns["early_fusion"] = fused_cols;

    std::vector<const ModalityRun*> runs;
    std::vector<std::string> order;
    Matrix oof(n, ev.unimodal.size());
    for (std::size_t k = 0; k < ev.unimodal.size(); ++k) {
      runs.push_back(&ev.unimodal[k]);
      order.push_back(ev.unimodal[k].name);
      for (std::size_t i = 0; i < n; ++i) oof(i, k) = ev.unimodal[k].report.probabilities[i];
    }
    auto late = late_fusion_loocv(runs, labels, config.fusion);
    late.ids = ids;
    ev.late_fusion = std::move(late);
    ev.fusion_model = late_fusion_fit(oof, labels, config.fusion, order);

    if (options.ablate) ev.ablation = ablate_modalities(runs, labels, config.fusion);
  } else if (options.ablate) {
    ev.notes.push_back("ablation needs at least two modalities");
  }

  ev.misclass = misclassification_report(ev.headline(), table.meta);

  for (const auto& feature : config.compare_features) {
    if (!table.find_column(feature)) {
      ev.notes.push_back("comparison feature " + feature + " is not in the table");
      continue;
    }
    try {
      ev.comparisons.push_back(group_comparison(table, feature));
    } catch (const Error& e) {
      ev.notes.push_back(e.what());
    }
  }

  if (options.shap) {
    const auto it = ev.models.find(config.shap_model);
    if (it == ev.models.end()) {
      throw Error(ErrorKind::ConfigError, "SHAP model '" + config.shap_model + "' was not trained in this run");
    }
    const auto& cols = model_columns[config.shap_model];
    const Matrix x = impute_from_training(table.values.select_columns(cols), rows, {});
    ShapTable shap{config.shap_model, column_names(table, cols), {}};
    for (std::size_t i = 0; i < n; ++i) shap.rows.push_back(tree_shap(it->second, x.row(i)));
    ev.shap = std::move(shap);
  }
  return ev;
}

std::string format_summary_csv(const Evaluation& eval) {
  std::string out = "model,accuracy,precision,recall\n";
  for (const auto* r : eval.reports()) {
    out += r->model + "," + format_double(r->metrics.accuracy) + "," + format_double(r->metrics.precision) + "," +
           format_double(r->metrics.recall) + "\n";
  }
  return out;
}

OutputBundle evaluate_outputs(const Evaluation& ev, const RunConfig& config) {
  OutputBundle b;
  b.add("summary.csv", format_summary_csv(ev));
  for (const auto* r : ev.reports()) b.add("roc/" + r->model + ".csv", roc_csv(*r));
  for (const auto& [name, model] : ev.models) b.add("models/" + name + ".json", boosted_model_to_json(model));
  if (ev.fusion_model) b.add("models/late_fusion.json", fusion_model_to_json(*ev.fusion_model));

  const auto& head = ev.headline();
  std::string mis = "id,label,gender,setting,aq,probability,prediction,correct\n";
  for (std::size_t i = 0; i < ev.meta.size(); ++i) {
    const auto& m = ev.meta[i];
    mis += m.id + "," + std::string(to_string(m.label)) + "," + std::string(to_string(m.gender)) + "," +
           std::string(to_string(m.setting)) + "," + (m.aq ? std::to_string(*m.aq) : "") + "," +
           format_double(head.probabilities[i]) + "," +
           std::string(to_string(head.predictions[i] ? Label::ASC : Label::NonASC)) + "," +
           (head.predictions[i] == head.labels[i] ? "1" : "0") + "\n";
  }
  b.add("misclass.csv", mis);

  if (ev.shap) {
    std::string s = "id,label,base_value";
    for (const auto& f : ev.shap->features) s += "," + f;
    s += "\n";
    for (std::size_t i = 0; i < ev.shap->rows.size(); ++i) {
      s += ev.meta[i].id + "," + std::string(to_string(ev.meta[i].label)) + "," +
           format_double(ev.shap->rows[i].base_value);
      for (double c : ev.shap->rows[i].contributions) s += "," + format_double(c);
      s += "\n";
    }
    b.add("shap.csv", s);
  }

  json models = json::array();
  for (const auto* r : ev.reports()) models.push_back(metrics_json(*r));
  const auto& mc = ev.misclass;
  json bins = json::array();
  for (const auto& bin : mc.aq_histogram) {
    bins.push_back({{"bin", bin.label}, {"misclassified", bin.misclassified}, {"total", bin.total}});
  }
  json ablation = nullptr;
  if (ev.ablation) {
    ablation = json::array();
    for (const auto& a : *ev.ablation) {
      ablation.push_back({{"removed", a.removed}, {"accuracy", a.accuracy}, {"delta", a.delta}});
    }
  }
  json comparisons = json::array();
  for (const auto& c : ev.comparisons) {
    comparisons.push_back({{"feature", c.feature},
                           {"n_control", c.n_control},
                           {"n_asc", c.n_asc},
                           {"mean_control", c.mean_control},
                           {"mean_asc", c.mean_asc},
                           {"relative_difference", c.relative_difference},
                           {"mann_whitney", test_json(c.test)}});
  }
  const auto& sc = config.extract.screen;
  const auto& mo = config.extract.motion;
  json report = {
      {"format", "sit-markers/report"},
      {"version", 1},
      {"seed", config.seed},
      {"n_participants", ev.meta.size()},
      {"n_asc", std::count_if(ev.meta.begin(), ev.meta.end(), [](const auto& m) { return m.label == Label::ASC; })},
      {"settings",
       {{"motion",
         {{"ivt_threshold_deg_s", mo.ivt_threshold_deg_s},
          {"stability_threshold_deg_s", mo.stability_threshold_deg_s},
          {"nod_amplitude_deg", mo.nod_amplitude_deg},
          {"nod_window_s", mo.nod_window_s}}},
        {"screen",
         {{"eye_to_screen_mm", sc.eye_to_screen_mm},
          {"camera_offset_mm", {sc.camera_offset_mm.x, sc.camera_offset_mm.y}},
          {"size_mm", {sc.screen_size_mm.x, sc.screen_size_mm.y}},
          {"face_region_mm", {sc.face_region_mm.x0, sc.face_region_mm.y0, sc.face_region_mm.x1, sc.face_region_mm.y1}},
          {"gaze_sign", {sc.gaze_sign.x, sc.gaze_sign.y}}}},
        {"model",
         {{"learning_rate", config.gbdt.learning_rate},
          {"max_depth", config.gbdt.max_depth},
          {"n_rounds", config.gbdt.n_rounds},
          {"l2_lambda", config.gbdt.l2_lambda},
          {"min_child_weight", config.gbdt.min_child_weight},
          {"gamma", config.gbdt.gamma},
          {"base_score", config.gbdt.base_score}}},
        {"fusion", {{"c", config.fusion.regularization_c}, {"inner_folds", config.fusion.inner_folds}}}}},
      {"models", models},
      {"misclassification",
       {{"model", mc.model},
        {"correct", mc.correct},
        {"misclassified", mc.misclassified},
        {"gender_chi_square", test_json(mc.gender)},
        {"setting_chi_square", test_json(mc.setting)},
        {"aq_mann_whitney", test_json(mc.aq)},
        {"aq_missing", mc.aq_missing},
        {"aq_histogram", bins},
        {"notes", mc.notes}}},
      {"effect_size",
       "Mann-Whitney r = Z / sqrt(n_a + n_b), Z with tie and continuity correction; group a is the correctly "
       "classified (misclassification) or control group (comparisons). Chi-square effect size is signed phi."},
      {"ablation", ablation},
      {"group_comparisons", comparisons},
      {"notes", ev.notes}};
  b.add("report.json", report.dump(2) + "\n");
  return b;
}

// --- plot data -------------------------------------------------------------------

OutputBundle plotdata_outputs(const fs::path& report_dir, const fs::path& extract_dir) {
  OutputBundle b;

  const auto summary = read_input(report_dir / "summary.csv", "evaluate");
  std::string roc = "model,fpr,tpr,threshold\n";
  for (std::size_t r = 0; r < summary.rows(); ++r) {
    const std::string model(summary.cell(r, summary.column("model")));
    const auto t = read_input(report_dir / "roc" / (model + ".csv"), "evaluate");
    for (std::size_t k = 0; k < t.rows(); ++k) {
      roc += model + "," + std::string(t.cell(k, 0)) + "," + std::string(t.cell(k, 1)) + "," +
             std::string(t.cell(k, 2)) + "\n";
    }
  }
  b.add("roc_points.csv", roc);

  const auto screen = read_input(extract_dir / "intermediates" / "screen.csv", "extract");
  const auto points = read_input(extract_dir / "intermediates" / "gaze_points.csv", "extract");
  std::string gaze = "record,group,phase,x_mm,y_mm,x2_mm,y2_mm\n";
  for (std::size_t r = 0; r < screen.rows(); ++r) {
    gaze += std::string(screen.cell(r, 0)) + ",,," + std::string(screen.cell(r, 1)) + "," +
            std::string(screen.cell(r, 2)) + "," + std::string(screen.cell(r, 3)) + "," +
            std::string(screen.cell(r, 4)) + "\n";
  }
  const auto c_label = points.column("label"), c_phase = points.column("phase");
  const auto c_x = points.column("x_mm"), c_y = points.column("y_mm");
  for (std::size_t r = 0; r < points.rows(); ++r) {
    gaze += "point," + std::string(points.cell(r, c_label)) + "," + std::string(points.cell(r, c_phase)) + "," +
            std::string(points.cell(r, c_x)) + "," + std::string(points.cell(r, c_y)) + ",,\n";
  }
  b.add("gaze_projection_points.csv", gaze);

  const auto mis = read_input(report_dir / "misclass.csv", "evaluate");
  const auto c_aq = mis.column("aq"), c_ok = mis.column("correct");
  std::vector<std::optional<int>> aq;
  std::vector<std::uint8_t> wrong;
  for (std::size_t r = 0; r < mis.rows(); ++r) {
    const auto v = mis.optional_number(r, c_aq);
    aq.push_back(v ? std::optional<int>(static_cast<int>(*v)) : std::nullopt);
    wrong.push_back(mis.cell(r, c_ok) == "0" ? 1 : 0);
  }
  std::string hist = "bin,misclassified,total\n";
  for (const auto& bin : aq_histogram(aq, wrong)) {
    hist += bin.label + "," + std::to_string(bin.misclassified) + "," + std::to_string(bin.total) + "\n";
  }
  b.add("aq_misclass_hist.csv", hist);
  return b;
}

}  // namespace sitm
