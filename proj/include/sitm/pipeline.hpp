#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sitm/analysis.hpp"
#include "sitm/config.hpp"
#include "sitm/extract.hpp"
#include "sitm/shap.hpp"
#include "sitm/synth.hpp"

namespace sitm {

/// Files produced by one command, written together at the end. If any write
/// fails the files already written by this bundle are removed again.
class OutputBundle {
public:
  void add(const std::string& relative_path, std::string contents);
  void commit(const std::filesystem::path& dir) const;
  const std::map<std::string, std::string>& files() const { return files_; }

private:
  std::map<std::string, std::string> files_;
};

// --- extract -----------------------------------------------------------------

struct ExtractResult {
  Cohort cohort;
  Extraction extraction;
};

ExtractResult run_extract(const std::filesystem::path& manifest, const RunConfig& config);
ExtractResult run_extract(const std::vector<RawParticipant>& raw, const RunConfig& config);
/// features.csv, qc_log.csv and the gaze intermediates.
OutputBundle extract_outputs(const ExtractResult& result, const RunConfig& config);

// --- evaluate ----------------------------------------------------------------

struct EvaluateOptions {
  bool ablate = false;
  bool shap = false;
};

struct ShapTable {
  std::string model;
  std::vector<std::string> features;
  std::vector<ShapAttribution> rows;  // one per participant
};

struct Evaluation {
  std::vector<ParticipantMeta> meta;
  std::vector<ModalityRun> unimodal;          // selected modalities that have columns
  std::optional<EvalReport> early_fusion;     // with two or more modalities
  std::optional<EvalReport> late_fusion;
  std::map<std::string, BoostedModel> models;  // refit on every participant
  std::optional<FusionModel> fusion_model;
  MisclassReport misclass;                     // for the headline model
  std::optional<std::vector<AblationRow>> ablation;
  std::vector<GroupComparison> comparisons;
  std::optional<ShapTable> shap;
  std::vector<std::string> notes;

  /// Reports in summary order: late fusion, early fusion, then unimodal.
  std::vector<const EvalReport*> reports() const;
  const EvalReport& headline() const;
};

/// Needs at least 3 participants (ConfigError) and both labels.
Evaluation run_evaluate(const FeatureTable& table, const RunConfig& config, const EvaluateOptions& options);

/// summary.csv, report.json, roc/<model>.csv, misclass.csv, models/*.json and,
/// when computed, shap.csv.
OutputBundle evaluate_outputs(const Evaluation& eval, const RunConfig& config);

std::string format_summary_csv(const Evaluation& eval);

// --- plot data -----------------------------------------------------------------

/// roc_points.csv, gaze_projection_points.csv and aq_misclass_hist.csv from an
/// evaluate bundle and an extract output directory. Throws IOError naming
/// the command to run when an input is missing.
OutputBundle plotdata_outputs(const std::filesystem::path& report_dir, const std::filesystem::path& extract_dir);

}  // namespace sitm
