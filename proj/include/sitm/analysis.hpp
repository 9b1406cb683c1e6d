#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sitm/evaluation.hpp"
#include "sitm/hypothesis.hpp"
#include "sitm/types.hpp"

namespace sitm {

struct AqBin {
  std::string label;  // "0-4", "5-9", ..., "NA"
  std::size_t misclassified = 0;
  std::size_t total = 0;
};

/// Width-5 AQ bins from 0-4 up to 50-54 plus an "NA" bin for missing scores.
std::vector<AqBin> aq_histogram(std::span<const std::optional<int>> aq, std::span<const std::uint8_t> misclassified);

/// Bias checks on out-of-fold predictions: is being misclassified related to
/// gender, recording setting, or AQ?
struct MisclassReport {
  std::string model;
  std::size_t correct = 0;
  std::size_t misclassified = 0;
  std::optional<TestResult> gender;   // correct/error x M/F; D is left out of the table
  std::optional<TestResult> setting;  // correct/error x lab/home
  std::optional<TestResult> aq;       // U test, a = correct, b = misclassified
  std::size_t aq_missing = 0;         // participants without an AQ score
  std::vector<AqBin> aq_histogram;
  std::vector<std::string> notes;     // why a test was not run
};

/// `meta` must be aligned with the report rows.
MisclassReport misclassification_report(const EvalReport& report, const std::vector<ParticipantMeta>& meta);

struct AblationRow {
  std::string removed;
  double accuracy = 0.0;  // late fusion without `removed`
  double delta = 0.0;     // accuracy minus the full late-fusion accuracy
};

/// Re-runs late fusion once per modality with that modality left out.
/// Needs at least two runs.
std::vector<AblationRow> ablate_modalities(const std::vector<const ModalityRun*>& runs,
                                           std::span<const std::uint8_t> labels, const FusionParams& params);

/// Control-vs-ASC comparison of one feature column (missing values skipped).
/// Group a is control, so r < 0 means control values are lower.
struct GroupComparison {
  std::string feature;
  std::size_t n_control = 0, n_asc = 0;
  double mean_control = 0.0, mean_asc = 0.0;
  double relative_difference = 0.0;  // (mean_asc - mean_control) / |mean_control|
  TestResult test;
};

GroupComparison group_comparison(const FeatureTable& table, const std::string& column);

}  // namespace sitm
