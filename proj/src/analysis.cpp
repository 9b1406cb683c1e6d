#include "sitm/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "sitm/error.hpp"
#include "sitm/stats.hpp"

namespace sitm {
namespace {

constexpr int kAqBinWidth = 5;
constexpr int kAqMax = 50;

// Runs the 2x2 test when the table is usable, otherwise leaves a note.
std::optional<TestResult> table_test(const std::array<std::array<std::uint64_t, 2>, 2>& t, const std::string& what,
                                     std::vector<std::string>& notes) {
  try {
    return chi_square_2x2(t);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateTable) throw;
    notes.push_back(what + ": table has an empty row or column, test skipped");
    return std::nullopt;
  }
}

}  // namespace

std::vector<AqBin> aq_histogram(std::span<const std::optional<int>> aq, std::span<const std::uint8_t> misclassified) {
  std::vector<AqBin> bins;
  for (int lo = 0; lo <= kAqMax; lo += kAqBinWidth) {
    bins.push_back({std::to_string(lo) + "-" + std::to_string(lo + kAqBinWidth - 1), 0, 0});
  }
  bins.push_back({"NA", 0, 0});
  for (std::size_t i = 0; i < aq.size(); ++i) {
    AqBin& bin = aq[i] ? bins[static_cast<std::size_t>(std::clamp(*aq[i], 0, kAqMax) / kAqBinWidth)] : bins.back();
    ++bin.total;
    if (misclassified[i]) ++bin.misclassified;
  }
  return bins;
}

MisclassReport misclassification_report(const EvalReport& report, const std::vector<ParticipantMeta>& meta) {
  if (meta.size() != report.labels.size() || report.predictions.size() != report.labels.size()) {
    throw Error(ErrorKind::InputError, "metadata and predictions are not aligned");
  }
  MisclassReport out;
  out.model = report.model;
  std::array<std::array<std::uint64_t, 2>, 2> gender{}, setting{};
  std::vector<double> aq_correct, aq_error;
  std::vector<std::optional<int>> aq(meta.size());
  std::vector<std::uint8_t> wrong_flags(meta.size());

  for (std::size_t i = 0; i < meta.size(); ++i) {
    const bool wrong = report.predictions[i] != report.labels[i];
    (wrong ? out.misclassified : out.correct) += 1;
    const std::size_t row = wrong ? 1 : 0;
    if (meta[i].gender != Gender::D) ++gender[row][meta[i].gender == Gender::M ? 0 : 1];
    ++setting[row][meta[i].setting == Setting::Lab ? 0 : 1];
    aq[i] = meta[i].aq;
    wrong_flags[i] = wrong ? 1 : 0;
    if (meta[i].aq) {
      (wrong ? aq_error : aq_correct).push_back(*meta[i].aq);
    } else {
      ++out.aq_missing;
    }
  }
  out.aq_histogram = aq_histogram(aq, wrong_flags);

  if (out.misclassified == 0) {
    out.notes.push_back("no misclassifications, bias tests skipped");
    return out;
  }
  if (out.correct == 0) {
    out.notes.push_back("no correct predictions, bias tests skipped");
    return out;
  }
  out.gender = table_test(gender, "gender", out.notes);
  out.setting = table_test(setting, "setting", out.notes);
  if (out.aq_missing > 0) {
    out.notes.push_back("AQ test excludes " + std::to_string(out.aq_missing) + " participants without a score");
  }
  if (aq_correct.empty() || aq_error.empty()) {
    out.notes.push_back("aq: a group has no scores, test skipped");
  } else {
    out.aq = mann_whitney_u(aq_correct, aq_error);
  }
  return out;
}

std::vector<AblationRow> ablate_modalities(const std::vector<const ModalityRun*>& runs,
                                           std::span<const std::uint8_t> labels, const FusionParams& params) {
  if (runs.size() < 2) throw Error(ErrorKind::InputError, "ablation needs at least two modalities");
  const double full = late_fusion_loocv(runs, labels, params).metrics.accuracy;
  std::vector<AblationRow> rows;
  for (std::size_t skip = 0; skip < runs.size(); ++skip) {
    std::vector<const ModalityRun*> kept;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      if (k != skip) kept.push_back(runs[k]);
    }
    const double acc = late_fusion_loocv(kept, labels, params).metrics.accuracy;
    rows.push_back({runs[skip]->name, acc, acc - full});
  }
  return rows;
}

GroupComparison group_comparison(const FeatureTable& table, const std::string& column) {
  const auto col = table.find_column(column);
  if (!col) throw Error(ErrorKind::InputError, "unknown feature column '" + column + "'");
  std::vector<double> control, asc;
  for (std::size_t i = 0; i < table.meta.size(); ++i) {
    const double v = table.values(i, *col);
    if (is_missing(v)) continue;
    (table.meta[i].label == Label::ASC ? asc : control).push_back(v);
  }
  if (control.empty() || asc.empty()) {
    throw Error(ErrorKind::InputError, "feature '" + column + "' has no values in one of the groups");
  }
  GroupComparison out;
  out.feature = column;
  out.n_control = control.size();
  out.n_asc = asc.size();
  out.mean_control = stats::mean(control);
  out.mean_asc = stats::mean(asc);
  out.relative_difference = (out.mean_asc - out.mean_control) / std::abs(out.mean_control);
  out.test = mann_whitney_u(control, asc);
  return out;
}

}  // namespace sitm
