#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sitm/feature_table.hpp"
#include "sitm/fusion.hpp"
#include "sitm/gbdt.hpp"

namespace sitm {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the origin
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;  // 0 when nothing is predicted positive
  double recall = 0.0;     // 0 when there are no positives
  double auc = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::vector<RocPoint> roc;
};

/// ROC over the sorted unique probability thresholds (score >= threshold is
/// positive), starting at (0, 0).
std::vector<RocPoint> roc_curve(std::span<const std::uint8_t> labels, std::span<const double> probabilities);
double auc_trapezoid(std::span<const RocPoint> roc);

/// Positive class is label 1 (ASC). Throws InputError on empty or mismatched input.
Metrics compute_metrics(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions,
                        std::span<const double> probabilities);

struct EvalReport {
  std::string model;
  std::vector<std::string> ids;
  std::vector<std::uint8_t> labels;
  std::vector<double> probabilities;  // out-of-fold
  std::vector<std::uint8_t> predictions;
  std::vector<std::uint8_t> flagged;  // fold trained on a single class; scored with the prior
  Metrics metrics;

  /// Thresholds probabilities at 0.5 and recomputes metrics.
  void finalize();
};

struct Fold {
  std::vector<std::size_t> train_rows;
  std::size_t test_row = 0;
};

/// One fold per participant, holding that participant out.
std::vector<Fold> loocv_folds(std::size_t n);

/// Deterministic K-fold split of `rows` (shuffled by `seed`); returns K disjoint test sets.
std::vector<std::vector<std::size_t>> kfold_split(std::span<const std::size_t> rows, int k, std::uint64_t seed);

using FoldPredictor = std::function<double(std::span<const double>)>;
/// Trains on `train_rows` of an already-imputed matrix.
using FoldTrainer =
    std::function<FoldPredictor(const Matrix& x, std::span<const std::uint8_t> labels, std::span<const std::size_t> train_rows)>;

struct LoocvOptions {
  bool impute = true;  // per-fold training-median imputation
  unsigned jobs = 1;
};

/// Participant-level leave-one-out. Needs at least 3 rows.
EvalReport loocv(const Matrix& x, std::span<const std::uint8_t> labels, const FoldTrainer& trainer,
                 const LoocvOptions& options = {});

FoldTrainer gbdt_trainer(const GbdtParams& params);

/// Outer LOOCV of one modality plus, per outer fold, inner K-fold
/// out-of-fold probabilities for every training participant. Those inner
/// scores train the late-fusion combiner without touching the held-out row.
struct ModalityRun {
  std::string name;
  EvalReport report;
  Matrix inner;  // inner(i, j): inner OOF probability of j in outer fold i; NaN at j == i
};

ModalityRun run_modality(const std::string& name, const Matrix& x, std::span<const std::uint8_t> labels,
                         const GbdtParams& gbdt, const FusionParams& fusion, std::uint64_t seed, unsigned jobs = 1);

/// Nested late fusion over the given modality runs (all on the same rows).
EvalReport late_fusion_loocv(const std::vector<const ModalityRun*>& runs, std::span<const std::uint8_t> labels,
                             const FusionParams& params, const std::string& name = "late_fusion");

/// LOOCV of the combiner alone on precomputed (out-of-fold) probabilities.
EvalReport late_fusion_loocv(const Matrix& probabilities, std::span<const std::uint8_t> labels,
                             const FusionParams& params, const std::string& name = "late_fusion");

}  // namespace sitm
