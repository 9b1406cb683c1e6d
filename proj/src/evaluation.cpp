#include "sitm/evaluation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "sitm/error.hpp"
#include "sitm/parallel.hpp"
#include "sitm/rng.hpp"

namespace sitm {
namespace {

double class_prior(std::span<const std::uint8_t> labels, std::span<const std::size_t> rows) {
  double pos = 0.0;
  for (auto r : rows) pos += labels[r];
  return pos / static_cast<double>(rows.size());
}

bool single_class(std::span<const std::uint8_t> labels, std::span<const std::size_t> rows) {
  const double prior = class_prior(labels, rows);
  return prior == 0.0 || prior == 1.0;
}

std::vector<std::size_t> without(std::span<const std::size_t> rows, std::span<const std::size_t> removed) {
  std::vector<std::size_t> sorted_removed(removed.begin(), removed.end());
  std::sort(sorted_removed.begin(), sorted_removed.end());
  std::vector<std::size_t> out;
  for (auto r : rows) {
    if (!std::binary_search(sorted_removed.begin(), sorted_removed.end(), r)) out.push_back(r);
  }
  return out;
}

EvalReport make_report(const std::string& name, std::span<const std::uint8_t> labels) {
  EvalReport report;
  report.model = name;
  report.labels.assign(labels.begin(), labels.end());
  report.probabilities.assign(labels.size(), 0.5);
  report.flagged.assign(labels.size(), 0);
  return report;
}

}  // namespace

std::vector<RocPoint> roc_curve(std::span<const std::uint8_t> labels, std::span<const double> probabilities) {
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return probabilities[a] > probabilities[b]; });
  const double positives = static_cast<double>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  const double negatives = static_cast<double>(labels.size()) - positives;

  std::vector<RocPoint> roc = {{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  double tp = 0.0, fp = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double thr = probabilities[order[i]];
    while (i < order.size() && probabilities[order[i]] == thr) {
      (labels[order[i]] ? tp : fp) += 1.0;
      ++i;
    }
    roc.push_back({negatives > 0 ? fp / negatives : 0.0, positives > 0 ? tp / positives : 0.0, thr});
  }
  return roc;
}

double auc_trapezoid(std::span<const RocPoint> roc) {
  double area = 0.0;
  for (std::size_t i = 1; i < roc.size(); ++i) {
    area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) / 2.0;
  }
  return area;
}

Metrics compute_metrics(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions,
                        std::span<const double> probabilities) {
  if (labels.empty()) throw Error(ErrorKind::InputError, "metrics need at least one prediction");
  if (labels.size() != predictions.size() || labels.size() != probabilities.size()) {
    throw Error(ErrorKind::InputError, "labels, predictions and probabilities differ in length");
  }
  Metrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] && predictions[i]) ++m.tp;
    else if (!labels[i] && predictions[i]) ++m.fp;
    else if (!labels[i] && !predictions[i]) ++m.tn;
    else ++m.fn;
  }
  const auto total = static_cast<double>(labels.size());
  m.accuracy = static_cast<double>(m.tp + m.tn) / total;
  m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
  m.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
  m.roc = roc_curve(labels, probabilities);
  m.auc = auc_trapezoid(m.roc);
  return m;
}

void EvalReport::finalize() {
  predictions.resize(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) predictions[i] = probabilities[i] >= 0.5 ? 1 : 0;
  metrics = compute_metrics(labels, predictions, probabilities);
}

std::vector<Fold> loocv_folds(std::size_t n) {
  std::vector<Fold> folds(n);
  for (std::size_t i = 0; i < n; ++i) {
    folds[i].test_row = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) folds[i].train_rows.push_back(j);
    }
  }
  return folds;
}

std::vector<std::vector<std::size_t>> kfold_split(std::span<const std::size_t> rows, int k, std::uint64_t seed) {
  std::vector<std::size_t> shuffled(rows.begin(), rows.end());
  std::mt19937_64 rng(seed);
  shuffle(shuffled, rng);
  const auto folds = static_cast<std::size_t>(std::max(1, std::min<int>(k, static_cast<int>(rows.size()))));
  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t i = 0; i < shuffled.size(); ++i) out[i % folds].push_back(shuffled[i]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

EvalReport loocv(const Matrix& x, std::span<const std::uint8_t> labels, const FoldTrainer& trainer,
                 const LoocvOptions& options) {
  const std::size_t n = x.rows();
  if (n < 3) throw Error(ErrorKind::InputError, "leave-one-out needs at least 3 participants");
  auto report = make_report("loocv", labels);
  const auto folds = loocv_folds(n);
  parallel_for(n, options.jobs, [&](std::size_t i) {
    const auto& fold = folds[i];
    if (single_class(labels, fold.train_rows)) {
      report.probabilities[i] = class_prior(labels, fold.train_rows);
      report.flagged[i] = 1;
      return;
    }
    const std::array<std::size_t, 1> test = {fold.test_row};
    const Matrix fold_x = options.impute ? impute_from_training(x, fold.train_rows, test) : x;
    auto predict = trainer(fold_x, labels, fold.train_rows);
    report.probabilities[i] = predict(fold_x.row(i));
  });
  report.finalize();
  return report;
}

FoldTrainer gbdt_trainer(const GbdtParams& params) {
  return [params](const Matrix& x, std::span<const std::uint8_t> labels, std::span<const std::size_t> rows) {
    auto model = std::make_shared<BoostedModel>(train_gbdt(x, labels, rows, params));
    return FoldPredictor([model](std::span<const double> row) { return model->predict_proba(row); });
  };
}

ModalityRun run_modality(const std::string& name, const Matrix& x, std::span<const std::uint8_t> labels,
                         const GbdtParams& gbdt, const FusionParams& fusion, std::uint64_t seed, unsigned jobs) {
  const std::size_t n = x.rows();
  if (n < 3) throw Error(ErrorKind::InputError, "leave-one-out needs at least 3 participants");
  ModalityRun run;
  run.name = name;
  run.report = make_report(name, labels);
  run.inner = Matrix(n, n);
  const auto folds = loocv_folds(n);

  parallel_for(n, jobs, [&](std::size_t i) {
    const auto& train = folds[i].train_rows;
    const std::array<std::size_t, 1> test = {i};
    if (single_class(labels, train)) {
      const double prior = class_prior(labels, train);
      run.report.probabilities[i] = prior;
      run.report.flagged[i] = 1;
      for (auto j : train) run.inner(i, j) = prior;
      return;
    }
    const Matrix fold_x = impute_from_training(x, train, test);
    const auto model = train_gbdt(fold_x, labels, train, gbdt);
    run.report.probabilities[i] = model.predict_proba(fold_x.row(i));

    const auto inner_sets = kfold_split(train, fusion.inner_folds, derive_seed(seed, i));
    for (const auto& held : inner_sets) {
      const auto inner_train = without(train, held);
      if (single_class(labels, inner_train)) {
        const double prior = class_prior(labels, inner_train);
        for (auto j : held) run.inner(i, j) = prior;
        continue;
      }
      const Matrix inner_x = impute_from_training(x, inner_train, held);
      const auto inner_model = train_gbdt(inner_x, labels, inner_train, gbdt);
      for (auto j : held) run.inner(i, j) = inner_model.predict_proba(inner_x.row(j));
    }
  });
  run.report.finalize();
  return run;
}

EvalReport late_fusion_loocv(const std::vector<const ModalityRun*>& runs, std::span<const std::uint8_t> labels,
                             const FusionParams& params, const std::string& name) {
  if (runs.empty()) throw Error(ErrorKind::InputError, "late fusion needs at least one modality");
  const std::size_t n = labels.size();
  const std::size_t m = runs.size();
  auto report = make_report(name, labels);
  std::vector<std::string> order;
  for (const auto* r : runs) order.push_back(r->name);
  const auto folds = loocv_folds(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& train = folds[i].train_rows;
    if (single_class(labels, train)) {
      report.probabilities[i] = class_prior(labels, train);
      report.flagged[i] = 1;
      continue;
    }
    Matrix probs(n, m);
    for (std::size_t k = 0; k < m; ++k) {
      for (auto j : train) probs(j, k) = runs[k]->inner(i, j);
      probs(i, k) = runs[k]->report.probabilities[i];
    }
    const auto model = late_fusion_fit(probs, labels, train, params, order);
    report.probabilities[i] = model.predict_proba(probs.row(i));
  }
  report.finalize();
  return report;
}

EvalReport late_fusion_loocv(const Matrix& probabilities, std::span<const std::uint8_t> labels,
                             const FusionParams& params, const std::string& name) {
  const std::size_t n = probabilities.rows();
  if (n < 3) throw Error(ErrorKind::InputError, "leave-one-out needs at least 3 participants");
  auto report = make_report(name, labels);
  const auto folds = loocv_folds(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& train = folds[i].train_rows;
    if (single_class(labels, train)) {
      report.probabilities[i] = class_prior(labels, train);
      report.flagged[i] = 1;
      continue;
    }
    const auto model = late_fusion_fit(probabilities, labels, train, params);
    report.probabilities[i] = model.predict_proba(probabilities.row(i));
  }
  report.finalize();
  return report;
}

}  // namespace sitm
