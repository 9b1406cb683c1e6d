#include "support.hpp"

#include <algorithm>
#include <set>

#include "sitm/evaluation.hpp"
#include "sitm/fusion.hpp"

using namespace sitm;

namespace {

std::vector<std::uint8_t> alternating(std::size_t n) {
  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 2;
  return y;
}

}  // namespace

TEST_CASE("perfect predictions") {
  const std::vector<std::uint8_t> y = {0, 1, 1, 0, 1};
  const std::vector<double> p = {0.1, 0.9, 0.8, 0.3, 0.7};
  const auto m = compute_metrics(y, y, p);
  CHECK(m.accuracy == 1.0);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.auc == 1.0);
}

TEST_CASE("all-positive predictions on a balanced set") {
  const std::vector<std::uint8_t> y = {0, 1, 0, 1}, pred(4, 1);
  const std::vector<double> p(4, 0.9);
  const auto m = compute_metrics(y, pred, p);
  CHECK(m.recall == 1.0);
  CHECK(m.precision == 0.5);
  CHECK(m.auc == 0.5);
}

TEST_CASE("no positive predictions gives zero precision") {
  const std::vector<std::uint8_t> y = {0, 1}, pred = {0, 0};
  const std::vector<double> p = {0.2, 0.3};
  CHECK(compute_metrics(y, pred, p).precision == 0.0);
  CHECK(test::error_kind_of([] { compute_metrics({}, {}, {}); }) == ErrorKind::InputError);
}

TEST_CASE("ROC of a perfect model") {
  const std::vector<std::uint8_t> y = {0, 0, 1, 1};
  const std::vector<double> p = {0.2, 0.2, 0.9, 0.9};
  const auto roc = roc_curve(y, p);
  REQUIRE(roc.size() == 3);
  CHECK(roc[0].fpr == 0.0);
  CHECK(roc[0].tpr == 0.0);
  CHECK(std::isinf(roc[0].threshold));
  CHECK(roc[1].fpr == 0.0);
  CHECK(roc[1].tpr == 1.0);
  CHECK(roc[2].fpr == 1.0);
  CHECK(roc[2].tpr == 1.0);
}

TEST_CASE("AUC agrees with the pairwise definition") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u;
  std::vector<std::uint8_t> y(200);
  std::vector<double> p(200);
  for (std::size_t i = 0; i < 200; ++i) {
    y[i] = u(rng) < 0.4;
    p[i] = std::round((u(rng) + 0.3 * y[i]) * 20) / 20;
  }
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < 200; ++i)
    for (std::size_t j = 0; j < 200; ++j)
      if (y[i] && !y[j]) {
        pairs += 1;
        wins += p[i] > p[j] ? 1.0 : (p[i] == p[j] ? 0.5 : 0.0);
      }
  CHECK(auc_trapezoid(roc_curve(y, p)) == doctest::Approx(wins / pairs).epsilon(1e-12));
}

TEST_CASE("independent scores give chance AUC") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u;
  std::vector<std::uint8_t> y(1000);
  std::vector<double> p(1000);
  for (std::size_t i = 0; i < 1000; ++i) y[i] = u(rng) < 0.5, p[i] = u(rng);
  const double auc = auc_trapezoid(roc_curve(y, p));
  CHECK(auc >= 0.45);
  CHECK(auc <= 0.55);
}

TEST_CASE("leave-one-out folds partition the participants") {
  const auto folds = loocv_folds(5);
  REQUIRE(folds.size() == 5);
  std::set<std::size_t> tests;
  for (const auto& f : folds) {
    CHECK(tests.insert(f.test_row).second);
    CHECK(f.train_rows.size() == 4);
    CHECK(std::find(f.train_rows.begin(), f.train_rows.end(), f.test_row) == f.train_rows.end());
  }
  CHECK(tests.size() == 5);
}

TEST_CASE("k-fold splits are disjoint, complete and seeded") {
  std::vector<std::size_t> rows = {0, 2, 3, 5, 7, 8, 9, 11, 12, 14, 15};
  const auto a = kfold_split(rows, 5, 99);
  const auto b = kfold_split(rows, 5, 99);
  CHECK(a == b);
  std::vector<std::size_t> all;
  for (const auto& f : a) {
    CHECK(f.size() >= 2);
    all.insert(all.end(), f.begin(), f.end());
  }
  std::sort(all.begin(), all.end());
  CHECK(all == rows);
  CHECK(kfold_split(rows, 5, 100) != a);
}

TEST_CASE("leave-one-out is deterministic") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  Matrix x(20, 5);
  for (std::size_t r = 0; r < 20; ++r)
    for (std::size_t c = 0; c < 5; ++c) x(r, c) = nd(rng);
  const auto y = alternating(20);
  GbdtParams p;
  p.n_rounds = 10;
  const auto a = loocv(x, y, gbdt_trainer(p));
  const auto b = loocv(x, y, gbdt_trainer(p), {true, 3});
  CHECK(a.probabilities == b.probabilities);
}

TEST_CASE("shuffled labels on noise features stay near chance") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  Matrix x(100, 20);
  for (std::size_t r = 0; r < 100; ++r)
    for (std::size_t c = 0; c < 20; ++c) x(r, c) = nd(rng);
  auto y = alternating(100);
  std::shuffle(y.begin(), y.end(), rng);
  const auto report = loocv(x, y, gbdt_trainer(GbdtParams{}));
  CHECK(report.metrics.accuracy >= 0.35);
  CHECK(report.metrics.accuracy <= 0.65);
}

TEST_CASE("folds with a single training class are flagged and scored with the prior") {
  Matrix x(3, 1, 0.0);
  const std::vector<std::uint8_t> y = {1, 0, 0};
  const auto report = loocv(x, y, gbdt_trainer(GbdtParams{}));
  CHECK(report.flagged[0] == 1);
  CHECK(report.probabilities[0] == 0.0);
  CHECK(report.flagged[1] == 0);
}

TEST_CASE("polynomial expansion order") {
  const std::vector<double> p = {2.0, 3.0};
  CHECK(polynomial_features(p) == std::vector<double>{1, 2, 3, 4, 6, 9});
  CHECK(polynomial_feature_count(3) == 10);
}

TEST_CASE("fusion of a modality equal to the labels separates perfectly") {
  const std::size_t n = 30;
  const auto y = alternating(n);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u;
  Matrix probs(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    probs(i, 0) = u(rng);
    probs(i, 1) = y[i];
    probs(i, 2) = 0.5;
  }
  const auto report = late_fusion_loocv(probs, y, FusionParams{});
  CHECK(report.metrics.accuracy == 1.0);
}

TEST_CASE("constant fusion inputs predict the class prior") {
  const std::vector<std::uint8_t> y = {1, 1, 0, 0, 0, 0, 0, 1, 0, 0};
  const Matrix probs(10, 2, 0.5);
  const auto model = late_fusion_fit(probs, y, FusionParams{});
  const std::vector<double> row = {0.5, 0.5};
  CHECK(model.predict_proba(row) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(model.converged);
}

TEST_CASE("fusion rejects values outside [0, 1]") {
  Matrix probs(4, 1, 0.5);
  probs(2, 0) = 1.5;
  const std::vector<std::uint8_t> y = {0, 1, 0, 1};
  CHECK(test::error_kind_of([&] { late_fusion_fit(probs, y, FusionParams{}); }) == ErrorKind::InputError);
}

TEST_CASE("nested late fusion never looks at the held-out label") {
  // Flipping one participant's label must not change its own fused score.
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  const std::size_t n = 16;
  Matrix a(n, 2), b(n, 2);
  auto y = alternating(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < 2; ++c) a(r, c) = nd(rng) + y[r];
    for (std::size_t c = 0; c < 2; ++c) b(r, c) = nd(rng);
  }
  GbdtParams gp;
  gp.n_rounds = 5;
  FusionParams fp;
  const auto ra = run_modality("a", a, y, gp, fp, 1);
  const auto rb = run_modality("b", b, y, gp, fp, 2);
  const auto fused = late_fusion_loocv({&ra, &rb}, y, fp);
  auto y2 = y;
  y2[3] = 1 - y2[3];
  const auto ra2 = run_modality("a", a, y2, gp, fp, 1);
  const auto rb2 = run_modality("b", b, y2, gp, fp, 2);
  const auto fused2 = late_fusion_loocv({&ra2, &rb2}, y2, fp);
  CHECK(fused.probabilities[3] == fused2.probabilities[3]);
  CHECK(ra.report.probabilities[3] == ra2.report.probabilities[3]);
}
