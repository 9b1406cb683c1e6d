#include "support.hpp"

#include <numeric>

#include "sitm/analysis.hpp"

using namespace sitm;

namespace {

/// A modality whose inner and outer scores are the fixed probabilities `p`.
ModalityRun fixed_run(const std::string& name, const std::vector<double>& p, const std::vector<std::uint8_t>& y) {
  ModalityRun run;
  run.name = name;
  run.report.model = name;
  run.report.labels = y;
  run.report.probabilities = p;
  run.report.flagged.assign(y.size(), 0);
  run.report.finalize();
  run.inner = Matrix(y.size(), y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (i != j) run.inner(i, j) = p[j];
  return run;
}

std::vector<std::uint8_t> balanced(std::size_t n) {
  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 2;
  return y;
}

std::vector<ParticipantMeta> cohort_meta(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u;
  std::vector<ParticipantMeta> meta(n);
  for (std::size_t i = 0; i < n; ++i) {
    meta[i].id = "P" + std::to_string(i);
    meta[i].label = i % 2 ? Label::ASC : Label::NonASC;
    meta[i].gender = i % 2 == (i / 2) % 2 ? Gender::M : Gender::F;
    meta[i].setting = i % 3 == 0 ? Setting::Home : Setting::Lab;
    meta[i].aq = static_cast<int>(10 + 20 * u(rng));
  }
  return meta;
}

EvalReport report_with_errors(const std::vector<std::uint8_t>& y, const std::vector<std::size_t>& wrong) {
  EvalReport r;
  r.model = "m";
  r.labels = y;
  r.flagged.assign(y.size(), 0);
  r.probabilities.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r.probabilities[i] = y[i] ? 0.8 : 0.2;
  for (auto i : wrong) r.probabilities[i] = 1.0 - r.probabilities[i];
  r.finalize();
  return r;
}

}  // namespace

TEST_CASE("AQ histogram bins and conservation") {
  const std::vector<std::optional<int>> aq = {0, 4, 5, 17, 54, std::nullopt, 23, 23};
  const std::vector<std::uint8_t> wrong = {1, 0, 1, 1, 1, 1, 0, 1};
  const auto bins = aq_histogram(aq, wrong);
  REQUIRE(bins.size() == 12);
  CHECK(bins[0].label == "0-4");
  CHECK(bins[0].total == 2);
  CHECK(bins[0].misclassified == 1);
  CHECK(bins[10].label == "50-54");
  CHECK(bins[10].misclassified == 1);
  CHECK(bins.back().label == "NA");
  CHECK(bins.back().misclassified == 1);
  std::size_t mis = 0, total = 0;
  for (const auto& b : bins) mis += b.misclassified, total += b.total;
  CHECK(mis == 6);
  CHECK(total == aq.size());
}

TEST_CASE("errors spread evenly across genders give a large p") {
  std::mt19937_64 rng(3);
  const auto y = balanced(80);
  const auto meta = cohort_meta(80, rng);
  std::vector<std::size_t> wrong;
  for (std::size_t i = 0; i < 80; i += 4) wrong.push_back(i), wrong.push_back(i + 1);
  const auto report = misclassification_report(report_with_errors(y, wrong), meta);
  REQUIRE(report.gender);
  CHECK(report.gender->p_value > 0.5);
  CHECK(report.misclassified == wrong.size());
  REQUIRE(report.aq);
  CHECK(report.aq->n_a + report.aq->n_b == 80);
}

TEST_CASE("identical AQ distributions give a U p near 1") {
  const auto y = balanced(40);
  std::vector<ParticipantMeta> meta(40);
  std::vector<std::size_t> wrong;
  for (std::size_t i = 0; i < 40; ++i) {
    meta[i].aq = static_cast<int>(i / 2);
    if (i % 2) wrong.push_back(i);
  }
  // Pairs (2k, 2k+1) share a score; one of each pair is misclassified.
  const auto report = misclassification_report(report_with_errors(y, wrong), meta);
  REQUIRE(report.aq);
  CHECK(report.aq->p_value > 0.95);
}

TEST_CASE("an all-correct model gets notes instead of tests") {
  std::mt19937_64 rng(1);
  const auto y = balanced(10);
  const auto report = misclassification_report(report_with_errors(y, {}), cohort_meta(10, rng));
  CHECK_FALSE(report.gender);
  CHECK_FALSE(report.setting);
  CHECK_FALSE(report.aq);
  CHECK_FALSE(report.notes.empty());
}

TEST_CASE("a table with an empty column is reported, not tested") {
  const auto y = balanced(10);
  std::vector<ParticipantMeta> meta(10);
  for (std::size_t i = 0; i < meta.size(); ++i) {
    meta[i].gender = Gender::F;
    meta[i].setting = i % 2 ? Setting::Home : Setting::Lab;
  }
  const auto report = misclassification_report(report_with_errors(y, {0, 3}), meta);
  CHECK_FALSE(report.gender);
  CHECK(report.setting);
  CHECK_FALSE(report.notes.empty());
}

TEST_CASE("ablation of a perfect modality") {
  const std::size_t n = 60;
  const auto y = balanced(n);
  std::mt19937_64 rng(44);
  std::normal_distribution<double> nd;
  std::vector<double> perfect(n), noisy(n), flat(n, 0.5);
  for (std::size_t i = 0; i < n; ++i) {
    perfect[i] = y[i];
    noisy[i] = sigmoid((y[i] ? 0.8 : -0.8) + nd(rng));
  }
  const auto a = fixed_run("perfect", perfect, y);
  const auto b = fixed_run("noisy", noisy, y);
  const auto c = fixed_run("flat", flat, y);
  const auto rows = ablate_modalities({&a, &b, &c}, y, FusionParams{});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].removed == "perfect");
  CHECK(rows[0].accuracy + 1e-12 >= b.report.metrics.accuracy - 0.05);
  CHECK(rows[0].accuracy <= b.report.metrics.accuracy + 0.05);
  CHECK(rows[0].delta < -0.1);
  CHECK(std::abs(rows[2].delta) <= 0.02);
}

TEST_CASE("fusion of a single modality reproduces its accuracy") {
  const std::size_t n = 60;
  const auto y = balanced(n);
  std::mt19937_64 rng(45);
  std::normal_distribution<double> nd;
  std::vector<double> p(n), q(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = sigmoid((y[i] ? 1.0 : -1.0) + nd(rng));
    q[i] = sigmoid(nd(rng));
  }
  const auto a = fixed_run("a", p, y);
  const auto b = fixed_run("b", q, y);
  const auto rows = ablate_modalities({&a, &b}, y, FusionParams{});
  CHECK(rows[1].accuracy == doctest::Approx(a.report.metrics.accuracy).epsilon(0.05));
  CHECK(test::error_kind_of([&] { ablate_modalities({&a}, y, FusionParams{}); }) == ErrorKind::InputError);
}

TEST_CASE("group comparison orients r with control as the first group") {
  FeatureTable t;
  t.columns = {"gaze_screen/disgust_listening/distance_std"};
  t.values = Matrix(20, 1);
  for (std::size_t i = 0; i < 20; ++i) {
    t.meta.push_back({"P" + std::to_string(i), i % 2 ? Label::ASC : Label::NonASC, Gender::M, Setting::Lab, {}});
    t.values(i, 0) = (i % 2 ? 30.0 : 20.0) + static_cast<double>(i % 5);
  }
  t.values(4, 0) = kMissing;
  const auto g = group_comparison(t, t.columns[0]);
  CHECK(g.n_control == 9);
  CHECK(g.n_asc == 10);
  CHECK(g.test.effect_size < 0);
  CHECK(g.test.p_value < 0.01);
  CHECK(g.relative_difference > 0.3);
}
