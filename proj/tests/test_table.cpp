#include "support.hpp"

#include <algorithm>

#include "sitm/csv.hpp"
#include "sitm/feature_table.hpp"

using namespace sitm;

namespace {

Matrix column(std::initializer_list<double> values) {
  Matrix m(values.size(), 1);
  std::size_t i = 0;
  for (double v : values) m(i++, 0) = v;
  return m;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

}  // namespace

TEST_CASE("missing test value takes the training median") {
  const auto x = column({1, 2, 3, kMissing});
  const std::vector<std::size_t> train = {0, 1, 2}, test = {3};
  const auto out = impute_from_training(x, train, test);
  CHECK(out(3, 0) == 2.0);
}

TEST_CASE("missing training value uses the other training rows") {
  const auto x = column({1, kMissing, 5, 9, 100});
  const std::vector<std::size_t> train = {0, 1, 2, 3}, test = {4};
  const auto out = impute_from_training(x, train, test);
  CHECK(out(1, 0) == 5.0);
  CHECK(out(4, 0) == 100.0);
}

TEST_CASE("fold medians follow the training set") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  Matrix x(12, 3);
  for (std::size_t r = 0; r < 12; ++r)
    for (std::size_t c = 0; c < 3; ++c) x(r, c) = (r + c) % 4 == 0 ? kMissing : nd(rng);
  for (std::size_t held = 0; held < 12; ++held) {
    std::vector<std::size_t> train;
    for (std::size_t r = 0; r < 12; ++r)
      if (r != held) train.push_back(r);
    const auto imp = fit_imputation(x, train);
    for (std::size_t c = 0; c < 3; ++c) {
      std::vector<double> vals;
      for (auto r : train)
        if (!is_missing(x(r, c))) vals.push_back(x(r, c));
      CHECK(imp.medians[c] == median_of(vals));
    }
  }
}

TEST_CASE("an all-missing training column is dropped and left missing") {
  const auto x = column({kMissing, kMissing, 4});
  const std::vector<std::size_t> train = {0, 1}, test = {2};
  const auto imp = fit_imputation(x, train);
  CHECK(imp.dropped == std::vector<std::size_t>{0});
  const auto out = impute_from_training(x, train, test);
  CHECK(is_missing(out(0, 0)));
}

TEST_CASE("early fusion concatenates in namespace order") {
  FeatureBlock gaze{"gaze", {}, Matrix(4, 5, 1.0)};
  FeatureBlock face{"face", {}, Matrix(4, 10, 2.0)};
  for (int i = 0; i < 5; ++i) gaze.names.push_back("g" + std::to_string(i));
  for (int i = 0; i < 10; ++i) face.names.push_back("f" + std::to_string(i));
  const auto fused = early_fusion({gaze, face});
  CHECK(fused.values.cols() == 15);
  CHECK(fused.names.front() == "face/f0");
  CHECK(fused.names.back() == "gaze/g4");
  CHECK(fused.values(0, 0) == 2.0);
  CHECK(fused.values(0, 14) == 1.0);
  const auto again = early_fusion({face, gaze});
  CHECK(again.names == fused.names);
  CHECK(again.values == fused.values);
}

TEST_CASE("early fusion rejects mismatched rows and duplicate names") {
  FeatureBlock a{"face", {"x"}, Matrix(3, 1, 0.0)};
  FeatureBlock b{"gaze", {"x"}, Matrix(4, 1, 0.0)};
  CHECK(test::error_kind_of([&] { early_fusion({a, b}); }) == ErrorKind::InputError);
  FeatureBlock c{"face", {"x"}, Matrix(3, 1, 0.0)};
  CHECK(test::error_kind_of([&] { early_fusion({a, c}); }) == ErrorKind::InputError);
  FeatureBlock d{"voice", {"x"}, Matrix(3, 1, 0.0)};
  CHECK(test::error_kind_of([&] { early_fusion({d}); }) == ErrorKind::InputError);
}

TEST_CASE("gaze modality covers both gaze namespaces") {
  CHECK(modality_of("gaze_screen/joy_listening/distance_std") == Modality::Gaze);
  CHECK(modality_of("gaze/joy_listening/velocity_mean") == Modality::Gaze);
  CHECK(modality_of("hr/pooled/rmssd") == Modality::HR);
  CHECK(namespace_of("gaze_screen/x") == "gaze_screen");
}

TEST_CASE("feature table CSV round trip keeps bits and missing cells") {
  FeatureTable t;
  t.meta = {{"A", Label::ASC, Gender::F, Setting::Home, 22}, {"B", Label::NonASC, Gender::D, Setting::Lab, {}}};
  t.columns = {"face/x", "hr/pooled/rmssd"};
  t.values = Matrix(2, 2);
  t.values(0, 0) = 0.1 + 0.2;
  t.values(0, 1) = kMissing;
  t.values(1, 0) = -1e-300;
  t.values(1, 1) = 12345.678901234567;
  const auto text = format_features_csv(t);
  const auto back = parse_features_csv(text, "f.csv");
  CHECK(back.columns == t.columns);
  CHECK(back.meta[0].aq == 22);
  CHECK_FALSE(back.meta[1].aq);
  CHECK(back.meta[1].gender == Gender::D);
  CHECK(back.values(0, 0) == t.values(0, 0));
  CHECK(is_missing(back.values(0, 1)));
  CHECK(back.values(1, 0) == t.values(1, 0));
  CHECK(back.values(1, 1) == t.values(1, 1));
  CHECK(format_features_csv(back) == text);
}

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd(0, 1e6);
  for (int i = 0; i < 200; ++i) {
    const double v = nd(rng);
    CHECK(*parse_double(format_double(v)) == v);
  }
  CHECK(format_double(kMissing).empty());
  CHECK_FALSE(parse_double("1.5x"));
}
