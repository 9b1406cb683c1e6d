#include "support.hpp"

#include "sitm/audiofeat.hpp"
#include <set>

#include "sitm/csv.hpp"

using namespace sitm;

namespace {

std::string prosody_text(const std::vector<std::string>& phases) {
  std::string text = "phase";
  for (auto name : egemaps_v02_functionals()) text += "," + std::string(name);
  text += "\n";
  double v = 0.25;
  for (const auto& p : phases) {
    text += p;
    for (std::size_t k = 0; k < egemaps_v02_functionals().size(); ++k) {
      text += "," + format_double(v);
      v += 1.0 / 3.0;
    }
    text += "\n";
  }
  return text;
}

}  // namespace

TEST_CASE("the functional set has 88 unique names") {
  const auto names = egemaps_v02_functionals();
  CHECK(names.size() == 88);
  std::set<std::string_view> unique(names.begin(), names.end());
  CHECK(unique.size() == 88);
}

TEST_CASE("a valid three-row file gives 264 features") {
  const auto set = parse_prosody(prosody_text({"neutral_speaking", "joy_speaking", "disgust_speaking"}), "p.csv");
  CHECK(set.feature_count() == 264);
  CHECK(set.names.size() == 88);
}

TEST_CASE("rows are stored by emotion regardless of file order") {
  const auto set = parse_prosody(prosody_text({"disgust_speaking", "neutral_speaking", "joy_speaking"}), "p.csv");
  CHECK(set.values[2][0] == doctest::Approx(0.25));
}

TEST_CASE("a listening row is a schema error") {
  CHECK(test::error_kind_of([] {
          parse_prosody(prosody_text({"neutral_speaking", "joy_listening", "disgust_speaking"}), "p.csv");
        }) == ErrorKind::SchemaError);
  CHECK(test::error_kind_of([] { parse_prosody(prosody_text({"neutral_speaking", "joy_speaking"}), "p.csv"); }) ==
        ErrorKind::SchemaError);
}

TEST_CASE("a NaN cell is a parse error naming its position") {
  auto text = prosody_text({"neutral_speaking", "joy_speaking", "disgust_speaking"});
  const auto pos = text.find(",", text.find("joy_speaking") + 13);
  text.replace(pos, 1, ",nan,");
  try {
    parse_prosody(text, "p.csv");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("p.csv") != std::string::npos);
  }
}

TEST_CASE("loading is lossless") {
  const auto text = prosody_text({"neutral_speaking", "joy_speaking", "disgust_speaking"});
  const auto set = parse_prosody(text, "p.csv");
  const auto again = parse_prosody(format_prosody(set), "q.csv");
  for (std::size_t e = 0; e < 3; ++e) CHECK(again.values[e] == set.values[e]);
  CHECK(set.values[0][1] == 0.25 + 1.0 / 3.0);
}
