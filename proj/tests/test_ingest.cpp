#include "support.hpp"

#include <filesystem>
#include <fstream>

#include "sitm/csv.hpp"
#include "sitm/ingest.hpp"
#include "sitm/synth.hpp"

using namespace sitm;
using sitm::test::blank_track;
using sitm::test::equal_phases;
using sitm::test::error_kind_of;

TEST_CASE("resampling a constant 15 FPS channel keeps the constant") {
  auto t = blank_track(30, 15.0);
  for (auto& v : t.yaw) v = 3.0;
  const auto out = resample_track(t, 15.0);
  REQUIRE(out.size() == 60);
  for (double v : out.yaw) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(out.timestamps[1] == doctest::Approx(1.0 / 30.0));
}

TEST_CASE("resampling interpolates the midpoint between 15 FPS frames") {
  auto t = blank_track(2, 15.0);
  t.yaw = {0.0, 1.0};
  const auto out = resample_track(t, 15.0);
  REQUIRE(out.size() == 4);
  CHECK(out.yaw[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("binary channels take the nearest original frame") {
  auto t = blank_track(4, 20.0);
  t.au_presence[0] = {0, 1, 1, 0};
  const auto out = resample_track(t, 20.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto src = static_cast<std::size_t>(std::lround(out.timestamps[i] * 20.0));
    CHECK(out.au_presence[0][i] == t.au_presence[0][std::min<std::size_t>(src, 3)]);
  }
}

TEST_CASE("frame rates below 15 FPS are excluded") {
  const auto t = blank_track(28, 14.0);
  CHECK(error_kind_of([&] { resample_track(t, 14.0); }) == ErrorKind::ExcludedLowFrameRate);
}

TEST_CASE("resampling a 30 FPS track is the identity") {
  auto t = blank_track(90);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  for (std::size_t i = 0; i < t.size(); ++i) {
    t.yaw[i] = d(rng);
    t.gaze_x[i] = d(rng);
  }
  const auto out = resample_track(t, 30.0);
  REQUIRE(out.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(out.yaw[i] - t.yaw[i]) < 1e-9);
    CHECK(std::abs(out.gaze_x[i] - t.gaze_x[i]) < 1e-9);
  }
}

TEST_CASE("quality filter marks low-confidence frames") {
  SUBCASE("all confident") {
    const auto r = quality_filter(blank_track(100));
    CHECK(r.invalid_fraction == 0.0);
    CHECK(r.track.valid_count() == 100);
  }
  SUBCASE("one frame at 0.74") {
    auto t = blank_track(100);
    t.confidence[17] = 0.74;
    const auto r = quality_filter(t);
    CHECK(r.invalid_fraction == doctest::Approx(0.01));
    CHECK(r.track.valid[17] == 0);
    CHECK(r.track.size() == 100);
  }
  SUBCASE("eleven of a hundred invalid") {
    auto t = blank_track(100);
    for (int i = 0; i < 11; ++i) t.confidence[i * 9] = 0.5;
    CHECK(error_kind_of([&] { quality_filter(t); }) == ErrorKind::ExcludedLowQuality);
  }
  SUBCASE("ten of a hundred is still accepted") {
    auto t = blank_track(100);
    for (int i = 0; i < 10; ++i) t.confidence[i * 9] = 0.5;
    CHECK(quality_filter(t).invalid_fraction == doctest::Approx(0.10));
  }
}

TEST_CASE("segmentation into six equal phases") {
  const auto phases = equal_phases(10.0);
  const auto segs = segment_phases(blank_track(1800), phases);
  for (const auto& s : segs) CHECK(s.size() == 300);
}

TEST_CASE("a frame on a phase boundary belongs to the next phase") {
  const auto phases = equal_phases(10.0);
  const auto segs = segment_phases(blank_track(1800), phases);
  CHECK(segs[1].timestamps.front() == doctest::Approx(10.0));
  CHECK(segs[0].timestamps.back() < 10.0);
}

TEST_CASE("phases beyond the track raise PhaseOutOfRange") {
  CHECK(error_kind_of([] { segment_phases(blank_track(600), equal_phases(10.0)); }) == ErrorKind::PhaseOutOfRange);
}

TEST_CASE("a phase file missing disgust listening fails to parse") {
  const std::string text =
      "emotion,role,start_s,end_s\n"
      "neutral,listening,0,10\nneutral,speaking,10,20\njoy,listening,20,30\n"
      "joy,speaking,30,40\ndisgust,speaking,50,60\n";
  CHECK(error_kind_of([&] { parse_phase_map(text, "phases.csv"); }) == ErrorKind::ParseError);
}

TEST_CASE("track CSV round-trips through the formatter") {
  auto t = blank_track(5);
  t.yaw = {0.1, 0.2, 0.3, 0.4, 0.5};
  t.au_intensity[0] = {1, 2, 3, 4, 5};
  t.au_presence[3] = {0, 1, 0, 1, 1};
  for (auto& v : t.au_intensity[16]) v = kMissing;
  const auto back = parse_track_csv(format_track_csv(t), "track.csv");
  REQUIRE(back.size() == 5);
  CHECK(back.yaw[2] == doctest::Approx(0.3));
  CHECK(back.au_intensity[0][4] == 5.0);
  CHECK(back.au_presence[3][1] == 1);
}

namespace {

std::filesystem::path write_synthetic_cohort(const std::string& name, int low_fps) {
  SynthSpec spec;
  spec.n_per_group = 2;
  spec.phase_duration_s = 6.0;
  spec.low_fps_participants = low_fps;
  spec.seed = 11;
  auto participants = generate_participants(spec);
  participants.erase(participants.begin() + 3, participants.end());
  const auto dir = sitm::test::scratch_dir(name);
  write_cohort(participants, dir);
  return dir / "manifest.csv";
}

}  // namespace

TEST_CASE("a manifest of three valid participants loads fully") {
  const auto cohort = load_cohort(write_synthetic_cohort("ingest_ok", 0));
  CHECK(cohort.participants.size() == 3);
  CHECK(cohort.qc_log.empty());
}

TEST_CASE("a 14 FPS participant is excluded and logged") {
  SynthSpec spec;
  spec.n_per_group = 2;
  spec.phase_duration_s = 6.0;
  spec.seed = 11;
  spec.low_fps_participants = 1;
  auto participants = generate_participants(spec);
  participants.erase(participants.begin());
  const auto dir = sitm::test::scratch_dir("ingest_lowfps");
  write_cohort(participants, dir);
  const auto cohort = load_cohort(dir / "manifest.csv");
  CHECK(cohort.participants.size() == 2);
  REQUIRE(cohort.qc_log.size() == 1);
  CHECK(cohort.qc_log[0].reason == "ExcludedLowFrameRate");
}

TEST_CASE("an unknown label string is a parse error") {
  const auto manifest = write_synthetic_cohort("ingest_badlabel", 0);
  auto text = read_file(manifest);
  const auto pos = text.find(",ASC,");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 5, ",autism?,");
  write_file_atomic(manifest, text);
  CHECK(error_kind_of([&] { load_cohort(manifest); }) == ErrorKind::ParseError);
}

TEST_CASE("duplicate participant ids are rejected") {
  SynthSpec spec;
  spec.n_per_group = 2;
  spec.phase_duration_s = 6.0;
  auto raw = generate_participants(spec);
  raw[1].meta.id = raw[0].meta.id;
  CHECK(error_kind_of([&] { build_cohort(raw); }) == ErrorKind::DuplicateParticipant);
}
