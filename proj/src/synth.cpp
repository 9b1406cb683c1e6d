#include "sitm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sitm/audiofeat.hpp"
#include "sitm/csv.hpp"
#include "sitm/error.hpp"
#include "sitm/gazescreen.hpp"
#include "sitm/rng.hpp"

namespace sitm {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLowFps = 14.0;

double deg(double d) { return d * kPi / 180.0; }

// Mean-reverting noise, one step of length dt.
struct Ou {
  double value = 0.0;
  double theta = 0.5;
  double sigma = 1.0;
  double step(double dt, std::normal_distribution<double>& nd, std::mt19937_64& rng) {
    value += -theta * value * dt + sigma * std::sqrt(dt) * nd(rng);
    return value;
  }
};

PhaseMap sequential_phases(double duration) {
  std::array<TimeInterval, kNumPhases> iv{};
  // Listening precedes speaking within each emotion, as in the interaction.
  for (std::size_t k = 0; k < kNumPhases; ++k) iv[k] = {duration * k, duration * (k + 1)};
  return PhaseMap(iv);
}

void fill_gaze(FrameTrack& t, double spread_mm, std::mt19937_64& rng) {
  const ScreenGeometry geom;
  std::normal_distribution<double> nd;
  std::exponential_distribution<double> fix_len(1.0 / 0.35);
  const double dt = t.size() > 1 ? t.timestamps[1] - t.timestamps[0] : kFrameDt;
  auto to_angles = [&](double x_mm, double y_mm) {
    return std::pair{std::atan((x_mm - geom.camera_offset_mm.x) / geom.eye_to_screen_mm),
                     std::atan((y_mm - geom.camera_offset_mm.y) / geom.eye_to_screen_mm)};
  };
  std::size_t i = 0;
  auto [px, py] = to_angles(spread_mm * nd(rng), spread_mm * nd(rng));
  while (i < t.size()) {
    const auto frames = static_cast<std::size_t>(std::max(3.0, (0.1 + fix_len(rng)) / dt));
    for (std::size_t k = 0; k < frames && i < t.size(); ++k, ++i) {
      t.gaze_x[i] = px + deg(0.05) * nd(rng);
      t.gaze_y[i] = py + deg(0.05) * nd(rng);
    }
    const auto [nx, ny] = to_angles(spread_mm * nd(rng), spread_mm * nd(rng));
    // Two-frame saccade towards the next fixation target.
    for (int k = 1; k <= 2 && i < t.size(); ++k, ++i) {
      t.gaze_x[i] = px + (nx - px) * k / 3.0;
      t.gaze_y[i] = py + (ny - py) * k / 3.0;
    }
    px = nx;
    py = ny;
  }
}

void fill_head(FrameTrack& t, const PhaseMap& phases, double motion_scale, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  const double dt = t.size() > 1 ? t.timestamps[1] - t.timestamps[0] : kFrameDt;
  Ou pitch{0.0, 0.5, deg(2.0) * motion_scale}, yaw{0.0, 0.5, deg(2.5) * motion_scale},
      roll{0.0, 0.5, deg(1.0) * motion_scale};
  const double pitch0 = deg(-5.0 + 3.0 * nd(rng));
  const double yaw0 = deg(2.0 * nd(rng));
  const double roll0 = deg(1.5 * nd(rng));
  for (std::size_t i = 0; i < t.size(); ++i) {
    t.pitch[i] = pitch0 + pitch.step(dt, nd, rng);
    t.yaw[i] = yaw0 + yaw.step(dt, nd, rng);
    t.roll[i] = roll0 + roll.step(dt, nd, rng);
  }
  // Occasional nods while listening: a raised-cosine dip of about 5 degrees.
  const auto nod_frames = static_cast<std::size_t>(0.8 / dt);
  for (std::size_t i = 0; i + nod_frames < t.size(); ++i) {
    const auto phase = phases.phase_at(t.timestamps[i]);
    if (!phase || phase->role != Role::Listening || ud(rng) > 0.08 * dt) continue;
    const double depth = deg(5.0 + nd(rng));
    for (std::size_t k = 0; k < nod_frames; ++k) {
      t.pitch[i + k] -= depth * 0.5 * (1.0 - std::cos(2.0 * kPi * k / nod_frames));
    }
    i += nod_frames;
  }
}

void fill_face(FrameTrack& t, double shift, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> base_dist(0.2, 1.2);
  const double dt = t.size() > 1 ? t.timestamps[1] - t.timestamps[0] : kFrameDt;
  for (std::size_t au = 0; au < kNumAUs; ++au) {
    const double base = base_dist(rng) + shift;
    Ou noise{0.0, 1.0, 0.5};
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double latent = base + noise.step(dt, nd, rng);
      t.au_intensity[au][i] = au_has_intensity(au) ? std::clamp(latent, 0.0, 5.0) : 0.0;
      t.au_presence[au][i] = latent >= 1.0 ? 1 : 0;
    }
  }
}

ProsodyFeatureSet make_prosody(double shift, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  ProsodyFeatureSet set;
  const auto names = egemaps_v02_functionals();
  for (auto n : names) set.names.emplace_back(n);
  std::vector<double> subject(names.size());
  for (auto& z : subject) z = nd(rng);
  for (std::size_t e = 0; e < 3; ++e) {
    auto& row = set.values[e];
    row.resize(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
      const double mu = 1.0 + static_cast<double>(j % 9);
      const double sd = 0.1 * mu;
      row[j] = std::abs(mu + sd * (subject[j] + shift + 0.3 * nd(rng)));
    }
  }
  return set;
}

std::string participant_dir(const std::string& id) { return "participants/" + id; }

}  // namespace

void SynthSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigError, "synth: " + what); };
  if (n_per_group < 2) fail("n_per_group must be at least 2");
  if (!(fps >= 1.0)) fail("fps must be at least 1");
  if (!(phase_duration_s >= 6.0)) fail("phase_duration_s must be at least 6");
  if (low_fps_participants < 0 || low_fps_participants > 2 * n_per_group) fail("low_fps_participants out of range");
  for (double m : {gaze_std_ratio, head_motion_ratio, gaze_spread_mm}) {
    if (!(m > 0.0)) fail("multipliers and spreads must be positive");
  }
  if (gaze_subject_sd < 0.0) fail("gaze_subject_sd must be non-negative");
  if (invalid_frame_rate < 0.0 || invalid_frame_rate > 1.0) fail("invalid_frame_rate must lie in [0, 1]");
  if (home_fraction < 0.0 || home_fraction > 1.0) fail("home_fraction must lie in [0, 1]");
}

SynthSpec make_synth_spec(const ConfigFile& f) {
  static const std::vector<std::string_view> keys = {
      "n_per_group",    "seed",           "fps",           "phase_duration_s", "low_fps_participants",
      "gaze_std_ratio", "au_mean_shift",  "hr_shift_bpm",  "head_motion_ratio", "prosody_shift",
      "aq_shift",       "gaze_spread_mm", "gaze_subject_sd", "invalid_frame_rate", "home_fraction"};
  std::vector<std::string> owned;
  for (auto k : keys) {
    owned.emplace_back(k);
    owned.push_back("synth." + std::string(k));
  }
  f.require_known({owned.begin(), owned.end()});
  auto key = [&](std::string_view k) {
    const std::string sectioned = "synth." + std::string(k);
    return f.has(sectioned) ? sectioned : std::string(k);
  };
  SynthSpec s;
  if (auto v = f.integer(key("n_per_group"))) s.n_per_group = static_cast<int>(*v);
  if (auto v = f.integer(key("seed"))) s.seed = static_cast<std::uint64_t>(*v);
  if (auto v = f.number(key("fps"))) s.fps = *v;
  if (auto v = f.number(key("phase_duration_s"))) s.phase_duration_s = *v;
  if (auto v = f.integer(key("low_fps_participants"))) s.low_fps_participants = static_cast<int>(*v);
  if (auto v = f.number(key("gaze_std_ratio"))) s.gaze_std_ratio = *v;
  if (auto v = f.number(key("au_mean_shift"))) s.au_mean_shift = *v;
  if (auto v = f.number(key("hr_shift_bpm"))) s.hr_shift_bpm = *v;
  if (auto v = f.number(key("head_motion_ratio"))) s.head_motion_ratio = *v;
  if (auto v = f.number(key("prosody_shift"))) s.prosody_shift = *v;
  if (auto v = f.number(key("aq_shift"))) s.aq_shift = *v;
  if (auto v = f.number(key("gaze_spread_mm"))) s.gaze_spread_mm = *v;
  if (auto v = f.number(key("gaze_subject_sd"))) s.gaze_subject_sd = *v;
  if (auto v = f.number(key("invalid_frame_rate"))) s.invalid_frame_rate = *v;
  if (auto v = f.number(key("home_fraction"))) s.home_fraction = *v;
  s.validate();
  return s;
}

RGBTrace synth_rgb_trace(double duration_s, double fps, double hr_bpm, double hrv_depth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 2.0 * kPi);
  const auto n = static_cast<std::size_t>(std::floor(duration_s * fps + 1e-9));
  const double dt = 1.0 / fps;
  const double f0 = hr_bpm / 60.0;
  const double lf_phase = ud(rng), hf_phase = ud(rng);
  // Relative pulse strength per channel along the usual skin pulsatility direction.
  constexpr double kPulse[3] = {0.33, 0.77, 0.53};
  constexpr double kSkin[3] = {180.0, 130.0, 110.0};
  RGBTrace t;
  t.timestamps.resize(n);
  t.r.resize(n);
  t.g.resize(n);
  t.b.resize(n);
  double phase = ud(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double time = static_cast<double>(i) * dt;
    const double f = f0 * (1.0 + hrv_depth * (std::sin(2.0 * kPi * 0.1 * time + lf_phase) +
                                              0.5 * std::sin(2.0 * kPi * 0.25 * time + hf_phase)));
    phase += 2.0 * kPi * f * dt;
    const double pulse = std::sin(phase);
    const double light = 1.0 + 0.01 * std::sin(2.0 * kPi * 0.05 * time);
    double* ch[3] = {&t.r[i], &t.g[i], &t.b[i]};
    for (int c = 0; c < 3; ++c) {
      *ch[c] = kSkin[c] * light * (1.0 + 0.004 * kPulse[c] * pulse + 0.0003 * nd(rng));
    }
    t.timestamps[i] = time;
  }
  return t;
}

std::vector<RawParticipant> generate_participants(const SynthSpec& spec) {
  spec.validate();
  const auto total = static_cast<std::size_t>(2 * spec.n_per_group);
  const PhaseMap phases = sequential_phases(spec.phase_duration_s);
  std::vector<RawParticipant> out;
  out.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::mt19937_64 rng(derive_seed(spec.seed, i));
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud;
    const bool asc = i % 2 == 1;
    const bool low_fps = i + static_cast<std::size_t>(spec.low_fps_participants) >= total;
    const double fps = low_fps ? kLowFps : spec.fps;

    RawParticipant p{{}, {}, fps, phases, {}, {}};
    char id[16];
    std::snprintf(id, sizeof id, "P%03zu", i + 1);
    p.meta.id = id;
    p.meta.label = asc ? Label::ASC : Label::NonASC;
    const double g = ud(rng);
    p.meta.gender = g < 0.45 ? Gender::M : (g < 0.95 ? Gender::F : Gender::D);
    p.meta.setting = ud(rng) < spec.home_fraction ? Setting::Home : Setting::Lab;
    const double aq = std::clamp(std::round(16.0 + (asc ? spec.aq_shift : 0.0) + 6.0 * nd(rng)), 0.0, 50.0);
    if (ud(rng) >= 0.05) p.meta.aq = static_cast<int>(aq);

    const auto frames = static_cast<std::size_t>(std::floor(kNumPhases * spec.phase_duration_s * fps + 1e-9));
    auto& t = p.track;
    t.resize(frames);
    for (std::size_t k = 0; k < frames; ++k) {
      t.timestamps[k] = static_cast<double>(k) / fps;
      t.confidence[k] = ud(rng) < spec.invalid_frame_rate ? 0.4 : 0.9 + 0.09 * ud(rng);
      t.valid[k] = 1;
    }
    // Each stream gets its own generator so knobs do not shift the others.
    std::mt19937_64 face_rng(derive_seed(rng(), 1)), head_rng(derive_seed(rng(), 2)), gaze_rng(derive_seed(rng(), 3));
    fill_face(t, asc ? spec.au_mean_shift : 0.0, face_rng);
    fill_head(t, phases, asc ? spec.head_motion_ratio : 1.0, head_rng);
    const double spread =
        spec.gaze_spread_mm * std::exp(spec.gaze_subject_sd * nd(rng)) * (asc ? spec.gaze_std_ratio : 1.0);
    fill_gaze(t, spread, gaze_rng);

    std::mt19937_64 voice_rng(derive_seed(rng(), 4));
    p.prosody = make_prosody(asc ? spec.prosody_shift : 0.0, voice_rng);
    const double hr = 72.0 + 7.0 * nd(rng) + (asc ? spec.hr_shift_bpm : 0.0);
    p.rgb = synth_rgb_trace(kNumPhases * spec.phase_duration_s, fps, std::clamp(hr, 45.0, 150.0), 0.04, rng());
    out.push_back(std::move(p));
  }
  return out;
}

void write_cohort(const std::vector<RawParticipant>& participants, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IOError, "cannot create '" + out_dir.string() + "': " + ec.message());
  std::string manifest = "id,label,gender,setting,aq,track_path,audio_path,rgb_path,phases_path,native_fps\n";
  for (const auto& p : participants) {
    const std::string dir = participant_dir(p.meta.id);
    fs::create_directories(out_dir / dir, ec);
    if (ec) throw Error(ErrorKind::IOError, "cannot create '" + (out_dir / dir).string() + "': " + ec.message());
    write_file_atomic(out_dir / dir / "track.csv", format_track_csv(p.track));
    write_file_atomic(out_dir / dir / "phases.csv", format_phase_map(p.phases));
    if (p.prosody) write_file_atomic(out_dir / dir / "prosody.csv", format_prosody(*p.prosody));
    if (p.rgb) write_file_atomic(out_dir / dir / "rgb.csv", format_rgb_csv(*p.rgb));
    manifest += p.meta.id + ',' + std::string(to_string(p.meta.label)) + ',' + std::string(to_string(p.meta.gender)) +
                ',' + std::string(to_string(p.meta.setting)) + ',' + (p.meta.aq ? std::to_string(*p.meta.aq) : "") +
                ',' + dir + "/track.csv," + (p.prosody ? dir + "/prosody.csv" : "") + ',' +
                (p.rgb ? dir + "/rgb.csv" : "") + ',' + dir + "/phases.csv," + format_double(p.native_fps) + '\n';
  }
  write_file_atomic(out_dir / "manifest.csv", manifest);
}

}  // namespace sitm
