#include "sitm/extract.hpp"

#include <cmath>

#include "sitm/csv.hpp"
#include "sitm/error.hpp"
#include "sitm/face.hpp"
#include "sitm/parallel.hpp"
#include "sitm/stats.hpp"

namespace sitm {
namespace {

constexpr std::array<std::string_view, 3> kIntensityStats = {"mean_intensity", "median_intensity", "std_intensity"};
constexpr std::array<std::string_view, 2> kPresenceStats = {"mean_presence", "onset_frequency"};
constexpr std::array<std::string_view, 14> kHeadStats = {
    "velocity_mean",           "velocity_std",           "acceleration_mean", "acceleration_std",
    "stability_duration_mean", "stability_duration_std", "yaw_mean",          "yaw_std",
    "roll_mean",               "roll_std",               "pitch_norm_mean",   "pitch_norm_std",
    "pitch_norm_iqr",          "nod_count"};
constexpr std::array<std::string_view, 12> kGazeStats = {
    "velocity_mean",          "velocity_std",          "acceleration_mean",      "acceleration_std",
    "saccade_amplitude_mean", "saccade_amplitude_std", "fixation_duration_mean", "fixation_duration_std",
    "x_angle_mean",           "x_angle_std",           "y_angle_norm_mean",      "y_angle_norm_std"};
constexpr std::array<std::string_view, 8> kScreenStats = {
    "screen_fixation_time", "offscreen_fixation_count", "distance_mean", "distance_std",
    "distance_skewness",    "distance_kurtosis",        "distance_min",  "distance_max"};
constexpr std::array<std::string_view, 4> kHrStats = {"mean_hr", "sdnn", "rmssd", "lf_hf"};

std::string join(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (auto p : parts) {
    if (!out.empty()) out += '/';
    out += p;
  }
  return out;
}

// Appends values in the same order as feature_columns.
class Row {
public:
  void add(double v) { values_.push_back(v); }
  void add(std::optional<double> v) { values_.push_back(v ? *v : kMissing); }
  void add_missing(std::size_t n) { values_.insert(values_.end(), n, kMissing); }
  // Mean and std of the finite values, or two missing cells.
  void add_mean_std(std::span<const double> x) {
    const auto v = stats::finite_values(x);
    add(v.empty() ? kMissing : stats::mean(v));
    add(v.empty() ? kMissing : stats::population_std(v));
  }
  std::vector<double> take() { return std::move(values_); }

private:
  std::vector<double> values_;
};

std::vector<double> valid_values(std::span<const double> x, std::span<const std::uint8_t> valid, double offset = 0.0) {
  std::vector<double> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (valid[i]) out.push_back(x[i] - offset);
  }
  return out;
}

std::vector<double> abs_values(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  for (auto& v : out) v = std::abs(v);
  return out;
}

// Median over valid frames that fall inside any phase.
double participant_median(const std::array<FrameTrack, kNumPhases>& phases, std::vector<double> FrameTrack::*channel) {
  std::vector<double> all;
  for (const auto& ph : phases) {
    const auto v = valid_values(ph.*channel, ph.valid);
    all.insert(all.end(), v.begin(), v.end());
  }
  return all.empty() ? kMissing : stats::median(all);
}

void add_face(Row& row, const FrameTrack& phase) {
  const auto slice = au_statistics(phase);
  for (std::size_t au = 0; au < kNumAUs; ++au) {
    if (au_has_intensity(au)) {
      if (slice) {
        row.add((*slice)[au].mean_intensity);
        row.add((*slice)[au].median_intensity);
        row.add((*slice)[au].std_intensity);
      } else {
        row.add_missing(3);
      }
    }
    if (slice) {
      row.add((*slice)[au].mean_presence);
      row.add(static_cast<double>((*slice)[au].onset_frequency));
    } else {
      row.add_missing(2);
    }
  }
}

void add_head(Row& row, const FrameTrack& ph, double pitch_median, const MotionParams& mp) {
  const auto kin = angular_kinematics({ph.pitch, ph.yaw, ph.roll}, ph.valid, kFrameDt);
  if (kin) {
    row.add_mean_std(kin->velocity);
    row.add_mean_std(abs_values(kin->acceleration));
    row.add_mean_std(stability_durations(kin->velocity, deg_to_rad(mp.stability_threshold_deg_s), kFrameDt));
  } else {
    row.add_missing(6);
  }
  row.add_mean_std(valid_values(ph.yaw, ph.valid));
  row.add_mean_std(valid_values(ph.roll, ph.valid));
  const auto pitch_norm = valid_values(ph.pitch, ph.valid, pitch_median);
  row.add_mean_std(pitch_norm);
  row.add(pitch_norm.empty() ? kMissing : stats::iqr(pitch_norm));
  row.add(ph.valid_count() == 0 ? kMissing
                                : static_cast<double>(detect_nods(ph.pitch, ph.valid, kFrameDt, mp.nod_window_s,
                                                                  deg_to_rad(mp.nod_amplitude_deg))));
}

void add_gaze(Row& row, const FrameTrack& ph, double y_median, const GazeEvents& events, bool has_kinematics) {
  if (has_kinematics) {
    const auto kin = angular_kinematics({ph.gaze_x, ph.gaze_y}, ph.valid, kFrameDt);
    row.add_mean_std(kin->velocity);
    row.add_mean_std(abs_values(kin->acceleration));
    std::vector<double> amplitudes, durations;
    for (const auto& s : events.saccades) {
      if (s.amplitude) amplitudes.push_back(*s.amplitude);
    }
    for (const auto& f : events.fixations) durations.push_back(f.duration);
    row.add_mean_std(amplitudes);
    row.add_mean_std(durations);
  } else {
    row.add_missing(8);
  }
  row.add_mean_std(valid_values(ph.gaze_x, ph.valid));
  row.add_mean_std(valid_values(ph.gaze_y, ph.valid, y_median));
}

void add_screen(Row& row, const FrameTrack& ph, Phase phase, const ScreenGeometry& geom, const GazeEvents& events,
                std::size_t participant, std::vector<GazeSample>* samples) {
  std::vector<Vec2> points(ph.size());
  std::vector<std::uint8_t> ok(ph.size(), 0);
  for (std::size_t i = 0; i < ph.size(); ++i) {
    if (!ph.valid[i]) continue;
    if (const auto p = try_project_gaze(ph.gaze_x[i], ph.gaze_y[i], geom)) {
      points[i] = *p;
      ok[i] = 1;
      if (samples && phase.role == Role::Listening) samples->push_back({participant, phase, p->x, p->y});
    }
  }
  const auto s = screen_descriptors(points, ok, geom, events.fixations);
  if (!s) {
    row.add_missing(kScreenStats.size());
    return;
  }
  row.add(s->screen_fixation_time);
  row.add(static_cast<double>(s->offscreen_fixation_count));
  row.add(s->distance_mean);
  row.add(s->distance_std);
  row.add(s->distance_skewness);
  row.add(s->distance_kurtosis);
  row.add(s->distance_min);
  row.add(s->distance_max);
}

void add_hrv(Row& row, const HrvMetrics& m) {
  row.add(m.mean_hr);
  row.add(m.sdnn);
  row.add(m.rmssd);
  row.add(m.lf_hf);
}

void add_hr(Row& row, const ParticipantData& p, const PhysioParams& pp) {
  constexpr std::size_t kBlocks = 4;  // three listening phases plus pooled
  std::optional<std::vector<double>> bvp;
  if (p.rgb) bvp = pos_bvp(*p.rgb, kTargetFps, pp.pos_window_s);
  if (bvp) bvp = bandpass(*bvp, kTargetFps, pp.band_low_hz, pp.band_high_hz);
  if (!bvp) {
    row.add_missing(kBlocks * kHrStats.size());
    return;
  }
  std::vector<double> pooled_ibi, pooled_times;
  for (const auto& phase : kPhases) {
    if (phase.role != Role::Listening) continue;
    const auto& iv = p.phases[phase];
    std::size_t first = 0;
    while (first < p.rgb->size() && p.rgb->timestamps[first] < iv.start) ++first;
    std::size_t last = first;
    while (last < p.rgb->size() && iv.contains(p.rgb->timestamps[last])) ++last;
    std::optional<BeatSeries> beats;
    if (last > first) {
      beats = detect_beats(std::span<const double>(*bvp).subspan(first, last - first), kTargetFps,
                           p.rgb->timestamps[first], pp);
    }
    if (!beats) {
      row.add_missing(kHrStats.size());
      continue;
    }
    add_hrv(row, hrv_metrics(beats->ibi_ms, beats->ibi_times_s, pp));
    pooled_ibi.insert(pooled_ibi.end(), beats->ibi_ms.begin(), beats->ibi_ms.end());
    pooled_times.insert(pooled_times.end(), beats->ibi_times_s.begin(), beats->ibi_times_s.end());
  }
  add_hrv(row, hrv_metrics(pooled_ibi, pooled_times, pp));
}

}  // namespace

std::vector<std::string> feature_columns(const std::vector<std::string>& audio_names) {
  std::vector<std::string> cols;
  for (const auto& phase : kPhases) {
    const auto pn = phase_name(phase);
    for (std::size_t au = 0; au < kNumAUs; ++au) {
      if (au_has_intensity(au)) {
        for (auto s : kIntensityStats) cols.push_back(join({"face", kAUNames[au], pn, s}));
      }
      for (auto s : kPresenceStats) cols.push_back(join({"face", kAUNames[au], pn, s}));
    }
  }
  for (const auto& phase : kPhases) {
    if (phase.role != Role::Speaking) continue;
    for (const auto& name : audio_names) cols.push_back(join({"audio", phase_name(phase), name}));
  }
  for (const auto& phase : kPhases) {
    for (auto s : kGazeStats) cols.push_back(join({"gaze", phase_name(phase), s}));
  }
  for (const auto& phase : kPhases) {
    for (auto s : kScreenStats) cols.push_back(join({"gaze_screen", phase_name(phase), s}));
  }
  for (const auto& phase : kPhases) {
    for (auto s : kHeadStats) cols.push_back(join({"head", phase_name(phase), s}));
  }
  for (const auto& phase : kPhases) {
    if (phase.role != Role::Listening) continue;
    for (auto s : kHrStats) cols.push_back(join({"hr", phase_name(phase), s}));
  }
  for (auto s : kHrStats) cols.push_back(join({"hr", "pooled", s}));
  return cols;
}

std::vector<double> extract_participant(const ParticipantData& p, const std::vector<std::string>& audio_names,
                                        const ExtractParams& params, std::vector<GazeSample>* gaze_points) {
  const auto phases = segment_phases(p.track, p.phases);
  const double pitch_median = participant_median(phases, &FrameTrack::pitch);
  const double gaze_y_median = participant_median(phases, &FrameTrack::gaze_y);
  const auto& geom = p.meta.setting == Setting::Home && params.home_screen ? *params.home_screen : params.screen;
  const double ivt = deg_to_rad(params.motion.ivt_threshold_deg_s);

  std::array<GazeEvents, kNumPhases> events;
  std::array<bool, kNumPhases> has_kinematics{};
  for (std::size_t k = 0; k < kNumPhases; ++k) {
    has_kinematics[k] = phases[k].valid_count() >= 3;
    if (has_kinematics[k]) {
      events[k] = fixations_saccades(phases[k].gaze_x, phases[k].gaze_y, phases[k].valid, ivt, kFrameDt);
    }
  }

  Row row;
  for (std::size_t k = 0; k < kNumPhases; ++k) add_face(row, phases[k]);

  for (const auto& phase : kPhases) {
    if (phase.role != Role::Speaking) continue;
    if (!p.prosody) {
      row.add_missing(audio_names.size());
      continue;
    }
    const auto& values = p.prosody->values[static_cast<std::size_t>(phase.emotion)];
    for (double v : values) row.add(v);
  }

  for (std::size_t k = 0; k < kNumPhases; ++k) {
    add_gaze(row, phases[k], gaze_y_median, events[k], has_kinematics[k]);
  }
  for (std::size_t k = 0; k < kNumPhases; ++k) {
    add_screen(row, phases[k], kPhases[k], geom, events[k], 0, gaze_points);
  }
  for (std::size_t k = 0; k < kNumPhases; ++k) add_head(row, phases[k], pitch_median, params.motion);
  add_hr(row, p, params.physio);
  return row.take();
}

Extraction extract_cohort(const std::vector<ParticipantData>& participants, const ExtractParams& params,
                          unsigned jobs) {
  params.screen.validate();
  if (params.home_screen) params.home_screen->validate();

  std::vector<std::string> audio_names;
  for (const auto& p : participants) {
    if (!p.prosody) continue;
    if (audio_names.empty()) {
      audio_names = p.prosody->names;
    } else if (p.prosody->names != audio_names) {
      throw Error(ErrorKind::SchemaError, "participant '" + p.meta.id + "' has different voice functional columns");
    }
  }

  Extraction out;
  out.table.columns = feature_columns(audio_names);
  out.table.values = Matrix(participants.size(), out.table.columns.size());
  std::vector<std::vector<GazeSample>> samples(participants.size());
  parallel_for(participants.size(), jobs, [&](std::size_t i) {
    const auto values = extract_participant(participants[i], audio_names, params, &samples[i]);
    std::copy(values.begin(), values.end(), out.table.values.row(i).begin());
  });
  for (std::size_t i = 0; i < participants.size(); ++i) {
    out.table.meta.push_back(participants[i].meta);
    for (auto& s : samples[i]) {
      s.participant = i;
      out.gaze_points.push_back(s);
    }
  }
  return out;
}

std::string format_gaze_points(const Extraction& extraction) {
  std::string out = "id,label,setting,phase,x_mm,y_mm\n";
  for (const auto& s : extraction.gaze_points) {
    const auto& m = extraction.table.meta[s.participant];
    out += m.id;
    out += ',';
    out += to_string(m.label);
    out += ',';
    out += to_string(m.setting);
    out += ',';
    out += phase_name(s.phase);
    out += ',';
    out += format_sig(s.x_mm, 6);
    out += ',';
    out += format_sig(s.y_mm, 6);
    out += '\n';
  }
  return out;
}

}  // namespace sitm
