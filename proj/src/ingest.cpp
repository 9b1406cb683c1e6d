#include "sitm/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "sitm/csv.hpp"
#include "sitm/error.hpp"
#include "sitm/parallel.hpp"

namespace sitm {
namespace {

constexpr double kTimeEps = 1e-9;

std::string au_column(std::size_t au, char suffix) {
  return std::string(kAUNames[au]) + "_" + suffix;
}

void check_increasing(std::span<const double> t, const std::string& source) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      throw Error(ErrorKind::ParseError, source + ": timestamps not strictly increasing at row " + std::to_string(i + 1));
    }
  }
}

// Linear interpolation of samples (t, v) at the sorted query times; held
// constant outside [t.front(), t.back()].
std::vector<double> interpolate_linear(std::span<const double> t, std::span<const double> v,
                                       std::span<const double> query) {
  std::vector<double> out(query.size());
  std::size_t j = 0;
  for (std::size_t k = 0; k < query.size(); ++k) {
    const double q = query[k];
    if (q <= t.front()) {
      out[k] = v.front();
      continue;
    }
    if (q >= t.back()) {
      out[k] = v.back();
      continue;
    }
    while (j + 1 < t.size() && t[j + 1] <= q) ++j;
    const double span = t[j + 1] - t[j];
    const double w = (q - t[j]) / span;
    out[k] = w == 0.0 ? v[j] : v[j] + w * (v[j + 1] - v[j]);
  }
  return out;
}

// Index of the nearest original frame per query time; ties go to the earlier frame.
std::vector<std::size_t> nearest_indices(std::span<const double> t, std::span<const double> query) {
  std::vector<std::size_t> out(query.size());
  std::size_t j = 0;
  for (std::size_t k = 0; k < query.size(); ++k) {
    const double q = query[k];
    while (j + 1 < t.size() && t[j + 1] <= q) ++j;
    if (j + 1 < t.size() && (t[j + 1] - q) < (q - t[j])) {
      out[k] = j + 1;
    } else {
      out[k] = j;
    }
  }
  return out;
}

void require_fps(double native_fps, std::size_t frames, const QualityRules& rules) {
  if (!(native_fps > 0.0)) throw Error(ErrorKind::InputError, "native_fps must be positive");
  if (native_fps < rules.min_native_fps) {
    throw Error(ErrorKind::ExcludedLowFrameRate,
                "native frame rate " + format_double(native_fps) + " FPS is below " +
                    format_double(rules.min_native_fps) + " FPS");
  }
  if (frames < 2) throw Error(ErrorKind::InputError, "track needs at least 2 frames to resample");
}

}  // namespace

// ---------------------------------------------------------------------------

FrameTrack read_track_csv(const std::filesystem::path& path) {
  return parse_track_csv(read_file(path), path.string());
}

FrameTrack parse_track_csv(std::string text, const std::string& source) {
  auto table = CsvTable::parse(std::move(text), source);
  const auto c_time = table.column("timestamp");
  const auto c_conf = table.column("confidence");
  const auto c_rx = table.column("pose_Rx");
  const auto c_ry = table.column("pose_Ry");
  const auto c_rz = table.column("pose_Rz");
  const auto c_gx = table.column("gaze_angle_x");
  const auto c_gy = table.column("gaze_angle_y");
  std::array<std::optional<std::size_t>, kNumAUs> c_int;
  std::array<std::size_t, kNumAUs> c_pres{};
  for (std::size_t a = 0; a < kNumAUs; ++a) {
    if (au_has_intensity(a)) c_int[a] = table.column(au_column(a, 'r'));
    c_pres[a] = table.column(au_column(a, 'c'));
  }

  FrameTrack track;
  const std::size_t n = table.rows();
  track.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    track.timestamps[r] = table.number(r, c_time);
    const double conf = table.number(r, c_conf);
    if (conf < 0.0 || conf > 1.0) {
      throw Error(ErrorKind::ParseError, table.where(r, c_conf) + ": confidence outside [0, 1]");
    }
    track.confidence[r] = conf;
    track.pitch[r] = table.number(r, c_rx);
    track.yaw[r] = table.number(r, c_ry);
    track.roll[r] = table.number(r, c_rz);
    track.gaze_x[r] = table.number(r, c_gx);
    track.gaze_y[r] = table.number(r, c_gy);
    for (std::size_t a = 0; a < kNumAUs; ++a) {
      track.au_intensity[a][r] =
          c_int[a] ? std::clamp(table.number(r, *c_int[a]), 0.0, 5.0) : std::numeric_limits<double>::quiet_NaN();
      const double p = table.number(r, c_pres[a]);
      if (p != 0.0 && p != 1.0) {
        throw Error(ErrorKind::ParseError, table.where(r, c_pres[a]) + ": presence must be 0 or 1");
      }
      track.au_presence[a][r] = p == 1.0 ? 1 : 0;
    }
  }
  check_increasing(track.timestamps, source);
  return track;
}

std::string format_track_csv(const FrameTrack& track) {
  std::string out = "timestamp,confidence";
  for (std::size_t a = 0; a < kNumAUs; ++a) {
    if (au_has_intensity(a)) out += "," + au_column(a, 'r');
  }
  for (std::size_t a = 0; a < kNumAUs; ++a) out += "," + au_column(a, 'c');
  out += ",pose_Rx,pose_Ry,pose_Rz,gaze_angle_x,gaze_angle_y\n";
  out.reserve(track.size() * 260);
  for (std::size_t i = 0; i < track.size(); ++i) {
    out += format_sig(track.timestamps[i], 10);
    out += ',';
    out += format_sig(track.confidence[i], 4);
    for (std::size_t a = 0; a < kNumAUs; ++a) {
      if (!au_has_intensity(a)) continue;
      out += ',';
      out += format_sig(track.au_intensity[a][i], 4);
    }
    for (std::size_t a = 0; a < kNumAUs; ++a) {
      out += track.au_presence[a][i] ? ",1" : ",0";
    }
    for (const auto* ch : {&track.pitch, &track.yaw, &track.roll, &track.gaze_x, &track.gaze_y}) {
      out += ',';
      out += format_sig((*ch)[i], 6);
    }
    out += '\n';
  }
  return out;
}

PhaseMap read_phase_map(const std::filesystem::path& path) {
  return parse_phase_map(read_file(path), path.string());
}

PhaseMap parse_phase_map(std::string text, const std::string& source) {
  auto table = CsvTable::parse(std::move(text), source);
  const auto c_em = table.column("emotion");
  const auto c_role = table.column("role");
  const auto c_start = table.column("start_s");
  const auto c_end = table.column("end_s");
  std::array<TimeInterval, kNumPhases> intervals{};
  std::array<bool, kNumPhases> seen{};
  for (std::size_t r = 0; r < table.rows(); ++r) {
    auto phase = parse_phase_name(std::string(table.cell(r, c_em)) + "_" + std::string(table.cell(r, c_role)));
    if (!phase) {
      throw Error(ErrorKind::ParseError, table.where(r, c_em) + ": unknown phase '" +
                                             std::string(table.cell(r, c_em)) + "/" +
                                             std::string(table.cell(r, c_role)) + "'");
    }
    if (seen[phase->index()]) throw Error(ErrorKind::ParseError, table.where(r, c_em) + ": duplicate phase");
    seen[phase->index()] = true;
    intervals[phase->index()] = {table.number(r, c_start), table.number(r, c_end)};
  }
  for (auto p : kPhases) {
    if (!seen[p.index()]) {
      throw Error(ErrorKind::ParseError, source + ": missing phase " + std::string(to_string(p.emotion)) + "/" +
                                             std::string(to_string(p.role)));
    }
  }
  try {
    return PhaseMap(intervals);
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, source + ": " + e.what());
  }
}

std::string format_phase_map(const PhaseMap& phases) {
  std::string out = "emotion,role,start_s,end_s\n";
  for (auto p : kPhases) {
    out += std::string(to_string(p.emotion)) + "," + std::string(to_string(p.role)) + "," +
           format_double(phases[p].start) + "," + format_double(phases[p].end) + "\n";
  }
  return out;
}

RGBTrace read_rgb_csv(const std::filesystem::path& path) { return parse_rgb_csv(read_file(path), path.string()); }

RGBTrace parse_rgb_csv(std::string text, const std::string& source) {
  auto table = CsvTable::parse(std::move(text), source);
  const std::array<std::size_t, 4> cols = {table.column("timestamp"), table.column("r"), table.column("g"),
                                           table.column("b")};
  RGBTrace trace;
  std::array<std::vector<double>*, 4> dst = {&trace.timestamps, &trace.r, &trace.g, &trace.b};
  for (auto* d : dst) d->reserve(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t k = 0; k < 4; ++k) {
      const double v = table.number(r, cols[k]);
      if (k > 0 && !(v > 0.0)) {
        throw Error(ErrorKind::ParseError, table.where(r, cols[k]) + ": colour values must be positive");
      }
      dst[k]->push_back(v);
    }
  }
  check_increasing(trace.timestamps, source);
  return trace;
}

std::string format_rgb_csv(const RGBTrace& trace) {
  std::string out = "timestamp,r,g,b\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += format_sig(trace.timestamps[i], 10) + "," + format_sig(trace.r[i], 8) + "," + format_sig(trace.g[i], 8) +
           "," + format_sig(trace.b[i], 8) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> resample_grid(double t0, std::size_t n_frames, double native_fps) {
  const double duration = static_cast<double>(n_frames) / native_fps;
  const auto count = static_cast<std::size_t>(std::floor(duration * kTargetFps + 1e-6));
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = t0 + static_cast<double>(k) / kTargetFps;
  return grid;
}

FrameTrack resample_track(const FrameTrack& track, double native_fps, const QualityRules& rules) {
  require_fps(native_fps, track.size(), rules);
  const auto grid = resample_grid(track.timestamps.front(), track.size(), native_fps);
  const auto& t = track.timestamps;

  FrameTrack out;
  out.timestamps = grid;
  out.confidence = interpolate_linear(t, track.confidence, grid);
  out.pitch = interpolate_linear(t, track.pitch, grid);
  out.yaw = interpolate_linear(t, track.yaw, grid);
  out.roll = interpolate_linear(t, track.roll, grid);
  out.gaze_x = interpolate_linear(t, track.gaze_x, grid);
  out.gaze_y = interpolate_linear(t, track.gaze_y, grid);
  const auto nearest = nearest_indices(t, grid);
  for (std::size_t a = 0; a < kNumAUs; ++a) {
    out.au_intensity[a] = interpolate_linear(t, track.au_intensity[a], grid);
    out.au_presence[a].resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out.au_presence[a][k] = track.au_presence[a][nearest[k]];
  }
  out.valid.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.valid[k] = track.valid.empty() ? 1 : track.valid[nearest[k]];
  }
  return out;
}

RGBTrace resample_rgb(const RGBTrace& trace, double native_fps, const QualityRules& rules) {
  require_fps(native_fps, trace.size(), rules);
  const auto grid = resample_grid(trace.timestamps.front(), trace.size(), native_fps);
  RGBTrace out;
  out.timestamps = grid;
  out.r = interpolate_linear(trace.timestamps, trace.r, grid);
  out.g = interpolate_linear(trace.timestamps, trace.g, grid);
  out.b = interpolate_linear(trace.timestamps, trace.b, grid);
  return out;
}

QualityResult quality_filter(FrameTrack track, const QualityRules& rules, const PhaseMap* phases) {
  std::size_t considered = 0;
  std::size_t invalid = 0;
  for (std::size_t i = 0; i < track.size(); ++i) {
    const bool ok = track.confidence[i] >= rules.min_confidence;
    track.valid[i] = ok ? 1 : 0;
    if (phases && !phases->phase_at(track.timestamps[i])) continue;
    ++considered;
    if (!ok) ++invalid;
  }
  const double fraction = considered == 0 ? 1.0 : static_cast<double>(invalid) / static_cast<double>(considered);
  if (fraction > rules.max_invalid_fraction) {
    throw Error(ErrorKind::ExcludedLowQuality, std::to_string(invalid) + " of " + std::to_string(considered) +
                                                   " frames below confidence " +
                                                   format_double(rules.min_confidence));
  }
  return {std::move(track), fraction};
}

std::array<FrameTrack, kNumPhases> segment_phases(const FrameTrack& track, const PhaseMap& phases) {
  if (track.size() == 0) throw Error(ErrorKind::PhaseOutOfRange, "empty track");
  const double lo = track.timestamps.front() - kTimeEps;
  const double hi = track.timestamps.back() + kFrameDt + kTimeEps;
  for (auto p : kPhases) {
    const auto& iv = phases[p];
    if (iv.start < lo || iv.end > hi) {
      throw Error(ErrorKind::PhaseOutOfRange, "phase " + phase_name(p) + " [" + format_double(iv.start) + ", " +
                                                  format_double(iv.end) + ") outside track span");
    }
  }
  std::array<FrameTrack, kNumPhases> out;
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (auto p = phases.phase_at(track.timestamps[i])) out[p->index()].push_frame(track, i);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct ManifestRow {
  ParticipantMeta meta;
  std::filesystem::path track, audio, rgb, phases;
  double native_fps = 0.0;
};

std::vector<ManifestRow> parse_manifest(const std::filesystem::path& manifest_path) {
  auto table = CsvTable::read(manifest_path);
  const auto base = manifest_path.parent_path();
  const auto c_id = table.column("id");
  const auto c_label = table.column("label");
  const auto c_gender = table.column("gender");
  const auto c_setting = table.column("setting");
  const auto c_aq = table.column("aq");
  const auto c_track = table.column("track_path");
  const auto c_audio = table.column("audio_path");
  const auto c_rgb = table.column("rgb_path");
  const auto c_phases = table.column("phases_path");
  const auto c_fps = table.column("native_fps");

  auto resolve = [&](std::string_view p) -> std::filesystem::path {
    if (p.empty()) return {};
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
  };

  std::vector<ManifestRow> rows;
  std::set<std::string, std::less<>> ids;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    ManifestRow row;
    row.meta.id = std::string(table.cell(r, c_id));
    if (row.meta.id.empty()) throw Error(ErrorKind::ParseError, table.where(r, c_id) + ": empty id");
    if (!ids.insert(row.meta.id).second) {
      throw Error(ErrorKind::DuplicateParticipant, table.where(r, c_id) + ": duplicate id '" + row.meta.id + "'");
    }
    auto label = parse_label(table.cell(r, c_label));
    if (!label) {
      throw Error(ErrorKind::ParseError,
                  table.where(r, c_label) + ": unknown label '" + std::string(table.cell(r, c_label)) + "'");
    }
    row.meta.label = *label;
    auto gender = parse_gender(table.cell(r, c_gender));
    if (!gender) {
      throw Error(ErrorKind::ParseError,
                  table.where(r, c_gender) + ": unknown gender '" + std::string(table.cell(r, c_gender)) + "'");
    }
    row.meta.gender = *gender;
    auto setting = parse_setting(table.cell(r, c_setting));
    if (!setting) {
      throw Error(ErrorKind::ParseError,
                  table.where(r, c_setting) + ": unknown setting '" + std::string(table.cell(r, c_setting)) + "'");
    }
    row.meta.setting = *setting;
    if (auto aq = table.optional_number(r, c_aq)) {
      if (*aq < 0.0 || *aq != std::floor(*aq)) {
        throw Error(ErrorKind::ParseError, table.where(r, c_aq) + ": AQ must be a non-negative integer");
      }
      row.meta.aq = static_cast<int>(*aq);
    }
    row.track = resolve(table.cell(r, c_track));
    row.audio = resolve(table.cell(r, c_audio));
    row.rgb = resolve(table.cell(r, c_rgb));
    row.phases = resolve(table.cell(r, c_phases));
    if (row.track.empty() || row.phases.empty()) {
      throw Error(ErrorKind::ParseError, table.where(r, c_track) + ": track_path and phases_path are required");
    }
    row.native_fps = table.number(r, c_fps);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ParticipantData prepare_participant(const RawParticipant& raw, const QualityRules& rules) {
  auto quality = quality_filter(resample_track(raw.track, raw.native_fps, rules), rules, &raw.phases);
  segment_phases(quality.track, raw.phases);  // range check only
  ParticipantData data{raw.meta, std::move(quality.track), quality.invalid_fraction, raw.phases, raw.prosody, {}};
  if (raw.rgb) data.rgb = resample_rgb(*raw.rgb, raw.native_fps, rules);
  return data;
}

namespace {

// Runs `load(i)` for every participant, turning the two exclusion errors into
// QC entries and tagging other errors with the participant id.
template <typename Load>
Cohort assemble(std::size_t n, unsigned jobs, const std::vector<std::string>& ids, Load load) {
  std::vector<std::optional<ParticipantData>> loaded(n);
  std::vector<std::optional<QcEntry>> excluded(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    try {
      loaded[i] = load(i);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ExcludedLowFrameRate || e.kind() == ErrorKind::ExcludedLowQuality) {
        excluded[i] = QcEntry{ids[i], std::string(to_string(e.kind())), e.what()};
        return;
      }
      throw Error(e.kind(), "participant '" + ids[i] + "': " + e.what());
    }
  });
  Cohort cohort;
  for (std::size_t i = 0; i < n; ++i) {
    if (loaded[i]) cohort.participants.push_back(std::move(*loaded[i]));
    if (excluded[i]) cohort.qc_log.push_back(std::move(*excluded[i]));
  }
  return cohort;
}

}  // namespace

Cohort load_cohort(const std::filesystem::path& manifest_path, const QualityRules& rules, unsigned jobs) {
  const auto rows = parse_manifest(manifest_path);
  std::vector<std::string> ids;
  for (const auto& r : rows) ids.push_back(r.meta.id);
  return assemble(rows.size(), jobs, ids, [&](std::size_t i) {
    const auto& row = rows[i];
    RawParticipant raw{row.meta, read_track_csv(row.track), row.native_fps, read_phase_map(row.phases), {}, {}};
    if (!row.audio.empty()) raw.prosody = load_prosody(row.audio);
    if (!row.rgb.empty()) raw.rgb = read_rgb_csv(row.rgb);
    return prepare_participant(raw, rules);
  });
}

Cohort build_cohort(const std::vector<RawParticipant>& raw, const QualityRules& rules, unsigned jobs) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& r : raw) {
    if (!seen.insert(r.meta.id).second) {
      throw Error(ErrorKind::DuplicateParticipant, "participant id '" + r.meta.id + "' appears twice");
    }
    ids.push_back(r.meta.id);
  }
  return assemble(raw.size(), jobs, ids, [&](std::size_t i) { return prepare_participant(raw[i], rules); });
}

std::string format_qc_log(std::span<const QcEntry> entries) {
  std::string out = "id,reason,detail\n";
  for (const auto& e : entries) {
    std::string detail = e.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    out += e.id + "," + e.reason + "," + detail + "\n";
  }
  return out;
}

}  // namespace sitm
