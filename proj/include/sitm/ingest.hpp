#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sitm/audiofeat.hpp"
#include "sitm/types.hpp"

namespace sitm {

/// Exclusion thresholds applied at load time.
struct QualityRules {
  double min_native_fps = 15.0;
  double min_confidence = 0.75;
  double max_invalid_fraction = 0.10;
};

// --- file readers -----------------------------------------------------------

/// OpenFace-2.2 style per-frame CSV. Header names are whitespace-trimmed.
FrameTrack read_track_csv(const std::filesystem::path& path);
FrameTrack parse_track_csv(std::string text, const std::string& source);

/// `emotion,role,start_s,end_s`; all six phases required.
PhaseMap read_phase_map(const std::filesystem::path& path);
PhaseMap parse_phase_map(std::string text, const std::string& source);

/// `timestamp,r,g,b` with strictly positive channel values.
RGBTrace read_rgb_csv(const std::filesystem::path& path);
RGBTrace parse_rgb_csv(std::string text, const std::string& source);

std::string format_track_csv(const FrameTrack& track);
std::string format_phase_map(const PhaseMap& phases);
std::string format_rgb_csv(const RGBTrace& trace);

// --- operations --------------------------------------------------------------

/// Output frame times t0 + k/30 covering [t0, t0 + n / native_fps).
std::vector<double> resample_grid(double t0, std::size_t n_frames, double native_fps);

/// Resamples to 30 FPS: continuous channels linearly interpolated, binary
/// channels from the nearest original frame, values past the last frame held.
/// Throws ExcludedLowFrameRate below rules.min_native_fps.
FrameTrack resample_track(const FrameTrack& track, double native_fps, const QualityRules& rules = {});
RGBTrace resample_rgb(const RGBTrace& trace, double native_fps, const QualityRules& rules = {});

struct QualityResult {
  FrameTrack track;
  double invalid_fraction = 0.0;
};

/// Marks frames with confidence below the threshold invalid. The fraction is
/// taken over frames inside `phases` when given, otherwise over the whole
/// track. Throws ExcludedLowQuality when it exceeds the limit.
QualityResult quality_filter(FrameTrack track, const QualityRules& rules = {},
                             const PhaseMap* phases = nullptr);

/// Splits into the six phases by half-open interval. Throws PhaseOutOfRange
/// when an interval leaves the track span [t0, t_last + 1/30].
std::array<FrameTrack, kNumPhases> segment_phases(const FrameTrack& track, const PhaseMap& phases);

// --- cohort ------------------------------------------------------------------

struct ParticipantData {
  ParticipantMeta meta;
  FrameTrack track;  // resampled, quality-filtered
  double invalid_fraction = 0.0;
  PhaseMap phases;
  std::optional<ProsodyFeatureSet> prosody;
  std::optional<RGBTrace> rgb;  // resampled to 30 FPS
};

struct QcEntry {
  std::string id;
  std::string reason;
  std::string detail;
};

struct Cohort {
  std::vector<ParticipantData> participants;
  std::vector<QcEntry> qc_log;
};

/// In-memory counterpart of one manifest row, before resampling.
struct RawParticipant {
  ParticipantMeta meta;
  FrameTrack track;
  double native_fps = kTargetFps;
  PhaseMap phases;
  std::optional<ProsodyFeatureSet> prosody;
  std::optional<RGBTrace> rgb;
};

/// Resampling, quality filter and phase range check for one participant.
/// Throws the exclusion errors unchanged.
ParticipantData prepare_participant(const RawParticipant& raw, const QualityRules& rules = {});

/// Manifest columns: id,label,gender,setting,aq,track_path,audio_path,rgb_path,phases_path,native_fps.
/// Paths are relative to the manifest's directory; audio/rgb may be empty.
Cohort load_cohort(const std::filesystem::path& manifest_path, const QualityRules& rules = {},
                   unsigned jobs = 1);

/// Same as load_cohort for participants already in memory.
Cohort build_cohort(const std::vector<RawParticipant>& raw, const QualityRules& rules = {}, unsigned jobs = 1);

std::string format_qc_log(std::span<const QcEntry> entries);

}  // namespace sitm
