#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sitm/config.hpp"
#include "sitm/ingest.hpp"

namespace sitm {

/// Synthetic cohort settings. Effect knobs act on the ASC group only and are
/// neutral (no group difference) at their defaults.
struct SynthSpec {
  int n_per_group = 50;
  std::uint64_t seed = 1;
  double fps = 30.0;
  double phase_duration_s = 25.0;
  int low_fps_participants = 0;  // the last ones are recorded at 14 FPS

  double gaze_std_ratio = 1.0;     // ASC / control spread of gaze points on the screen
  double au_mean_shift = 0.0;      // added to every AU baseline intensity
  double hr_shift_bpm = 0.0;
  double head_motion_ratio = 1.0;  // scales head-rotation noise
  double prosody_shift = 0.0;      // in units of each functional's spread
  double aq_shift = 0.0;

  double gaze_spread_mm = 35.0;    // control spread (per axis) around the screen centre
  double gaze_subject_sd = 0.15;   // log-normal participant variation of the spread
  double invalid_frame_rate = 0.0; // share of frames with low tracking confidence
  double home_fraction = 0.3;

  /// Throws ConfigError on impossible values.
  void validate() const;
};

/// Reads keys from a `[synth]` section (or the top level).
SynthSpec make_synth_spec(const ConfigFile& file);

/// Deterministic in memory cohort; participant i depends only on the seed and i.
std::vector<RawParticipant> generate_participants(const SynthSpec& spec);

/// Writes `manifest.csv` and a folder of raw input files for each participant
/// under `out_dir`. Throws IOError when the directory is not writable.
void write_cohort(const std::vector<RawParticipant>& participants, const std::filesystem::path& out_dir);

/// Skin-tone RGB trace with a pulse at `hr_bpm`, modulated at 0.1 and
/// 0.25 Hz by `hrv_depth` (relative frequency swing), plus sensor noise.
RGBTrace synth_rgb_trace(double duration_s, double fps, double hr_bpm, double hrv_depth, std::uint64_t seed);

}  // namespace sitm
