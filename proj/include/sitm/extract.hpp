#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sitm/feature_table.hpp"
#include "sitm/gazescreen.hpp"
#include "sitm/ingest.hpp"
#include "sitm/motion.hpp"
#include "sitm/physio.hpp"

namespace sitm {

struct ExtractParams {
  MotionParams motion;
  ScreenGeometry screen;                     // lab recordings, and home ones without an override
  std::optional<ScreenGeometry> home_screen;
  PhysioParams physio;
};

/// Feature columns in early-fusion order. Audio columns follow the cohort's
/// functional names.
std::vector<std::string> feature_columns(const std::vector<std::string>& audio_names);

/// One projected gaze sample from a listening phase, kept for plotting.
struct GazeSample {
  std::size_t participant = 0;  // row in the feature table
  Phase phase{};
  double x_mm = 0.0;
  double y_mm = 0.0;
};

struct Extraction {
  FeatureTable table;
  std::vector<GazeSample> gaze_points;
};

/// Per-participant values aligned with feature_columns(audio_names); missing
/// values are NaN.
std::vector<double> extract_participant(const ParticipantData& p, const std::vector<std::string>& audio_names,
                                        const ExtractParams& params, std::vector<GazeSample>* gaze_points = nullptr);

/// Extracts every participant. All prosody files must share one set of
/// functional names (SchemaError otherwise).
Extraction extract_cohort(const std::vector<ParticipantData>& participants, const ExtractParams& params,
                          unsigned jobs = 1);

std::string format_gaze_points(const Extraction& extraction);

}  // namespace sitm
