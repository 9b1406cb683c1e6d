#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sitm {

/// Thresholds for the kinematic descriptors, in degrees as configured.
struct MotionParams {
  double ivt_threshold_deg_s = 30.0;
  double stability_threshold_deg_s = 10.0;
  double nod_amplitude_deg = 3.0;
  double nod_window_s = 1.5;
};

double deg_to_rad(double deg);
double rad_to_deg(double rad);

struct Kinematics {
  /// velocity[i] is the speed between frames i and i+1 (size n-1);
  /// NaN where either frame is invalid.
  std::vector<double> velocity;
  /// acceleration[i] = (velocity[i+1] - velocity[i]) / dt (size n-2); NaN across gaps.
  std::vector<double> acceleration;
};

/// Finite-difference speed of a (possibly multi-axis) angle trajectory:
/// Euclidean norm of the per-axis differences divided by dt. nullopt with
/// fewer than 3 valid frames.
std::optional<Kinematics> angular_kinematics(const std::vector<std::span<const double>>& axes,
                                             std::span<const std::uint8_t> valid, double dt);

/// Durations of maximal runs with velocity < threshold (run length x dt);
/// NaN samples end a run.
std::vector<double> stability_durations(std::span<const double> velocity, double threshold, double dt);

/// Counts head nods: from a local maximum of pitch, a dip of at least
/// amplitude_min below that level, then recovery to within amplitude_min/2
/// of it, all within `window_s`. Scanning resumes after each recovery.
/// Invalid frames interrupt a candidate.
int detect_nods(std::span<const double> pitch, std::span<const std::uint8_t> valid, double dt, double window_s,
                double amplitude_min);

struct Fixation {
  std::size_t first_frame = 0;
  std::size_t last_frame = 0;  // inclusive
  double duration = 0.0;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
};

struct Saccade {
  std::size_t first_frame = 0;
  std::size_t last_frame = 0;
  double duration = 0.0;
  /// Angular distance between the bounding fixation centroids; absent when
  /// the saccade is not bounded by fixations on both sides.
  std::optional<double> amplitude;
};

struct GazeEvents {
  std::vector<Fixation> fixations;
  std::vector<Saccade> saccades;
};

/// I-VT segmentation on per-sample speed: samples below the threshold form
/// fixations, samples at or above it form saccades. A run of k samples lasts
/// k x dt and spans k+1 frames.
GazeEvents fixations_saccades(std::span<const double> x, std::span<const double> y,
                              std::span<const std::uint8_t> valid, double velocity_threshold, double dt);

/// series - median(series); nullopt for an empty series.
std::optional<std::vector<double>> median_normalize(std::span<const double> series);

}  // namespace sitm
