#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sitm/types.hpp"

namespace sitm {

struct PhysioParams {
  double pos_window_s = 1.6;
  double rolling_mean_window_s = 0.75;
  double refractory_s = 0.33;
  double min_ibi_ms = 300.0;
  double max_ibi_ms = 2000.0;
  double min_signal_s = 5.0;
  double band_low_hz = 0.6;
  double band_high_hz = 4.0;
  double min_lfhf_span_s = 60.0;
};

/// Plane-orthogonal-to-skin pulse extraction with overlap-added sliding
/// windows. Per window each channel is divided by its window mean, projected
/// to s1 = g - b and s2 = g + b - 2r, combined as s1 + (std s1 / std s2) s2
/// and mean-centred. Windows with zero std of s2 contribute nothing.
/// nullopt when the trace is shorter than one window.
std::optional<std::vector<double>> pos_bvp(std::span<const double> r, std::span<const double> g,
                                           std::span<const double> b, double fs, double window_s = 1.6);
std::optional<std::vector<double>> pos_bvp(const RGBTrace& trace, double fs, double window_s = 1.6);

/// Zero-phase band-pass: second-order Butterworth high-pass at `low_hz` and
/// low-pass at `high_hz`, each run forward then backward over an
/// odd-reflected extension of the signal.
std::vector<double> bandpass(std::span<const double> x, double fs, double low_hz, double high_hz);

struct BeatSeries {
  std::vector<double> peak_times_s;
  std::vector<double> ibi_ms;       // accepted inter-beat intervals
  std::vector<double> ibi_times_s;  // time of the beat closing each interval
};

/// Adaptive-threshold peak picking: the maximum of each excursion above a
/// centred rolling mean (excursions cut off by either end of the signal are
/// not peaks), a refractory period keeping the larger of close
/// peaks, parabolic sub-sample refinement, then range gating of intervals.
/// The threshold is lifted above the rolling mean by a ladder of offsets and
/// the lift giving the most regular intervals at a plausible rate is kept.
/// nullopt for signals shorter than min_signal_s or fewer than 2 peaks.
std::optional<BeatSeries> detect_beats(std::span<const double> bvp, double fs = 30.0, double t0 = 0.0,
                                       const PhysioParams& params = {});

struct HrvMetrics {
  std::optional<double> mean_hr;  // beats per minute
  std::optional<double> sdnn;     // ms, population std
  std::optional<double> rmssd;    // ms
  std::optional<double> lf_hf;
};

/// `ibi_times_s` may be empty, in which case beat times are the cumulative
/// sum of the intervals. LF/HF uses a Lomb-Scargle periodogram of the
/// mean-removed interval series over 0.04-0.15 Hz and 0.15-0.4 Hz and needs
/// the intervals to cover at least min_lfhf_span_s.
HrvMetrics hrv_metrics(std::span<const double> ibi_ms, std::span<const double> ibi_times_s = {},
                       const PhysioParams& params = {});

/// Classic (Lomb 1976 / Scargle 1982) periodogram at one frequency, on
/// mean-removed values.
double lomb_scargle_power(std::span<const double> t, std::span<const double> y, double freq_hz);

/// Sum of periodogram power times the grid step over [lo, hi).
double lomb_scargle_band_power(std::span<const double> t, std::span<const double> y, double lo_hz, double hi_hz,
                               double step_hz = 0.0005);

}  // namespace sitm
