#include "sitm/motion.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sitm/stats.hpp"

namespace sitm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class SampleClass { Gap, Fixation, Saccade };

struct Run {
  SampleClass kind;
  std::size_t first;  // first velocity sample
  std::size_t last;   // inclusive
};

}  // namespace

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

std::optional<Kinematics> angular_kinematics(const std::vector<std::span<const double>>& axes,
                                             std::span<const std::uint8_t> valid, double dt) {
  const std::size_t n = valid.size();
  std::size_t n_valid = 0;
  for (auto v : valid) n_valid += v;
  if (n_valid < 3) return std::nullopt;

  Kinematics k;
  k.velocity.assign(n - 1, kNaN);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!valid[i] || !valid[i + 1]) continue;
    double sq = 0.0;
    for (const auto& axis : axes) {
      const double d = axis[i + 1] - axis[i];
      sq += d * d;
    }
    k.velocity[i] = std::sqrt(sq) / dt;
  }
  k.acceleration.assign(n >= 2 ? n - 2 : 0, kNaN);
  for (std::size_t i = 0; i + 1 < k.velocity.size(); ++i) {
    // NaN propagates across gaps.
    k.acceleration[i] = (k.velocity[i + 1] - k.velocity[i]) / dt;
  }
  return k;
}

std::vector<double> stability_durations(std::span<const double> velocity, double threshold, double dt) {
  std::vector<double> durations;
  std::size_t run = 0;
  for (double v : velocity) {
    if (v < threshold) {  // false for NaN
      ++run;
    } else if (run > 0) {
      durations.push_back(static_cast<double>(run) * dt);
      run = 0;
    }
  }
  if (run > 0) durations.push_back(static_cast<double>(run) * dt);
  return durations;
}

int detect_nods(std::span<const double> pitch, std::span<const std::uint8_t> valid, double dt, double window_s,
                double amplitude_min) {
  const std::size_t n = pitch.size();
  int nods = 0;
  std::size_t i = 0;
  while (i < n) {
    const bool local_max = valid[i] && (i == 0 || !valid[i - 1] || pitch[i] >= pitch[i - 1]) &&
                           (i + 1 < n && valid[i + 1] && pitch[i] >= pitch[i + 1]);
    if (!local_max) {
      ++i;
      continue;
    }
    const double level = pitch[i];
    bool dipped = false;
    std::optional<std::size_t> recovered;
    for (std::size_t j = i + 1; j < n && static_cast<double>(j - i) * dt <= window_s + 1e-12; ++j) {
      if (!valid[j]) break;
      if (pitch[j] <= level - amplitude_min) dipped = true;
      if (dipped && pitch[j] >= level - amplitude_min / 2.0) {
        recovered = j;
        break;
      }
    }
    if (recovered) {
      ++nods;
      i = *recovered + 1;
    } else {
      ++i;
    }
  }
  return nods;
}

GazeEvents fixations_saccades(std::span<const double> x, std::span<const double> y,
                              std::span<const std::uint8_t> valid, double velocity_threshold, double dt) {
  GazeEvents events;
  const std::size_t n = valid.size();
  if (n < 2) return events;

  std::vector<Run> runs;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    SampleClass c = SampleClass::Gap;
    if (valid[k] && valid[k + 1]) {
      const double dx = x[k + 1] - x[k];
      const double dy = y[k + 1] - y[k];
      c = std::sqrt(dx * dx + dy * dy) / dt < velocity_threshold ? SampleClass::Fixation : SampleClass::Saccade;
    }
    if (!runs.empty() && runs.back().kind == c) {
      runs.back().last = k;
    } else {
      runs.push_back({c, k, k});
    }
  }

  std::vector<std::optional<std::size_t>> fixation_of_run(runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    if (run.kind != SampleClass::Fixation) continue;
    Fixation f;
    f.first_frame = run.first;
    f.last_frame = run.last + 1;
    f.duration = static_cast<double>(run.last - run.first + 1) * dt;
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = f.first_frame; i <= f.last_frame; ++i) {
      sx += x[i];
      sy += y[i];
    }
    const double count = static_cast<double>(f.last_frame - f.first_frame + 1);
    f.centroid_x = sx / count;
    f.centroid_y = sy / count;
    fixation_of_run[r] = events.fixations.size();
    events.fixations.push_back(f);
  }

  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    if (run.kind != SampleClass::Saccade) continue;
    Saccade s;
    s.first_frame = run.first;
    s.last_frame = run.last + 1;
    s.duration = static_cast<double>(run.last - run.first + 1) * dt;
    if (r > 0 && r + 1 < runs.size() && fixation_of_run[r - 1] && fixation_of_run[r + 1]) {
      const auto& before = events.fixations[*fixation_of_run[r - 1]];
      const auto& after = events.fixations[*fixation_of_run[r + 1]];
      s.amplitude = std::hypot(after.centroid_x - before.centroid_x, after.centroid_y - before.centroid_y);
    }
    events.saccades.push_back(s);
  }
  return events;
}

std::optional<std::vector<double>> median_normalize(std::span<const double> series) {
  if (series.empty()) return std::nullopt;
  const double m = stats::median(series);
  std::vector<double> out(series.begin(), series.end());
  for (auto& v : out) v -= m;
  return out;
}

}  // namespace sitm
