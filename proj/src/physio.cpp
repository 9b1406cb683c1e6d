#include "sitm/physio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sitm/stats.hpp"

namespace sitm {

std::optional<std::vector<double>> pos_bvp(std::span<const double> r, std::span<const double> g,
                                           std::span<const double> b, double fs, double window_s) {
  const std::size_t n = r.size();
  const auto len = static_cast<std::size_t>(std::lround(window_s * fs));
  if (len < 2 || n < len) return std::nullopt;

  std::vector<double> out(n, 0.0);
  std::vector<double> s1(len), s2(len);
  for (std::size_t start = 0; start + len <= n; ++start) {
    double mr = 0.0, mg = 0.0, mb = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      mr += r[start + k];
      mg += g[start + k];
      mb += b[start + k];
    }
    const double inv = 1.0 / static_cast<double>(len);
    mr *= inv;
    mg *= inv;
    mb *= inv;
    for (std::size_t k = 0; k < len; ++k) {
      const double rn = r[start + k] / mr;
      const double gn = g[start + k] / mg;
      const double bn = b[start + k] / mb;
      s1[k] = gn - bn;
      s2[k] = gn + bn - 2.0 * rn;
    }
    const double sd1 = stats::population_std(s1);
    const double sd2 = stats::population_std(s2);
    if (!(sd2 > 1e-15)) continue;
    const double alpha = sd1 / sd2;
    double mean_h = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      s1[k] += alpha * s2[k];
      mean_h += s1[k];
    }
    mean_h *= inv;
    for (std::size_t k = 0; k < len; ++k) out[start + k] += s1[k] - mean_h;
  }
  return out;
}

std::optional<std::vector<double>> pos_bvp(const RGBTrace& trace, double fs, double window_s) {
  return pos_bvp(trace.r, trace.g, trace.b, fs, window_s);
}

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;

  void run(std::vector<double>& x) const {
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    for (auto& v : x) {
      const double y = b0 * v + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
      x2 = x1;
      x1 = v;
      y2 = y1;
      y1 = y;
      v = y;
    }
  }
};

// Bilinear-transform Butterworth sections (Q = 1/sqrt 2).
Biquad butterworth(double fs, double cutoff, bool highpass) {
  const double w0 = 2.0 * std::numbers::pi * cutoff / fs;
  const double alpha = std::sin(w0) / std::numbers::sqrt2;
  const double c = std::cos(w0);
  const double a0 = 1.0 + alpha;
  const double k = highpass ? (1.0 + c) / 2.0 : (1.0 - c) / 2.0;
  const double mid = highpass ? -2.0 * k : 2.0 * k;
  return {k / a0, mid / a0, k / a0, -2.0 * c / a0, (1.0 - alpha) / a0};
}

}  // namespace

std::vector<double> bandpass(std::span<const double> x, double fs, double low_hz, double high_hz) {
  const std::size_t n = x.size();
  if (n < 2) return {x.begin(), x.end()};
  const auto pad = std::min(n - 1, static_cast<std::size_t>(std::lround(fs / low_hz)));
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t k = pad; k >= 1; --k) ext.push_back(2.0 * x[0] - x[k]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t k = 1; k <= pad; ++k) ext.push_back(2.0 * x[n - 1] - x[n - 1 - k]);

  const Biquad sections[2] = {butterworth(fs, low_hz, true), butterworth(fs, std::min(high_hz, 0.45 * fs), false)};
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& s : sections) s.run(ext);
    std::reverse(ext.begin(), ext.end());
  }
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

namespace {

std::vector<std::size_t> pick_peaks(std::span<const double> bvp, std::span<const double> rolling, double offset,
                                    double refractory) {
  const std::size_t n = bvp.size();
  std::vector<std::size_t> peaks;
  std::size_t i = 0;
  while (i < n) {
    if (!(bvp[i] > rolling[i] + offset)) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    std::size_t best = i;
    while (i < n && bvp[i] > rolling[i] + offset) {
      if (bvp[i] > bvp[best]) best = i;
      ++i;
    }
    if (begin == 0 || i == n) continue;
    if (!peaks.empty() && static_cast<double>(best - peaks.back()) < refractory) {
      if (bvp[best] > bvp[peaks.back()]) peaks.back() = best;
      continue;
    }
    peaks.push_back(best);
  }
  return peaks;
}

BeatSeries to_beats(std::span<const double> bvp, std::span<const std::size_t> peaks, double fs, double t0,
                    const PhysioParams& params) {
  const std::size_t n = bvp.size();
  BeatSeries beats;
  for (auto p : peaks) {
    double offset = 0.0;
    if (p > 0 && p + 1 < n) {
      const double denom = bvp[p - 1] - 2.0 * bvp[p] + bvp[p + 1];
      if (denom < 0.0) offset = std::clamp(0.5 * (bvp[p - 1] - bvp[p + 1]) / denom, -0.5, 0.5);
    }
    beats.peak_times_s.push_back(t0 + (static_cast<double>(p) + offset) / fs);
  }
  for (std::size_t k = 1; k < beats.peak_times_s.size(); ++k) {
    const double ibi = (beats.peak_times_s[k] - beats.peak_times_s[k - 1]) * 1000.0;
    if (ibi < params.min_ibi_ms || ibi > params.max_ibi_ms) continue;
    beats.ibi_ms.push_back(ibi);
    beats.ibi_times_s.push_back(beats.peak_times_s[k]);
  }
  return beats;
}

// Threshold lifts tried above the rolling mean, in percent of the signal's
// standard deviation. The same ladder HeartPy walks, scaled to a zero-mean signal.
constexpr double kLiftPercent[] = {0, 5, 10, 15, 20, 25, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120, 150};

}  // namespace

std::optional<BeatSeries> detect_beats(std::span<const double> bvp, double fs, double t0,
                                       const PhysioParams& params) {
  const std::size_t n = bvp.size();
  if (static_cast<double>(n) < params.min_signal_s * fs) return std::nullopt;

  // Centred rolling mean via prefix sums, window clipped at the edges.
  const auto half = static_cast<std::size_t>(std::lround(params.rolling_mean_window_s * fs / 2.0));
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + bvp[i];
  std::vector<double> rolling(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    rolling[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  const double sd = stats::population_std(bvp);
  const double duration_min = static_cast<double>(n) / fs / 60.0;
  const double min_bpm = 60000.0 / params.max_ibi_ms;
  const double max_bpm = 60000.0 / params.min_ibi_ms;

  // Keep the lift whose accepted intervals vary least, among lifts whose
  // beat rate is physiologically plausible.
  std::optional<BeatSeries> best;
  double best_spread = std::numeric_limits<double>::infinity();
  for (double lift : kLiftPercent) {
    const auto peaks = pick_peaks(bvp, rolling, lift / 100.0 * sd, params.refractory_s * fs);
    if (peaks.size() < 2) continue;
    const double bpm = static_cast<double>(peaks.size()) / duration_min;
    if (bpm < min_bpm || bpm > max_bpm) continue;
    auto beats = to_beats(bvp, peaks, fs, t0, params);
    if (beats.ibi_ms.empty()) continue;
    const double spread = stats::population_std(beats.ibi_ms);
    if (spread < best_spread) {
      best_spread = spread;
      best = std::move(beats);
    }
  }
  return best;
}

double lomb_scargle_power(std::span<const double> t, std::span<const double> y, double freq_hz) {
  const double w = 2.0 * std::numbers::pi * freq_hz;
  double s2 = 0.0, c2 = 0.0;
  for (double ti : t) {
    s2 += std::sin(2.0 * w * ti);
    c2 += std::cos(2.0 * w * ti);
  }
  const double tau = std::atan2(s2, c2) / (2.0 * w);
  double yc = 0.0, ys = 0.0, cc = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double arg = w * (t[i] - tau);
    const double c = std::cos(arg);
    const double s = std::sin(arg);
    yc += y[i] * c;
    ys += y[i] * s;
    cc += c * c;
    ss += s * s;
  }
  double p = 0.0;
  if (cc > 0.0) p += yc * yc / cc;
  if (ss > 0.0) p += ys * ys / ss;
  return 0.5 * p;
}

double lomb_scargle_band_power(std::span<const double> t, std::span<const double> y, double lo_hz, double hi_hz,
                               double step_hz) {
  const double mu = stats::mean(y);
  std::vector<double> centred(y.begin(), y.end());
  for (auto& v : centred) v -= mu;
  double power = 0.0;
  const auto steps = static_cast<std::size_t>(std::ceil((hi_hz - lo_hz) / step_hz - 1e-9));
  for (std::size_t k = 0; k < steps; ++k) {
    const double f = lo_hz + (static_cast<double>(k) + 0.5) * step_hz;
    power += lomb_scargle_power(t, centred, f) * step_hz;
  }
  return power;
}

HrvMetrics hrv_metrics(std::span<const double> ibi_ms, std::span<const double> ibi_times_s,
                       const PhysioParams& params) {
  HrvMetrics m;
  if (ibi_ms.empty()) return m;
  m.mean_hr = 60000.0 / stats::mean(ibi_ms);
  if (ibi_ms.size() < 2) return m;
  m.sdnn = stats::population_std(ibi_ms);
  double sq = 0.0;
  for (std::size_t i = 1; i < ibi_ms.size(); ++i) {
    const double d = ibi_ms[i] - ibi_ms[i - 1];
    sq += d * d;
  }
  m.rmssd = std::sqrt(sq / static_cast<double>(ibi_ms.size() - 1));

  double covered_s = 0.0;
  for (double v : ibi_ms) covered_s += v / 1000.0;
  if (covered_s < params.min_lfhf_span_s || ibi_ms.size() < 4) return m;

  std::vector<double> times;
  if (ibi_times_s.size() == ibi_ms.size()) {
    times.assign(ibi_times_s.begin(), ibi_times_s.end());
  } else {
    double acc = 0.0;
    for (double v : ibi_ms) {
      acc += v / 1000.0;
      times.push_back(acc);
    }
  }
  const double lf = lomb_scargle_band_power(times, ibi_ms, 0.04, 0.15);
  const double hf = lomb_scargle_band_power(times, ibi_ms, 0.15, 0.40);
  if (hf > 0.0 && lf > 0.0) m.lf_hf = lf / hf;
  return m;
}

}  // namespace sitm
