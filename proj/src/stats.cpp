#include "sitm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sitm::stats {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CentralMoments {
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
};

CentralMoments central_moments(std::span<const double> x) {
  const double mu = mean(x);
  CentralMoments m;
  for (double v : x) {
    const double d = v - mu;
    const double d2 = d * d;
    m.m2 += d2;
    m.m3 += d2 * d;
    m.m4 += d2 * d2;
  }
  const double n = static_cast<double>(x.size());
  m.m2 /= n;
  m.m3 /= n;
  m.m4 /= n;
  return m;
}

// Relative tolerance under which a spread counts as zero for the moment ratios.
bool degenerate_spread(std::span<const double> x, double m2) {
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  return m2 <= 1e-24 * std::max(1.0, scale * scale);
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) return kNaN;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double population_std(std::span<const double> x) {
  if (x.empty()) return kNaN;
  const double mu = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return std::sqrt(s / static_cast<double>(x.size()));
}

double median(std::span<const double> x) {
  if (x.empty()) return kNaN;
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

double quantile(std::span<const double> x, double q) {
  if (x.empty()) return kNaN;
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double iqr(std::span<const double> x) {
  if (x.empty()) return kNaN;
  return quantile(x, 0.75) - quantile(x, 0.25);
}

double min(std::span<const double> x) {
  if (x.empty()) return kNaN;
  return *std::min_element(x.begin(), x.end());
}

double max(std::span<const double> x) {
  if (x.empty()) return kNaN;
  return *std::max_element(x.begin(), x.end());
}

double skewness(std::span<const double> x) {
  if (x.empty()) return kNaN;
  auto m = central_moments(x);
  if (degenerate_spread(x, m.m2)) return 0.0;
  return m.m3 / std::pow(m.m2, 1.5);
}

double excess_kurtosis(std::span<const double> x) {
  if (x.empty()) return kNaN;
  auto m = central_moments(x);
  if (degenerate_spread(x, m.m2)) return 0.0;
  return m.m4 / (m.m2 * m.m2) - 3.0;
}

std::vector<double> finite_values(std::span<const double> x) {
  std::vector<double> out;
  out.reserve(x.size());
  for (double v : x) {
    if (std::isfinite(v)) out.push_back(v);
  }
  return out;
}

}  // namespace sitm::stats
