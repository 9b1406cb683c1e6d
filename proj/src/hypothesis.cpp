#include "sitm/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sitm/error.hpp"

namespace sitm {
namespace {

struct RankSums {
  double u_a = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  bool ties = false;
};

RankSums rank_sums(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::InputError, "Mann-Whitney needs values in both groups");
  std::vector<std::pair<double, int>> all;
  all.reserve(a.size() + b.size());
  for (double v : a) all.emplace_back(v, 0);
  for (double v : b) all.emplace_back(v, 1);
  for (const auto& [v, g] : all) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InputError, "Mann-Whitney values must be finite");
  }
  std::sort(all.begin(), all.end());
  RankSums out;
  double rank_sum_a = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    const auto t = static_cast<double>(j - i);
    if (t > 1) out.ties = true;
    out.tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].second == 0) rank_sum_a += midrank;
    }
    i = j;
  }
  const auto na = static_cast<double>(a.size());
  out.u_a = rank_sum_a - na * (na + 1.0) / 2.0;
  return out;
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alt) {
  const auto rs = rank_sums(a, b);
  TestResult r;
  r.statistic = rs.u_a;
  r.n_a = a.size();
  r.n_b = b.size();
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  const double n = na + nb;
  const double mu = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - rs.tie_term / (n * (n - 1.0)));
  if (!(var > 0.0)) {
    r.p_value = 1.0;
    return r;
  }
  const double diff = rs.u_a - mu;
  const double corrected = std::abs(diff) <= 0.5 ? 0.0 : diff - std::copysign(0.5, diff);
  r.z = corrected / std::sqrt(var);
  r.effect_size = r.z / std::sqrt(n);
  switch (alt) {
    case Alternative::TwoSided: r.p_value = std::min(1.0, std::erfc(std::abs(r.z) / std::sqrt(2.0))); break;
    case Alternative::Less: r.p_value = normal_cdf(r.z); break;
    case Alternative::Greater: r.p_value = 1.0 - normal_cdf(r.z); break;
  }
  return r;
}

TestResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b, Alternative alt) {
  const auto rs = rank_sums(a, b);
  if (rs.ties) throw Error(ErrorKind::InputError, "exact Mann-Whitney needs tie-free data");
  const std::size_t m = a.size(), n = b.size();
  if (m + n > 60) throw Error(ErrorKind::InputError, "exact Mann-Whitney is limited to 60 values");

  // count[i][j][u]: orderings of i a-values and j b-values with U = u, built
  // by placing the largest value last.
  const std::size_t max_u = m * n;
  std::vector<std::vector<std::vector<double>>> count(
      m + 1, std::vector<std::vector<double>>(n + 1, std::vector<double>(max_u + 1, 0.0)));
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (i == 0 || j == 0) {
        count[i][j][0] = 1.0;
        continue;
      }
      for (std::size_t u = 0; u <= i * j; ++u) {
        // Largest is an a-value: it beats all j b-values.
        double c = u >= j ? count[i - 1][j][u - j] : 0.0;
        c += count[i][j - 1][u];
        count[i][j][u] = c;
      }
    }
  }
  const auto& dist = count[m][n];
  const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
  const auto u = static_cast<std::size_t>(std::llround(rs.u_a));
  double lower = 0.0, upper = 0.0;
  for (std::size_t k = 0; k <= max_u; ++k) {
    if (k <= u) lower += dist[k];
    if (k >= u) upper += dist[k];
  }
  TestResult r;
  r.statistic = rs.u_a;
  r.n_a = m;
  r.n_b = n;
  r.exact = true;
  switch (alt) {
    case Alternative::Less: r.p_value = lower / total; break;
    case Alternative::Greater: r.p_value = upper / total; break;
    case Alternative::TwoSided: r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / total); break;
  }
  const double nn = static_cast<double>(m + n);
  const double var = static_cast<double>(m * n) * (nn + 1.0) / 12.0;
  r.effect_size = (rs.u_a - static_cast<double>(m * n) / 2.0) / std::sqrt(var) / std::sqrt(nn);
  return r;
}

TestResult chi_square_2x2(const std::array<std::array<std::uint64_t, 2>, 2>& table) {
  const auto a = static_cast<double>(table[0][0]);
  const auto b = static_cast<double>(table[0][1]);
  const auto c = static_cast<double>(table[1][0]);
  const auto d = static_cast<double>(table[1][1]);
  const double r0 = a + b, r1 = c + d, c0 = a + c, c1 = b + d;
  if (r0 == 0 || r1 == 0 || c0 == 0 || c1 == 0) {
    throw Error(ErrorKind::DegenerateTable, "2x2 table has an empty row or column");
  }
  const double n = r0 + r1;
  const double cross = a * d - b * c;
  const double denom = r0 * r1 * c0 * c1;
  TestResult r;
  r.statistic = n * cross * cross / denom;
  r.p_value = std::min(1.0, std::erfc(std::sqrt(r.statistic / 2.0)));
  r.effect_size = cross / std::sqrt(denom);
  r.n_a = static_cast<std::size_t>(r0);
  r.n_b = static_cast<std::size_t>(r1);
  return r;
}

double ks_uniform_distance(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::InputError, "KS distance needs at least one value");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double p = std::clamp(values[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - p, p - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace sitm
