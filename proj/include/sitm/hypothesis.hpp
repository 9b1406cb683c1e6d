#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace sitm {

enum class Alternative { TwoSided, Less, Greater };

struct TestResult {
  double statistic = 0.0;    // U of group a, or the Pearson chi-square
  double p_value = 1.0;
  double effect_size = 0.0;  // r = Z / sqrt(N) for U, signed phi for chi-square
  double z = 0.0;            // normal score behind the U test (0 for exact and chi-square)
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  bool exact = false;
};

/// Standard normal CDF.
double normal_cdf(double z);

/// Mann-Whitney U with midranks. U counts pairs with a > b (ties count 1/2).
/// The p-value uses the normal approximation with tie and continuity
/// correction; two-sided unless `alt` says otherwise. r is negative when
/// group a tends to be smaller. Both groups constant and equal gives p = 1,
/// r = 0. Throws InputError on an empty group.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          Alternative alt = Alternative::TwoSided);

/// Exact permutation p-value of U, enumerated over all rank assignments.
/// Needs tie-free data; throws InputError otherwise or when n_a + n_b > 60.
TestResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b,
                                Alternative alt = Alternative::TwoSided);

/// Pearson chi-square on a 2x2 table without continuity correction
/// (df = 1). Throws DegenerateTable if any row or column sums to zero.
TestResult chi_square_2x2(const std::array<std::array<std::uint64_t, 2>, 2>& table);

/// Kolmogorov-Smirnov distance between the sample and Uniform(0, 1).
double ks_uniform_distance(std::vector<double> values);

}  // namespace sitm
