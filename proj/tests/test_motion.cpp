#include "support.hpp"

#include <numbers>

#include "sitm/motion.hpp"

using namespace sitm;

namespace {

std::vector<std::uint8_t> all_valid(std::size_t n) { return std::vector<std::uint8_t>(n, 1); }

/// Flat pitch with one raised-cosine dip of `depth_deg` lasting `duration_s`.
std::vector<double> dip(double depth_deg, double duration_s, double lead_s = 1.0, double tail_s = 1.0) {
  std::vector<double> p;
  const double total = lead_s + duration_s + tail_s;
  for (std::size_t i = 0; static_cast<double>(i) * kFrameDt < total; ++i) {
    const double t = static_cast<double>(i) * kFrameDt - lead_s;
    double v = 0.0;
    if (t > 0 && t < duration_s) v = -depth_deg * (1 - std::cos(2 * std::numbers::pi * t / duration_s)) / 2;
    p.push_back(deg_to_rad(v));
  }
  return p;
}

}  // namespace

TEST_CASE("yaw rising 1 degree per frame moves at 30 degrees per second") {
  std::vector<double> yaw(10), zero(10, 0.0);
  for (std::size_t i = 0; i < yaw.size(); ++i) yaw[i] = deg_to_rad(static_cast<double>(i));
  const auto k = angular_kinematics({yaw, zero, zero}, all_valid(10), kFrameDt);
  REQUIRE(k);
  for (double v : k->velocity) CHECK(v == doctest::Approx(0.5236).epsilon(1e-4));
  for (double a : k->acceleration) CHECK(std::abs(a) < 1e-9);
}

TEST_CASE("constant angles do not move") {
  std::vector<double> c(8, 0.2);
  const auto k = angular_kinematics({c, c}, all_valid(8), kFrameDt);
  REQUIRE(k);
  for (double v : k->velocity) CHECK(v == 0.0);
  for (double a : k->acceleration) CHECK(a == 0.0);
}

TEST_CASE("finite differences of 0, 1, 3 degrees") {
  const std::vector<double> yaw = {deg_to_rad(0), deg_to_rad(1), deg_to_rad(3)};
  const auto k = angular_kinematics({yaw}, all_valid(3), kFrameDt);
  REQUIRE(k);
  REQUIRE(k->velocity.size() == 2);
  CHECK(rad_to_deg(k->velocity[0]) == doctest::Approx(30.0));
  CHECK(rad_to_deg(k->velocity[1]) == doctest::Approx(60.0));
  REQUIRE(k->acceleration.size() == 1);
  CHECK(rad_to_deg(k->acceleration[0]) == doctest::Approx(900.0));
}

TEST_CASE("gaps break velocity and acceleration") {
  const std::vector<double> yaw = {0, 1, 2, 3, 4};
  const std::vector<std::uint8_t> valid = {1, 1, 0, 1, 1};
  const auto k = angular_kinematics({yaw}, valid, 1.0);
  REQUIRE(k);
  CHECK(k->velocity[0] == 1.0);
  CHECK(std::isnan(k->velocity[1]));
  CHECK(std::isnan(k->velocity[2]));
  CHECK(std::isnan(k->acceleration[0]));
  CHECK_FALSE(angular_kinematics({yaw}, std::vector<std::uint8_t>{1, 1, 0, 0, 0}, 1.0));
}

TEST_CASE("stability durations") {
  SUBCASE("all still") {
    const std::vector<double> v(90, 0.0);
    const auto d = stability_durations(v, 0.1, kFrameDt);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == doctest::Approx(3.0));
  }
  SUBCASE("all moving") { CHECK(stability_durations(std::vector<double>(20, 1.0), 0.1, kFrameDt).empty()); }
  SUBCASE("alternating over ten samples") {
    std::vector<double> v;
    for (int i = 0; i < 10; ++i) v.push_back(i % 2 == 0 ? 0.0 : 1.0);
    const auto d = stability_durations(v, 0.1, kFrameDt);
    REQUIRE(d.size() == 5);
    for (double x : d) CHECK(x == doctest::Approx(1.0 / 30.0));
  }
}

TEST_CASE("nod detection") {
  const double amp = deg_to_rad(3.0);
  SUBCASE("flat pitch") {
    const std::vector<double> p(120, 0.0);
    CHECK(detect_nods(p, all_valid(p.size()), kFrameDt, 1.5, amp) == 0);
  }
  SUBCASE("5 degree dip over one second") {
    const auto p = dip(5.0, 1.0);
    CHECK(detect_nods(p, all_valid(p.size()), kFrameDt, 1.5, amp) == 1);
  }
  SUBCASE("same dip over two seconds") {
    const auto p = dip(5.0, 2.0);
    CHECK(detect_nods(p, all_valid(p.size()), kFrameDt, 1.5, amp) == 0);
  }
  SUBCASE("2 degree dip is too shallow") {
    const auto p = dip(2.0, 1.0);
    CHECK(detect_nods(p, all_valid(p.size()), kFrameDt, 1.5, amp) == 0);
  }
  SUBCASE("two separate dips") {
    auto p = dip(5.0, 1.0);
    const auto q = dip(5.0, 0.8);
    p.insert(p.end(), q.begin(), q.end());
    CHECK(detect_nods(p, all_valid(p.size()), kFrameDt, 1.5, amp) == 2);
  }
}

TEST_CASE("I-VT on stationary gaze") {
  const std::vector<double> x(60, 0.1), y(60, -0.05);
  const auto ev = fixations_saccades(x, y, all_valid(60), deg_to_rad(30), kFrameDt);
  REQUIRE(ev.fixations.size() == 1);
  CHECK(ev.saccades.empty());
  CHECK(ev.fixations[0].duration == doctest::Approx(59.0 / 30.0));
  CHECK(ev.fixations[0].first_frame == 0);
  CHECK(ev.fixations[0].last_frame == 59);
}

TEST_CASE("I-VT on a 10 degree step") {
  std::vector<double> x(60, 0.0), y(60, 0.0);
  for (std::size_t i = 30; i < 60; ++i) x[i] = deg_to_rad(10.0);
  const auto ev = fixations_saccades(x, y, all_valid(60), deg_to_rad(30), kFrameDt);
  CHECK(ev.fixations.size() == 2);
  REQUIRE(ev.saccades.size() == 1);
  REQUIRE(ev.saccades[0].amplitude);
  CHECK(rad_to_deg(*ev.saccades[0].amplitude) == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(ev.saccades[0].duration == doctest::Approx(1.0 / 30.0));
}

TEST_CASE("I-VT on continuous fast drift") {
  std::vector<double> x(60), y(60, 0.0);
  for (std::size_t i = 0; i < 60; ++i) x[i] = deg_to_rad(2.0 * static_cast<double>(i));
  const auto ev = fixations_saccades(x, y, all_valid(60), deg_to_rad(30), kFrameDt);
  CHECK(ev.fixations.empty());
  REQUIRE(ev.saccades.size() == 1);
  CHECK_FALSE(ev.saccades[0].amplitude);
}

TEST_CASE("median normalisation") {
  const std::vector<double> a = {1, 2, 3};
  CHECK(*median_normalize(a) == std::vector<double>{-1, 0, 1});
  const std::vector<double> c(5, 4.2);
  const auto flat = *median_normalize(c);
  for (double v : flat) CHECK(v == 0.0);
  CHECK_FALSE(median_normalize(std::vector<double>{}));
  std::vector<double> r = {5, -2, 7, 1, 0.5, 9};
  auto n = *median_normalize(r);
  std::sort(n.begin(), n.end());
  CHECK((n[2] + n[3]) / 2 == doctest::Approx(0.0));
}
