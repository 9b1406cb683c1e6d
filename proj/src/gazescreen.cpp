#include "sitm/gazescreen.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "sitm/error.hpp"
#include "sitm/stats.hpp"

namespace sitm {

Rect ScreenGeometry::screen_rect() const {
  return {-screen_size_mm.x / 2.0, -screen_size_mm.y / 2.0, screen_size_mm.x / 2.0, screen_size_mm.y / 2.0};
}

Rect ScreenGeometry::pixels_to_mm(const Rect& px) const {
  const double pitch_x = screen_size_mm.x / resolution_px[0];
  const double pitch_y = screen_size_mm.y / resolution_px[1];
  auto to_mm_x = [&](double u) { return u * pitch_x - screen_size_mm.x / 2.0; };
  auto to_mm_y = [&](double v) { return screen_size_mm.y / 2.0 - v * pitch_y; };
  return {std::min(to_mm_x(px.x0), to_mm_x(px.x1)), std::min(to_mm_y(px.y0), to_mm_y(px.y1)),
          std::max(to_mm_x(px.x0), to_mm_x(px.x1)), std::max(to_mm_y(px.y0), to_mm_y(px.y1))};
}

void ScreenGeometry::validate() const {
  if (!(eye_to_screen_mm > 0.0)) throw Error(ErrorKind::ConfigError, "screen.eye_to_screen_mm must be positive");
  if (!(screen_size_mm.x > 0.0 && screen_size_mm.y > 0.0)) {
    throw Error(ErrorKind::ConfigError, "screen.size_mm must be positive");
  }
  if (resolution_px[0] <= 0 || resolution_px[1] <= 0) {
    throw Error(ErrorKind::ConfigError, "screen.resolution_px must be positive");
  }
  if (!(face_region_mm.x1 > face_region_mm.x0 && face_region_mm.y1 > face_region_mm.y0)) {
    throw Error(ErrorKind::ConfigError, "screen.face_region_mm is empty");
  }
  if (!screen_rect().contains(face_region_mm)) {
    throw Error(ErrorKind::ConfigError, "screen.face_region_mm must lie inside the screen");
  }
}

std::optional<Vec2> try_project_gaze(double angle_x, double angle_y, const ScreenGeometry& geom) {
  const double ax = angle_x * geom.gaze_sign.x;
  const double ay = angle_y * geom.gaze_sign.y;
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (!(std::abs(ax) < half_pi) || !(std::abs(ay) < half_pi)) return std::nullopt;
  return Vec2{geom.camera_offset_mm.x + geom.eye_to_screen_mm * std::tan(ax),
              geom.camera_offset_mm.y + geom.eye_to_screen_mm * std::tan(ay)};
}

Vec2 project_gaze(double angle_x, double angle_y, const ScreenGeometry& geom) {
  if (auto p = try_project_gaze(angle_x, angle_y, geom)) return *p;
  throw Error(ErrorKind::ProjectionUndefined, "gaze angle at or beyond pi/2 has no screen intersection");
}

std::optional<GazeScreenStats> screen_descriptors(std::span<const Vec2> points, std::span<const std::uint8_t> valid,
                                                  const ScreenGeometry& geom, std::span<const Fixation> fixations) {
  std::vector<double> distances;
  std::size_t on_face = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!valid[i]) continue;
    distances.push_back(std::hypot(points[i].x, points[i].y));
    if (geom.face_region_mm.contains(points[i])) ++on_face;
  }
  if (distances.empty()) return std::nullopt;

  GazeScreenStats s;
  s.screen_fixation_time = static_cast<double>(on_face) / static_cast<double>(distances.size());
  const Rect screen = geom.screen_rect();
  for (const auto& f : fixations) {
    double sx = 0.0, sy = 0.0;
    std::size_t count = 0;
    for (std::size_t i = f.first_frame; i <= f.last_frame && i < points.size(); ++i) {
      if (!valid[i]) continue;
      sx += points[i].x;
      sy += points[i].y;
      ++count;
    }
    if (count == 0) continue;
    const Vec2 centroid{sx / static_cast<double>(count), sy / static_cast<double>(count)};
    if (!screen.contains(centroid)) ++s.offscreen_fixation_count;
  }
  s.distance_mean = stats::mean(distances);
  s.distance_std = stats::population_std(distances);
  s.distance_skewness = stats::skewness(distances);
  s.distance_kurtosis = stats::excess_kurtosis(distances);
  s.distance_min = stats::min(distances);
  s.distance_max = stats::max(distances);
  return s;
}

}  // namespace sitm
