#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "sitm/motion.hpp"

namespace sitm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned rectangle [x0, x1] x [y0, y1] in screen millimetres.
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  bool contains(const Rect& r) const { return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1; }
  Vec2 center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }
};

/// Screen coordinates are millimetres relative to the screen centre,
/// +x to the viewer's right, +y up.
struct ScreenGeometry {
  double eye_to_screen_mm = 600.0;
  Vec2 camera_offset_mm{0.0, 170.0};
  Vec2 screen_size_mm{344.0, 194.0};
  std::array<int, 2> resolution_px{1920, 1080};
  Rect face_region_mm{-344.0 / 6.0, -194.0 / 6.0, 344.0 / 6.0, 194.0 / 6.0};
  /// Multiplies incoming gaze angles before projection; raw OpenFace angles
  /// (x positive to the viewer's left, y positive downward) need {-1, -1}.
  Vec2 gaze_sign{1.0, 1.0};

  Rect screen_rect() const;
  /// Converts a pixel rectangle (origin top-left, y down) to screen mm.
  Rect pixels_to_mm(const Rect& px) const;
  /// Throws ConfigError on a non-positive distance/size or a face region outside the screen.
  void validate() const;
};

/// Intersects the gaze ray from the eye (on the camera axis, eye_to_screen
/// away) with the screen plane: camera_offset + eye_to_screen * (tan x, tan y).
/// Throws ProjectionUndefined when |angle| >= pi/2 on either axis.
Vec2 project_gaze(double angle_x, double angle_y, const ScreenGeometry& geom);
std::optional<Vec2> try_project_gaze(double angle_x, double angle_y, const ScreenGeometry& geom);

struct GazeScreenStats {
  double screen_fixation_time = 0.0;  // fraction of valid frames on the face region
  int offscreen_fixation_count = 0;
  double distance_mean = 0.0;
  double distance_std = 0.0;
  double distance_skewness = 0.0;
  double distance_kurtosis = 0.0;
  double distance_min = 0.0;
  double distance_max = 0.0;
};

/// Descriptors over projected points. `valid` flags frames with a usable
/// projection; a fixation counts as off-screen when the centroid of its valid
/// projected points lies outside the screen rectangle. nullopt without any
/// valid frame.
std::optional<GazeScreenStats> screen_descriptors(std::span<const Vec2> points, std::span<const std::uint8_t> valid,
                                                  const ScreenGeometry& geom, std::span<const Fixation> fixations);

}  // namespace sitm
