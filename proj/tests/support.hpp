#pragma once

#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "sitm/error.hpp"
#include "sitm/types.hpp"

namespace sitm::test {

/// Track of n frames at `fps` with every channel zero and confidence 0.9.
inline FrameTrack blank_track(std::size_t n, double fps = kTargetFps) {
  FrameTrack t;
  t.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.timestamps[i] = static_cast<double>(i) / fps;
    t.confidence[i] = 0.9;
  }
  return t;
}

/// Six back-to-back phases of `seconds` each, in canonical order.
inline PhaseMap equal_phases(double seconds) {
  std::array<TimeInterval, kNumPhases> iv{};
  for (std::size_t i = 0; i < kNumPhases; ++i) {
    iv[i] = {static_cast<double>(i) * seconds, static_cast<double>(i + 1) * seconds};
  }
  return PhaseMap(iv);
}

template <typename Fn>
ErrorKind error_kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected sitm::Error");
  return ErrorKind::InputError;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sitm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace sitm::test
