#pragma once

#include <array>
#include <optional>
#include <span>

#include "sitm/types.hpp"

namespace sitm {

struct AUStats {
  // NaN for AUs without an intensity channel.
  double mean_intensity = 0.0;
  double median_intensity = 0.0;
  double std_intensity = 0.0;
  double mean_presence = 0.0;
  int onset_frequency = 0;
};

using AUFeatureSlice = std::array<AUStats, kNumAUs>;

/// Statistics over the valid frames of one phase. Onsets are 0->1 transitions
/// of the presence channel after compacting out invalid frames. nullopt when
/// the phase has no valid frame.
std::optional<AUFeatureSlice> au_statistics(const FrameTrack& phase_track);

/// Number of 0->1 transitions in a presence sequence.
int count_onsets(std::span<const std::uint8_t> presence);

}  // namespace sitm
