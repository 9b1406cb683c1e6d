#include "sitm/face.hpp"

#include <limits>
#include <vector>

#include "sitm/stats.hpp"

namespace sitm {

int count_onsets(std::span<const std::uint8_t> presence) {
  int onsets = 0;
  for (std::size_t i = 1; i < presence.size(); ++i) {
    if (presence[i - 1] == 0 && presence[i] == 1) ++onsets;
  }
  return onsets;
}

std::optional<AUFeatureSlice> au_statistics(const FrameTrack& phase_track) {
  std::vector<std::size_t> frames;
  for (std::size_t i = 0; i < phase_track.size(); ++i) {
    if (phase_track.valid[i]) frames.push_back(i);
  }
  if (frames.empty()) return std::nullopt;

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  AUFeatureSlice out{};
  std::vector<double> intensity(frames.size());
  std::vector<std::uint8_t> presence(frames.size());
  for (std::size_t a = 0; a < kNumAUs; ++a) {
    double present = 0.0;
    for (std::size_t k = 0; k < frames.size(); ++k) {
      intensity[k] = phase_track.au_intensity[a][frames[k]];
      presence[k] = phase_track.au_presence[a][frames[k]];
      present += presence[k];
    }
    auto& s = out[a];
    if (au_has_intensity(a)) {
      s.mean_intensity = stats::mean(intensity);
      s.median_intensity = stats::median(intensity);
      s.std_intensity = stats::population_std(intensity);
    } else {
      s.mean_intensity = s.median_intensity = s.std_intensity = nan;
    }
    s.mean_presence = present / static_cast<double>(frames.size());
    s.onset_frequency = count_onsets(presence);
  }
  return out;
}

}  // namespace sitm
