#include "sitm/types.hpp"

#include <algorithm>

#include "sitm/error.hpp"

namespace sitm {

std::string_view to_string(Emotion e) {
  switch (e) {
    case Emotion::Neutral: return "neutral";
    case Emotion::Joy: return "joy";
    case Emotion::Disgust: return "disgust";
  }
  return "?";
}

std::string_view to_string(Role r) { return r == Role::Speaking ? "speaking" : "listening"; }

std::string phase_name(Phase p) {
  return std::string(to_string(p.emotion)) + "_" + std::string(to_string(p.role));
}

std::optional<Phase> parse_phase_name(std::string_view name) {
  for (auto p : kPhases) {
    if (phase_name(p) == name) return p;
  }
  return std::nullopt;
}

PhaseMap::PhaseMap(const std::array<TimeInterval, kNumPhases>& intervals) : intervals_(intervals) {
  for (auto p : kPhases) {
    const auto& iv = intervals_[p.index()];
    if (!(iv.end > iv.start)) {
      throw Error(ErrorKind::ParseError, "phase " + phase_name(p) + " has an empty interval");
    }
  }
  std::array<TimeInterval, kNumPhases> sorted = intervals_;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start < sorted[i - 1].end) {
      throw Error(ErrorKind::ParseError, "phase intervals overlap");
    }
  }
}

std::optional<Phase> PhaseMap::phase_at(double t) const {
  for (auto p : kPhases) {
    if (intervals_[p.index()].contains(t)) return p;
  }
  return std::nullopt;
}

std::string_view to_string(Label l) { return l == Label::ASC ? "ASC" : "non-ASC"; }

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::M: return "M";
    case Gender::F: return "F";
    case Gender::D: return "D";
  }
  return "?";
}

std::string_view to_string(Setting s) { return s == Setting::Lab ? "lab" : "home"; }

std::optional<Label> parse_label(std::string_view s) {
  if (s == "ASC") return Label::ASC;
  if (s == "non-ASC") return Label::NonASC;
  return std::nullopt;
}

std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "M") return Gender::M;
  if (s == "F") return Gender::F;
  if (s == "D") return Gender::D;
  return std::nullopt;
}

std::optional<Setting> parse_setting(std::string_view s) {
  if (s == "lab") return Setting::Lab;
  if (s == "home") return Setting::Home;
  return std::nullopt;
}

void FrameTrack::resize(std::size_t n) {
  timestamps.resize(n);
  confidence.resize(n);
  for (auto& c : au_intensity) c.resize(n);
  for (auto& c : au_presence) c.resize(n);
  pitch.resize(n);
  yaw.resize(n);
  roll.resize(n);
  gaze_x.resize(n);
  gaze_y.resize(n);
  valid.resize(n, 1);
}

void FrameTrack::push_frame(const FrameTrack& o, std::size_t i) {
  timestamps.push_back(o.timestamps[i]);
  confidence.push_back(o.confidence[i]);
  for (std::size_t a = 0; a < kNumAUs; ++a) {
    au_intensity[a].push_back(o.au_intensity[a][i]);
    au_presence[a].push_back(o.au_presence[a][i]);
  }
  pitch.push_back(o.pitch[i]);
  yaw.push_back(o.yaw[i]);
  roll.push_back(o.roll[i]);
  gaze_x.push_back(o.gaze_x[i]);
  gaze_y.push_back(o.gaze_y[i]);
  valid.push_back(o.valid[i]);
}

std::size_t FrameTrack::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

}  // namespace sitm
