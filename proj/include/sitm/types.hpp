#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sitm {

inline constexpr double kTargetFps = 30.0;
inline constexpr double kFrameDt = 1.0 / kTargetFps;

// ---------------------------------------------------------------------------
// Action units (OpenFace 2.2 layout). AU28 has a presence channel only.

inline constexpr std::size_t kNumAUs = 18;
inline constexpr std::array<std::string_view, kNumAUs> kAUNames = {
    "AU01", "AU02", "AU04", "AU05", "AU06", "AU07", "AU09", "AU10", "AU12",
    "AU14", "AU15", "AU17", "AU20", "AU23", "AU25", "AU26", "AU28", "AU45"};

constexpr bool au_has_intensity(std::size_t au) { return kAUNames[au] != "AU28"; }

// ---------------------------------------------------------------------------
// Interaction phases: three emotions x two participant roles.

enum class Emotion : std::uint8_t { Neutral = 0, Joy = 1, Disgust = 2 };
enum class Role : std::uint8_t { Listening = 0, Speaking = 1 };

struct Phase {
  Emotion emotion;
  Role role;

  constexpr std::size_t index() const {
    return static_cast<std::size_t>(emotion) * 2 + static_cast<std::size_t>(role);
  }
  constexpr bool operator==(const Phase&) const = default;
};

inline constexpr std::size_t kNumPhases = 6;
inline constexpr std::array<Phase, kNumPhases> kPhases = {{
    {Emotion::Neutral, Role::Listening},
    {Emotion::Neutral, Role::Speaking},
    {Emotion::Joy, Role::Listening},
    {Emotion::Joy, Role::Speaking},
    {Emotion::Disgust, Role::Listening},
    {Emotion::Disgust, Role::Speaking},
}};

std::string_view to_string(Emotion e);
std::string_view to_string(Role r);
/// "joy_speaking" style name used in feature columns.
std::string phase_name(Phase p);
std::optional<Phase> parse_phase_name(std::string_view name);

struct TimeInterval {
  double start = 0.0;  // inclusive, seconds
  double end = 0.0;    // exclusive, seconds
  bool contains(double t) const { return t >= start && t < end; }
  double duration() const { return end - start; }
};

/// The six phase intervals, indexed by Phase::index().
class PhaseMap {
public:
  /// Validates: all six keys, non-empty, non-overlapping. Throws ParseError.
  explicit PhaseMap(const std::array<TimeInterval, kNumPhases>& intervals);

  const TimeInterval& operator[](Phase p) const { return intervals_[p.index()]; }
  const std::array<TimeInterval, kNumPhases>& intervals() const { return intervals_; }

  /// Phase containing t, if any.
  std::optional<Phase> phase_at(double t) const;

private:
  std::array<TimeInterval, kNumPhases> intervals_;
};

// ---------------------------------------------------------------------------
// Participant metadata.

enum class Label : std::uint8_t { NonASC = 0, ASC = 1 };
enum class Gender : std::uint8_t { M, F, D };
enum class Setting : std::uint8_t { Lab, Home };

std::string_view to_string(Label l);
std::string_view to_string(Gender g);
std::string_view to_string(Setting s);
std::optional<Label> parse_label(std::string_view s);
std::optional<Gender> parse_gender(std::string_view s);
std::optional<Setting> parse_setting(std::string_view s);

struct ParticipantMeta {
  std::string id;
  Label label = Label::NonASC;
  Gender gender = Gender::M;
  Setting setting = Setting::Lab;
  std::optional<int> aq;
};

// ---------------------------------------------------------------------------
// Per-frame behavioural record, struct-of-arrays.

struct FrameTrack {
  std::vector<double> timestamps;  // seconds, strictly increasing
  std::vector<double> confidence;  // [0, 1]
  std::array<std::vector<double>, kNumAUs> au_intensity;         // [0, 5]; NaN when the AU has no intensity
  std::array<std::vector<std::uint8_t>, kNumAUs> au_presence;    // 0/1
  std::vector<double> pitch, yaw, roll;                          // radians
  std::vector<double> gaze_x, gaze_y;                            // radians
  std::vector<std::uint8_t> valid;                               // 0/1

  std::size_t size() const { return timestamps.size(); }
  /// Allocates every channel for n frames (validity defaults to 1).
  void resize(std::size_t n);
  /// Copies frame `src` of `other` onto the end of this track.
  void push_frame(const FrameTrack& other, std::size_t src);
  std::size_t valid_count() const;
};

/// Mean skin-ROI colour per frame.
struct RGBTrace {
  std::vector<double> timestamps;
  std::vector<double> r, g, b;
  std::size_t size() const { return timestamps.size(); }
};

}  // namespace sitm
