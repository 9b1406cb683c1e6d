#include "sitm/audiofeat.hpp"

#include <set>

#include "sitm/csv.hpp"
#include "sitm/error.hpp"

namespace sitm {
namespace {

constexpr std::array<std::string_view, 88> kEgemaps = {
    "F0semitoneFrom27.5Hz_sma3nz_amean",
    "F0semitoneFrom27.5Hz_sma3nz_stddevNorm",
    "F0semitoneFrom27.5Hz_sma3nz_percentile20.0",
    "F0semitoneFrom27.5Hz_sma3nz_percentile50.0",
    "F0semitoneFrom27.5Hz_sma3nz_percentile80.0",
    "F0semitoneFrom27.5Hz_sma3nz_pctlrange0-2",
    "F0semitoneFrom27.5Hz_sma3nz_meanRisingSlope",
    "F0semitoneFrom27.5Hz_sma3nz_stddevRisingSlope",
    "F0semitoneFrom27.5Hz_sma3nz_meanFallingSlope",
    "F0semitoneFrom27.5Hz_sma3nz_stddevFallingSlope",
    "loudness_sma3_amean",
    "loudness_sma3_stddevNorm",
    "loudness_sma3_percentile20.0",
    "loudness_sma3_percentile50.0",
    "loudness_sma3_percentile80.0",
    "loudness_sma3_pctlrange0-2",
    "loudness_sma3_meanRisingSlope",
    "loudness_sma3_stddevRisingSlope",
    "loudness_sma3_meanFallingSlope",
    "loudness_sma3_stddevFallingSlope",
    "spectralFlux_sma3_amean",
    "spectralFlux_sma3_stddevNorm",
    "mfcc1_sma3_amean",
    "mfcc1_sma3_stddevNorm",
    "mfcc2_sma3_amean",
    "mfcc2_sma3_stddevNorm",
    "mfcc3_sma3_amean",
    "mfcc3_sma3_stddevNorm",
    "mfcc4_sma3_amean",
    "mfcc4_sma3_stddevNorm",
    "jitterLocal_sma3nz_amean",
    "jitterLocal_sma3nz_stddevNorm",
    "shimmerLocaldB_sma3nz_amean",
    "shimmerLocaldB_sma3nz_stddevNorm",
    "HNRdBACF_sma3nz_amean",
    "HNRdBACF_sma3nz_stddevNorm",
    "logRelF0-H1-H2_sma3nz_amean",
    "logRelF0-H1-H2_sma3nz_stddevNorm",
    "logRelF0-H1-A3_sma3nz_amean",
    "logRelF0-H1-A3_sma3nz_stddevNorm",
    "F1frequency_sma3nz_amean",
    "F1frequency_sma3nz_stddevNorm",
    "F1bandwidth_sma3nz_amean",
    "F1bandwidth_sma3nz_stddevNorm",
    "F1amplitudeLogRelF0_sma3nz_amean",
    "F1amplitudeLogRelF0_sma3nz_stddevNorm",
    "F2frequency_sma3nz_amean",
    "F2frequency_sma3nz_stddevNorm",
    "F2bandwidth_sma3nz_amean",
    "F2bandwidth_sma3nz_stddevNorm",
    "F2amplitudeLogRelF0_sma3nz_amean",
    "F2amplitudeLogRelF0_sma3nz_stddevNorm",
    "F3frequency_sma3nz_amean",
    "F3frequency_sma3nz_stddevNorm",
    "F3bandwidth_sma3nz_amean",
    "F3bandwidth_sma3nz_stddevNorm",
    "F3amplitudeLogRelF0_sma3nz_amean",
    "F3amplitudeLogRelF0_sma3nz_stddevNorm",
    "alphaRatioV_sma3nz_amean",
    "alphaRatioV_sma3nz_stddevNorm",
    "hammarbergIndexV_sma3nz_amean",
    "hammarbergIndexV_sma3nz_stddevNorm",
    "slopeV0-500_sma3nz_amean",
    "slopeV0-500_sma3nz_stddevNorm",
    "slopeV500-1500_sma3nz_amean",
    "slopeV500-1500_sma3nz_stddevNorm",
    "spectralFluxV_sma3nz_amean",
    "spectralFluxV_sma3nz_stddevNorm",
    "mfcc1V_sma3nz_amean",
    "mfcc1V_sma3nz_stddevNorm",
    "mfcc2V_sma3nz_amean",
    "mfcc2V_sma3nz_stddevNorm",
    "mfcc3V_sma3nz_amean",
    "mfcc3V_sma3nz_stddevNorm",
    "mfcc4V_sma3nz_amean",
    "mfcc4V_sma3nz_stddevNorm",
    "alphaRatioUV_sma3nz_amean",
    "hammarbergIndexUV_sma3nz_amean",
    "slopeUV0-500_sma3nz_amean",
    "slopeUV500-1500_sma3nz_amean",
    "spectralFluxUV_sma3nz_amean",
    "loudnessPeaksPerSec",
    "VoicedSegmentsPerSec",
    "MeanVoicedSegmentLengthSec",
    "StddevVoicedSegmentLengthSec",
    "MeanUnvoicedSegmentLength",
    "StddevUnvoicedSegmentLength",
    "equivalentSoundLevel_dBp",
};

bool must_be_nonnegative(std::string_view name) {
  return name.starts_with("jitterLocal") || name.starts_with("shimmerLocal");
}

}  // namespace

std::span<const std::string_view> egemaps_v02_functionals() { return kEgemaps; }

ProsodyFeatureSet load_prosody(const std::filesystem::path& path) {
  return parse_prosody(read_file(path), path.string());
}

ProsodyFeatureSet parse_prosody(std::string text, const std::string& source) {
  auto table = CsvTable::parse(std::move(text), source);
  const auto& header = table.header();
  if (header.empty() || header[0] != "phase") {
    throw Error(ErrorKind::SchemaError, source + ": first column must be 'phase'");
  }
  if (header.size() < 2) throw Error(ErrorKind::SchemaError, source + ": no functional columns");

  ProsodyFeatureSet set;
  std::set<std::string_view> seen_names;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (!seen_names.insert(header[c]).second) {
      throw Error(ErrorKind::SchemaError, source + ": duplicate functional '" + std::string(header[c]) + "'");
    }
    set.names.emplace_back(header[c]);
  }
  if (table.rows() != 3) {
    throw Error(ErrorKind::SchemaError,
                source + ": expected 3 speaking-phase rows, found " + std::to_string(table.rows()));
  }

  std::array<bool, 3> filled{};
  for (std::size_t r = 0; r < table.rows(); ++r) {
    auto phase = parse_phase_name(table.cell(r, 0));
    if (!phase) {
      throw Error(ErrorKind::SchemaError, table.where(r, 0) + ": unknown phase '" + std::string(table.cell(r, 0)) + "'");
    }
    if (phase->role != Role::Speaking) {
      throw Error(ErrorKind::SchemaError,
                  table.where(r, 0) + ": audio functionals are only defined for speaking phases");
    }
    auto e = static_cast<std::size_t>(phase->emotion);
    if (filled[e]) throw Error(ErrorKind::SchemaError, table.where(r, 0) + ": duplicate phase row");
    filled[e] = true;
    auto& row = set.values[e];
    row.reserve(set.names.size());
    for (std::size_t c = 1; c < header.size(); ++c) {
      const double v = table.number(r, c);
      if (v < 0.0 && must_be_nonnegative(set.names[c - 1])) {
        throw Error(ErrorKind::SchemaError, table.where(r, c) + ": jitter/shimmer must be non-negative");
      }
      row.push_back(v);
    }
  }
  return set;
}

std::string format_prosody(const ProsodyFeatureSet& set) {
  std::string out = "phase";
  for (const auto& n : set.names) {
    out += ',';
    out += n;
  }
  out += '\n';
  for (auto emotion : {Emotion::Neutral, Emotion::Joy, Emotion::Disgust}) {
    out += phase_name({emotion, Role::Speaking});
    for (double v : set.values[static_cast<std::size_t>(emotion)]) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace sitm
