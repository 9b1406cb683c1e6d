#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sitm/types.hpp"

namespace sitm {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Dense row-major matrix; NaN marks a missing value.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = kMissing) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Matrix select_columns(std::span<const std::size_t> columns) const;

  bool operator==(const Matrix& o) const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Feature namespaces and classification modalities.

/// Column namespaces in early-fusion order.
inline constexpr std::array<std::string_view, 6> kFeatureNamespaces = {"face", "audio", "gaze", "gaze_screen",
                                                                        "head", "hr"};

/// Unimodal classifiers. Gaze covers both the angle-based `gaze/` and the
/// screen-based `gaze_screen/` columns.
enum class Modality : std::uint8_t { Face, Audio, Gaze, Head, HR };
inline constexpr std::array<Modality, 5> kModalities = {Modality::Face, Modality::Audio, Modality::Gaze,
                                                        Modality::Head, Modality::HR};

std::string_view to_string(Modality m);
std::optional<Modality> parse_modality(std::string_view s);
/// Namespace prefix of a column name ("gaze_screen/joy_listening/distance_std" -> "gaze_screen").
std::string_view namespace_of(std::string_view column);
std::optional<Modality> modality_of(std::string_view column);

struct FeatureBlock {
  std::string ns;                  // one of kFeatureNamespaces
  std::vector<std::string> names;  // without the namespace prefix
  Matrix values;                   // participants x names
};

struct FusedFeatures {
  std::vector<std::string> names;  // "ns/name"
  Matrix values;
};

/// Column-wise concatenation in kFeatureNamespaces order with namespaced
/// names. Throws InputError on row-count mismatch, unknown namespace, or a
/// duplicate namespaced name.
FusedFeatures early_fusion(const std::vector<FeatureBlock>& blocks);

// ---------------------------------------------------------------------------

struct FeatureTable {
  std::vector<ParticipantMeta> meta;
  std::vector<std::string> columns;
  Matrix values;

  std::vector<std::uint8_t> labels() const;
  std::vector<std::size_t> columns_of(Modality m) const;
  std::optional<std::size_t> find_column(std::string_view name) const;
};

/// `id,label,gender,setting,aq,<features...>`; missing cells empty.
std::string format_features_csv(const FeatureTable& table);
FeatureTable parse_features_csv(std::string text, const std::string& source);
FeatureTable read_features_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Fold-scoped median imputation.

struct Imputation {
  std::vector<double> medians;       // NaN where a column has no training value
  std::vector<std::size_t> dropped;  // those columns
};

/// Medians of every column over `train_rows` only.
Imputation fit_imputation(const Matrix& x, std::span<const std::size_t> train_rows);

/// Replaces missing values in `rows` with the fitted medians (dropped columns stay missing).
void apply_imputation(Matrix& x, const Imputation& imputation, std::span<const std::size_t> rows);

/// Copy of x with missing values in train and test rows filled from training medians.
Matrix impute_from_training(const Matrix& x, std::span<const std::size_t> train_rows,
                            std::span<const std::size_t> test_rows);

}  // namespace sitm
