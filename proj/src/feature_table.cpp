#include "sitm/feature_table.hpp"

#include <algorithm>
#include <cstring>
#include <set>

#include "sitm/csv.hpp"
#include "sitm/error.hpp"
#include "sitm/stats.hpp"

namespace sitm {

Matrix Matrix::select_columns(std::span<const std::size_t> columns) const {
  Matrix out(rows_, columns.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = 0; k < columns.size(); ++k) out(r, k) = (*this)(r, columns[k]);
  }
  return out;
}

bool Matrix::operator==(const Matrix& o) const {
  // Bitwise, so NaN cells compare equal to NaN cells.
  return rows_ == o.rows_ && cols_ == o.cols_ &&
         std::memcmp(data_.data(), o.data_.data(), data_.size() * sizeof(double)) == 0;
}

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::Face: return "face";
    case Modality::Audio: return "audio";
    case Modality::Gaze: return "gaze";
    case Modality::Head: return "head";
    case Modality::HR: return "hr";
  }
  return "?";
}

std::optional<Modality> parse_modality(std::string_view s) {
  for (auto m : kModalities) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::string_view namespace_of(std::string_view column) { return column.substr(0, column.find('/')); }

std::optional<Modality> modality_of(std::string_view column) {
  const auto ns = namespace_of(column);
  if (ns == "gaze_screen") return Modality::Gaze;
  return parse_modality(ns);
}

FusedFeatures early_fusion(const std::vector<FeatureBlock>& blocks) {
  FusedFeatures out;
  if (blocks.empty()) return out;
  const std::size_t rows = blocks.front().values.rows();
  std::vector<const FeatureBlock*> ordered;
  for (auto ns : kFeatureNamespaces) {
    for (const auto& b : blocks) {
      if (b.ns == ns) ordered.push_back(&b);
    }
  }
  if (ordered.size() != blocks.size()) throw Error(ErrorKind::InputError, "feature block with unknown namespace");

  std::size_t width = 0;
  for (const auto* b : ordered) {
    if (b->values.rows() != rows) throw Error(ErrorKind::InputError, "feature blocks are not row-aligned");
    if (b->values.cols() != b->names.size()) throw Error(ErrorKind::InputError, "block width/name mismatch");
    width += b->names.size();
  }
  out.values = Matrix(rows, width);
  std::set<std::string> seen;
  std::size_t col = 0;
  for (const auto* b : ordered) {
    for (std::size_t k = 0; k < b->names.size(); ++k, ++col) {
      auto name = b->ns + "/" + b->names[k];
      if (!seen.insert(name).second) throw Error(ErrorKind::InputError, "duplicate feature name " + name);
      out.names.push_back(std::move(name));
      for (std::size_t r = 0; r < rows; ++r) out.values(r, col) = b->values(r, k);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> FeatureTable::labels() const {
  std::vector<std::uint8_t> y;
  y.reserve(meta.size());
  for (const auto& m : meta) y.push_back(m.label == Label::ASC ? 1 : 0);
  return y;
}

std::vector<std::size_t> FeatureTable::columns_of(Modality m) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (modality_of(columns[c]) == m) out.push_back(c);
  }
  return out;
}

std::optional<std::size_t> FeatureTable::find_column(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return c;
  }
  return std::nullopt;
}

std::string format_features_csv(const FeatureTable& table) {
  std::string out = "id,label,gender,setting,aq";
  for (const auto& c : table.columns) out += "," + c;
  out += '\n';
  for (std::size_t r = 0; r < table.meta.size(); ++r) {
    const auto& m = table.meta[r];
    out += m.id + "," + std::string(to_string(m.label)) + "," + std::string(to_string(m.gender)) + "," +
           std::string(to_string(m.setting)) + "," + (m.aq ? std::to_string(*m.aq) : std::string());
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out += ',';
      out += format_double(table.values(r, c));
    }
    out += '\n';
  }
  return out;
}

FeatureTable parse_features_csv(std::string text, const std::string& source) {
  auto csv = CsvTable::parse(std::move(text), source);
  static constexpr std::array<std::string_view, 5> kMetaColumns = {"id", "label", "gender", "setting", "aq"};
  for (std::size_t i = 0; i < kMetaColumns.size(); ++i) {
    if (csv.header().size() <= i || csv.header()[i] != kMetaColumns[i]) {
      throw Error(ErrorKind::ParseError, source + ": header must start with id,label,gender,setting,aq");
    }
  }
  FeatureTable table;
  for (std::size_t c = kMetaColumns.size(); c < csv.header().size(); ++c) {
    std::string name(csv.header()[c]);
    if (!modality_of(name)) throw Error(ErrorKind::ParseError, source + ": unknown feature namespace in '" + name + "'");
    table.columns.push_back(std::move(name));
  }
  table.values = Matrix(csv.rows(), table.columns.size());
  std::set<std::string, std::less<>> ids;
  for (std::size_t r = 0; r < csv.rows(); ++r) {
    ParticipantMeta m;
    m.id = std::string(csv.cell(r, 0));
    if (!ids.insert(m.id).second) throw Error(ErrorKind::DuplicateParticipant, csv.where(r, 0) + ": duplicate id");
    auto label = parse_label(csv.cell(r, 1));
    auto gender = parse_gender(csv.cell(r, 2));
    auto setting = parse_setting(csv.cell(r, 3));
    if (!label) throw Error(ErrorKind::ParseError, csv.where(r, 1) + ": unknown label");
    if (!gender) throw Error(ErrorKind::ParseError, csv.where(r, 2) + ": unknown gender");
    if (!setting) throw Error(ErrorKind::ParseError, csv.where(r, 3) + ": unknown setting");
    m.label = *label;
    m.gender = *gender;
    m.setting = *setting;
    if (auto aq = csv.optional_number(r, 4)) m.aq = static_cast<int>(*aq);
    table.meta.push_back(std::move(m));
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      table.values(r, c) = csv.optional_number(r, c + kMetaColumns.size()).value_or(kMissing);
    }
  }
  return table;
}

FeatureTable read_features_csv(const std::filesystem::path& path) {
  return parse_features_csv(read_file(path), path.string());
}

// ---------------------------------------------------------------------------

Imputation fit_imputation(const Matrix& x, std::span<const std::size_t> train_rows) {
  Imputation imp;
  imp.medians.resize(x.cols());
  std::vector<double> values;
  values.reserve(train_rows.size());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    values.clear();
    for (auto r : train_rows) {
      if (!is_missing(x(r, c))) values.push_back(x(r, c));
    }
    if (values.empty()) {
      imp.medians[c] = kMissing;
      imp.dropped.push_back(c);
    } else {
      imp.medians[c] = stats::median(values);
    }
  }
  return imp;
}

void apply_imputation(Matrix& x, const Imputation& imputation, std::span<const std::size_t> rows) {
  for (auto r : rows) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (is_missing(x(r, c))) x(r, c) = imputation.medians[c];
    }
  }
}

Matrix impute_from_training(const Matrix& x, std::span<const std::size_t> train_rows,
                            std::span<const std::size_t> test_rows) {
  Matrix out = x;
  const auto imp = fit_imputation(x, train_rows);
  apply_imputation(out, imp, train_rows);
  apply_imputation(out, imp, test_rows);
  return out;
}

}  // namespace sitm
