#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sitm {

/// Comma-separated table held as views into one owned buffer.
/// Cells are whitespace-trimmed; no quoting support (none of our formats need it).
class CsvTable {
public:
  static CsvTable parse(std::string text, std::string source);
  static CsvTable read(const std::filesystem::path& path);

  CsvTable(CsvTable&&) noexcept = default;
  CsvTable& operator=(CsvTable&&) noexcept = default;

  const std::vector<std::string_view>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::string_view cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  const std::string& source() const { return source_; }

  std::optional<std::size_t> find_column(std::string_view name) const;
  /// Throws ParseError naming the missing column.
  std::size_t column(std::string_view name) const;

  /// Parses a finite double; throws ParseError with file/line/column coordinates.
  double number(std::size_t row, std::size_t col) const;
  /// Empty cell maps to nullopt; anything else must be a finite double.
  std::optional<double> optional_number(std::size_t row, std::size_t col) const;

  /// "file:line N, column 'name'" for error messages.
  std::string where(std::size_t row, std::size_t col) const;

private:
  CsvTable() = default;

  std::string source_;
  std::unique_ptr<std::string> text_;
  std::vector<std::string_view> header_;
  std::vector<std::vector<std::string_view>> rows_;
};

/// Parses a double from the whole view; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

/// Shortest representation that round-trips exactly; NaN becomes an empty cell.
std::string format_double(double value);

/// Compact fixed-significance output for bulk per-frame data.
std::string format_sig(double value, int significant_digits);

std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling then renames, so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace sitm
