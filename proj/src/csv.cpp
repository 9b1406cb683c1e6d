#include "sitm/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "sitm/error.hpp"

namespace sitm {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

}  // namespace

CsvTable CsvTable::parse(std::string text, std::string source) {
  CsvTable table;
  table.source_ = std::move(source);
  table.text_ = std::make_unique<std::string>(std::move(text));
  std::string_view all(*table.text_);

  std::size_t line_no = 0;
  bool have_header = false;
  while (!all.empty()) {
    auto nl = all.find('\n');
    std::string_view line = all.substr(0, nl);
    all = nl == std::string_view::npos ? std::string_view{} : all.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (!have_header) {
      table.header_ = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header_.size()) {
      throw Error(ErrorKind::ParseError, table.source_ + ": line " + std::to_string(line_no) + " has " +
                                             std::to_string(cells.size()) + " cells, header has " +
                                             std::to_string(table.header_.size()));
    }
    table.rows_.push_back(std::move(cells));
  }
  if (!have_header) throw Error(ErrorKind::ParseError, table.source_ + ": empty file");
  return table;
}

CsvTable CsvTable::read(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

std::optional<std::size_t> CsvTable::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvTable::column(std::string_view name) const {
  if (auto c = find_column(name)) return *c;
  throw Error(ErrorKind::ParseError, source_ + ": missing column '" + std::string(name) + "'");
}

std::string CsvTable::where(std::size_t row, std::size_t col) const {
  // Data row 0 is line 2 when there are no blank lines.
  return source_ + ": row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1) + " ('" +
         std::string(header_[col]) + "')";
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  auto v = parse_double(rows_[row][col]);
  if (!v || !std::isfinite(*v)) {
    throw Error(ErrorKind::ParseError,
                where(row, col) + ": expected a finite number, got '" + std::string(rows_[row][col]) + "'");
  }
  return *v;
}

std::optional<double> CsvTable::optional_number(std::size_t row, std::size_t col) const {
  if (rows_[row][col].empty()) return std::nullopt;
  return number(row, col);
}

std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string format_double(double value) {
  if (std::isnan(value)) return {};
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_sig(double value, int significant_digits) {
  if (std::isnan(value)) return {};
  std::array<char, 48> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general,
                                 significant_digits);
  return std::string(buf.data(), ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IOError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IOError, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::IOError, "write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IOError, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace sitm
