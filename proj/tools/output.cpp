#include "output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup::cli {

std::string num(double v) {
  if (std::isnan(v)) return {};
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

Csv::Csv(const std::vector<std::string>& header) { text_row(header); }

void Csv::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(num(v));
  text_row(cells);
}

void Csv::text_row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i != 0) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

bool Artifact::is_json() const {
  return name.size() >= 5 && name.compare(name.size() - 5, 5, ".json") == 0;
}

void write_artifact(const std::filesystem::path& dir, const Artifact& a) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream f(dir / a.name, std::ios::binary);
  if (!f) throw UsageError("cannot write " + (dir / a.name).string());
  f << a.content;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
      cell.pop_back();
    }
    cells.push_back(cell);
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  const auto res = std::from_chars(cell.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw DomainError("line " + std::to_string(line) + ": '" + cell +
                      "' is not a number");
  }
  return v;
}

}  // namespace

Series read_series(const std::filesystem::path& path, const std::string& column) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line)) {
    throw InsufficientDataError(path.string() + ": empty file");
  }
  const std::vector<std::string> header = split(line);
  if (header.size() < 2) {
    throw UsageError(path.string() + ": need a time column and a value column");
  }
  std::size_t col = 1;
  if (!column.empty()) {
    col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == column) col = i;
    }
    if (col == header.size()) {
      throw UsageError(path.string() + ": no column named '" + column + "'");
    }
  }
  Series s;
  s.column = header[col];
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() <= col) {
      throw DomainError(path.string() + ": line " + std::to_string(line_no) +
                        " has too few columns");
    }
    s.times.push_back(parse_cell(cells[0], line_no));
    s.values.push_back(parse_cell(cells[col], line_no));
  }
  return s;
}

}  // namespace blowup::cli
