#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace blowup::cli {

/// Bad flags, missing files and other invocation mistakes (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest text that reads back to the same double; empty for NaN.
std::string num(double v);

/// Accumulates a CSV document.
class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  /// Row whose cells are already formatted.
  void text_row(const std::vector<std::string>& cells);

  [[nodiscard]] const std::string& str() const noexcept { return text_; }

 private:
  std::string text_;
};

/// One output file of a command.
struct Artifact {
  std::string name;  // file name inside --out
  std::string content;

  [[nodiscard]] bool is_json() const;
};

void write_artifact(const std::filesystem::path& dir, const Artifact& a);

/// Reads a CSV with a header row. Returns the column named `column`
/// (or the second column when empty) and the first column as times.
struct Series {
  std::vector<double> times;
  std::vector<double> values;
  std::string column;
};
Series read_series(const std::filesystem::path& path, const std::string& column);

}  // namespace blowup::cli
