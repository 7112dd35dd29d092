#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace relbelief::cli {

/// Formats a double with 12 significant digits; the same value always
/// prints the same way.
std::string fmt(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace relbelief::cli
