#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace folio::data {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based source line of each row, for error context.
  std::vector<std::size_t> lines;
};

/// Reads a comma-separated file with a header row. Double-quoted fields may
/// contain commas; embedded newlines are not supported.
CsvTable read_csv(const std::filesystem::path& path);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace folio::data
