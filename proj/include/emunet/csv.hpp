#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "emunet/domain.hpp"

namespace emunet {

using CsvRows = std::vector<std::vector<std::string>>;

// 17 significant digits: enough to round-trip any double exactly.
std::string format_double(double value);

// Plain comma-separated output, '.' decimal, LF line endings.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const CsvRows& rows);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& rows);

struct Csv {
  std::vector<std::string> header;
  CsvRows rows;

  int column(const std::string& name) const;  // -1 when absent
  // Parses the named columns into a matrix, one row per CSV row.
  Matrix numeric(const std::vector<std::string>& names) const;
  Matrix numeric() const;  // every column
};

Csv read_csv(const std::filesystem::path& path);

}  // namespace emunet
