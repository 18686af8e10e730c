#include "emunet/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "emunet/errors.hpp"

namespace emunet {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const CsvRows& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingArtifactError("cannot open for writing: " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw MissingArtifactError("write failed: " + path.string());
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const CsvRows& rows) {
  write_lines(path, header, rows);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& rows) {
  CsvRows text;
  text.reserve(rows.rows());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    std::vector<std::string> row;
    row.reserve(rows.cols());
    for (Eigen::Index c = 0; c < rows.cols(); ++c) row.push_back(format_double(rows(r, c)));
    text.push_back(std::move(row));
  }
  write_lines(path, header, text);
}

int Csv::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

Matrix Csv::numeric(const std::vector<std::string>& names) const {
  std::vector<int> cols;
  cols.reserve(names.size());
  for (const auto& name : names) {
    const int c = column(name);
    if (c < 0) throw MissingArtifactError("csv column not found: " + name);
    cols.push_back(c);
  }
  Matrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < cols.size(); ++j) {
      try {
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
            std::stod(rows[r].at(cols[j]));
      } catch (const std::exception&) {
        throw MissingArtifactError("csv: non-numeric value in column " + names[j]);
      }
    }
  return out;
}

Matrix Csv::numeric() const { return numeric(header); }

Csv read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open: " + path.string());
  Csv csv;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (first) {
      csv.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != csv.header.size())
        throw MissingArtifactError("csv: ragged row in " + path.string());
      csv.rows.push_back(std::move(fields));
    }
  }
  if (first) throw MissingArtifactError("csv: empty file " + path.string());
  return csv;
}

}  // namespace emunet
