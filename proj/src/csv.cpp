#include "geomag/csv.hpp"

#include <cmath>
#include <cstdio>

#include "geomag/errors.hpp"

namespace geomag::io {

std::string format_number(double v) {
  if (!std::isfinite(v)) throw InvariantError("csv: refusing to write a non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()), out_(path) {
  if (!out_) throw ArgumentError("csv: cannot open " + path + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw ArgumentError("csv: row width does not match the header of " + path_);
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_number(values[i]);
  }
  out_ << line << '\n';
}

}  // namespace geomag::io
