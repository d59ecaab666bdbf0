#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace geomag::io {

// 17 significant digits in scientific notation; throws on NaN or infinity.
std::string format_number(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::size_t columns_;
  std::ofstream out_;
};

}  // namespace geomag::io
