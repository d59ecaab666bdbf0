#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace geomag::io {

// Flat `key = value` file; `#` starts a comment. Errors are ConfigError with
// the offending line and key.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text, const std::string& source = "<string>");
  static ExperimentConfig load(const std::string& path);

  const std::string& source() const { return source_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string text(const std::string& key) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer_or(const std::string& key, long fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;
  // Comma separated numbers.
  std::vector<double> list(const std::string& key) const;
  std::vector<double> list_or(const std::string& key, const std::vector<double>& fallback) const;

  // Rejects any key outside `known`.
  void restrict_to(const std::set<std::string>& known) const;
  void require(const std::vector<std::string>& keys) const;

  // Entries in file order, for echoing into summaries.
  const std::vector<std::pair<std::string, std::string>>& entries() const { return ordered_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string where(const std::string& key) const;

  std::string source_;
  std::map<std::string, Entry> values_;
  std::vector<std::pair<std::string, std::string>> ordered_;
};

}  // namespace geomag::io
