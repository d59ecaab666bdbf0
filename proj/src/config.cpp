#include "geomag/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "geomag/errors.hpp"

namespace geomag::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line) + ": expected `key = value`, got '" + body + "'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line) + ": empty key");
    if (value.empty())
      throw ConfigError(source + ":" + std::to_string(line) + ": key '" + key + "' has no value");
    if (cfg.values_.count(key)) {
      throw ConfigError(source + ":" + std::to_string(line) + ": duplicate key '" + key + "' (first at line " +
                        std::to_string(cfg.values_[key].line) + ")");
    }
    cfg.values_[key] = Entry{value, line};
    cfg.ordered_.emplace_back(key, value);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string ExperimentConfig::where(const std::string& key) const {
  auto it = values_.find(key);
  return source_ + ":" + std::to_string(it->second.line) + ": key '" + key + "'";
}

std::string ExperimentConfig::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(source_ + ": missing key '" + key + "'");
  return it->second.value;
}

std::string ExperimentConfig::text_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double ExperimentConfig::number(const std::string& key) const {
  const std::string v = text(key);
  double out = 0.0;
  if (!parse_double(v, out)) throw ConfigError(where(key) + ": '" + v + "' is not a finite number");
  return out;
}

double ExperimentConfig::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long ExperimentConfig::integer(const std::string& key) const {
  const std::string v = text(key);
  char* end = nullptr;
  errno = 0;
  const long out = std::strtol(v.c_str(), &end, 10);
  if (errno != 0 || end != v.c_str() + v.size()) throw ConfigError(where(key) + ": '" + v + "' is not an integer");
  return out;
}

long ExperimentConfig::integer_or(const std::string& key, long fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool ExperimentConfig::flag_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = text(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(where(key) + ": '" + v + "' is not a boolean");
}

std::vector<double> ExperimentConfig::list(const std::string& key) const {
  const std::string v = text(key);
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double x = 0.0;
    if (!parse_double(trim(item), x)) throw ConfigError(where(key) + ": bad list item '" + trim(item) + "'");
    out.push_back(x);
  }
  return out;
}

std::vector<double> ExperimentConfig::list_or(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? list(key) : fallback;
}

void ExperimentConfig::restrict_to(const std::set<std::string>& known) const {
  for (const auto& [key, entry] : values_) {
    if (!known.count(key)) throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": unknown key '" + key + "'");
  }
}

void ExperimentConfig::require(const std::vector<std::string>& keys) const {
  for (const auto& k : keys)
    if (!has(k)) throw ConfigError(source_ + ": missing key '" + k + "'");
}

}  // namespace geomag::io
