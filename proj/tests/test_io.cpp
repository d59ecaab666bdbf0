#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "geomag/config.hpp"
#include "geomag/csv.hpp"
#include "geomag/errors.hpp"

using geomag::ConfigError;
using geomag::io::ExperimentConfig;

namespace {

std::string error_of(const std::string& text, const std::string& op = "") {
  try {
    const auto cfg = ExperimentConfig::parse(text, "t.cfg");
    if (op == "number") cfg.number("k");
    if (op == "integer") cfg.integer("n");
    if (op == "list") cfg.list("ks");
    if (op == "flag") cfg.flag_or("f", false);
    if (op == "restrict") cfg.restrict_to({"k"});
    if (op == "require") cfg.require({"k", "delta"});
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = ExperimentConfig::parse("# header\nexperiment = slab\n\nk = 1.5  # inline\nks = 1, 2.5,3\nn = 12\nf = yes\n");
  CHECK(cfg.text("experiment") == "slab");
  CHECK(cfg.number("k") == 1.5);
  CHECK(cfg.list("ks") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(cfg.integer("n") == 12);
  CHECK(cfg.flag_or("f", false));
  CHECK(cfg.number_or("missing", 7.0) == 7.0);
  REQUIRE(cfg.entries().size() == 5);
  CHECK(cfg.entries()[1].first == "k");
}

TEST_CASE("config diagnostics carry line and key") {
  CHECK(error_of("a = 1\nthis line is wrong\n").find("t.cfg:2: expected `key = value`") != std::string::npos);
  CHECK(error_of("k = 1\nk = 2\n").find("t.cfg:2: duplicate key 'k' (first at line 1)") != std::string::npos);
  CHECK(error_of("k =\n").find("t.cfg:1: key 'k' has no value") != std::string::npos);
  CHECK(error_of("x = 1\nk = abc\n", "number").find("t.cfg:2: key 'k': 'abc' is not a finite number") !=
        std::string::npos);
  CHECK(error_of("k = nan\n", "number").find("not a finite number") != std::string::npos);
  CHECK(error_of("n = 1.5\n", "integer").find("is not an integer") != std::string::npos);
  CHECK(error_of("ks = 1,,2\n", "list").find("bad list item") != std::string::npos);
  CHECK(error_of("f = maybe\n", "flag").find("is not a boolean") != std::string::npos);
  CHECK(error_of("k = 1\n\nbeta = 2\n", "restrict").find("t.cfg:3: unknown key 'beta'") != std::string::npos);
  CHECK(error_of("k = 1\n", "require").find("missing key 'delta'") != std::string::npos);
  CHECK(error_of("", "require").find("missing key 'k'") != std::string::npos);
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/dir/x.cfg"), ConfigError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.0, -1.0, 0.1, 1.0 / 3.0, 6.02214076e23, -4.9e-324, 1.7976931348623157e308}) {
    const std::string s = geomag::io::format_number(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(geomag::io::format_number(0.5) == "5.0000000000000000e-01");
  CHECK_THROWS_AS(geomag::io::format_number(std::nan("")), geomag::InvariantError);
  CHECK_THROWS_AS(geomag::io::format_number(std::numeric_limits<double>::infinity()), geomag::InvariantError);
}

TEST_CASE("csv writer") {
  const auto dir = std::filesystem::temp_directory_path() / "geomag_test_io";
  std::filesystem::create_directories(dir);
  const auto path = dir / "t.csv";
  {
    geomag::io::CsvWriter w(path.string(), {"x", "y"});
    w.row({1.0, -2.0});
    CHECK_THROWS_AS(w.row({1.0}), geomag::ArgumentError);
    CHECK_THROWS_AS(w.row({1.0, std::nan("")}), geomag::InvariantError);
  }
  CHECK(slurp(path) == "x,y\n1.0000000000000000e+00,-2.0000000000000000e+00\n");
  CHECK_THROWS_AS(geomag::io::CsvWriter("/nonexistent/dir/t.csv", {"x"}), geomag::ArgumentError);
  std::filesystem::remove_all(dir);
}
