#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "geomag/errors.hpp"
#include "geomag/linalg.hpp"
#include "geomag/ode.hpp"

using namespace geomag;

namespace {

CMatrix random_hermitian(int n, int seed) {
  // Deterministic pseudo-random entries.
  CMatrix m(n, n);
  double s = seed;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      s = std::fmod(s * 16807.0 + 0.5, 2147483647.0);
      const double a = s / 2147483647.0 - 0.5;
      s = std::fmod(s * 16807.0 + 0.5, 2147483647.0);
      const double b = s / 2147483647.0 - 0.5;
      m(i, j) = cplx(a, b);
    }
  return m + m.adjoint();
}

}  // namespace

TEST_CASE("pauli algebra") {
  for (int i = 1; i <= 3; ++i) {
    CHECK(max_abs(pauli(i) * pauli(i) - Eigen::Matrix2cd::Identity()) < 1e-15);
  }
  CHECK(max_abs(pauli(1) * pauli(2) - I * pauli(3)) < 1e-15);
}

TEST_CASE("expi_hermitian matches the Pade matrix exponential") {
  for (int n : {2, 4}) {
    for (int seed : {3, 11, 29}) {
      for (double scale : {1e-6, 0.3, 2.0, 7.0}) {
        const CMatrix h = scale * random_hermitian(n, seed);
        const CMatrix oracle = (I * h).exp();
        CHECK(max_abs(expi_hermitian(h) - oracle) < 1e-12 * std::max(1.0, scale));
        CHECK(unitarity_defect(expi_hermitian(h)) < 1e-13);
      }
    }
  }
}

TEST_CASE("defect measures") {
  Eigen::Matrix2cd m;
  m << 1.0, 2.0, 2.5, 0.0;
  CHECK(hermiticity_defect(m) == doctest::Approx(0.5));
  CHECK(unitarity_defect(Eigen::Matrix2cd::Identity()) == 0.0);
  m(0, 0) = std::nan("");
  CHECK_FALSE(all_finite(m));
}

TEST_CASE("two-spin operators commute across particles") {
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) CHECK(max_abs(spin_a(i) * spin_b(j) - spin_b(j) * spin_a(i)) < 1e-15);
  CHECK(max_abs(spin_a(1) * spin_a(2) - spin_a(2) * spin_a(1) - I * spin_a(3)) < 1e-15);
}

TEST_CASE("oscillator against the exact solution") {
  const double w = 3.0;
  ode::Coupling c = [&](double, CMatrix& p) { p(0, 0) = -w * w; };
  CMatrix y0(2, 2);
  y0 << 1.0, 0.0, 0.0, 1.0;
  ode::Solutions s(0.0, y0);
  ode::Options opts;
  opts.rtol = 1e-12;
  ode::integrate(c, s, 5.0, opts);
  const double x = 5.0;
  CHECK(std::abs(std::exp(s.log_scale[0]) * s.y(0, 0) - std::cos(w * x)) < 1e-9);
  CHECK(std::abs(std::exp(s.log_scale[1]) * s.y(0, 1) - std::sin(w * x) / w) < 1e-9);
}

TEST_CASE("growing mode is carried in the log scale") {
  ode::Coupling c = [](double, CMatrix& p) { p(0, 0) = 1.0; };
  CMatrix y0(2, 1);
  y0 << 1.0, 1.0;
  ode::Solutions s(0.0, y0);
  ode::integrate(c, s, 800.0, {});
  CHECK(s.log_scale[0] + std::log(std::abs(s.y(0, 0))) == doctest::Approx(800.0).epsilon(1e-10));
}

TEST_CASE("backward integration and stop points") {
  ode::Coupling c = [](double x, CMatrix& p) { p(0, 0) = -1.0 - x * x; };
  CMatrix y0(2, 1);
  y0 << 1.0, 0.0;
  ode::Solutions fwd(0.0, y0);
  std::vector<double> seen;
  ode::integrate(c, fwd, 2.0, {}, {0.5, 1.0, 1.5}, [&](const ode::Solutions& s) { seen.push_back(s.x); });
  REQUIRE(seen.size() == 3);
  CHECK(seen[1] == 1.0);
  ode::Solutions back = fwd;
  ode::integrate(c, back, 0.0, {});
  CHECK(std::abs(std::exp(back.log_scale[0]) * back.y(0, 0) - 1.0) < 1e-8);
}

TEST_CASE("non-finite coefficients are reported") {
  ode::Coupling c = [](double x, CMatrix& p) { p(0, 0) = x > 0.5 ? std::nan("") : 1.0; };
  CMatrix y0(2, 1);
  y0 << 1.0, 0.0;
  ode::Solutions s(0.0, y0);
  CHECK_THROWS_AS(ode::integrate(c, s, 1.0, {}), EvaluationError);
}
