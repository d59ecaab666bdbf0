#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <numbers>

#include "geomag/errors.hpp"
#include "geomag/ferroslab.hpp"

using namespace geomag;
using namespace geomag::ferroslab;

namespace {

// Classical RK4 for w'' = q(t) w, complex values.
std::pair<cplx, cplx> rk4(const std::function<cplx(double)>& q, double t0, double t1, cplx w, cplx dw, int n) {
  const double h = (t1 - t0) / n;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    const cplx k1w = dw, k1d = q(t) * w;
    const cplx k2w = dw + 0.5 * h * k1d, k2d = q(t + 0.5 * h) * (w + 0.5 * h * k1w);
    const cplx k3w = dw + 0.5 * h * k2d, k3d = q(t + 0.5 * h) * (w + 0.5 * h * k2w);
    const cplx k4w = dw + h * k3d, k4d = q(t + h) * (w + h * k3w);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    dw += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
  }
  return {w, dw};
}

double d0(double nu) { return std::pow(2.0, nu / 2) * std::sqrt(std::numbers::pi) / std::tgamma(0.5 * (1 - nu)); }
double dd0(double nu) { return -std::pow(2.0, (nu + 1) / 2) * std::sqrt(std::numbers::pi) / std::tgamma(-0.5 * nu); }

// Reflection and transmission by RK4 through the slab from the transmitted side.
std::pair<cplx, cplx> slab_oracle(double k, const Config& cfg) {
  const double half = 0.5 * cfg.length, phi = cfg.flux();
  cplx w, dw;
  if (k > phi) {
    const double kx = std::sqrt(k * k - phi * phi);
    w = std::exp(I * kx * half);
    dw = I * kx * w;
  } else {
    const double q = std::sqrt(phi * phi - k * k);
    w = std::exp(-q * half);
    dw = -q * w;
  }
  auto q = [&](double x) { return cplx(std::pow(cfg.b0 * (x + half), 2) - k * k, 0.0); };
  auto [f, df] = rk4(q, half, -half, w, dw, 40000);
  const cplx e = std::exp(-I * k * half);
  const cplx a = (I * k * f + df) / (2.0 * I * k * e);
  const cplx b = (I * k * f - df) * e / (2.0 * I * k);
  return {b / a, 1.0 / a};
}

}  // namespace

TEST_CASE("reciprocal gamma") {
  CHECK(rgamma(-2.0) == 0.0);
  CHECK(rgamma(0.0) == 0.0);
  CHECK(rgamma(3.0) == doctest::Approx(0.5));
  CHECK(rgamma(-0.5) == doctest::Approx(1.0 / std::tgamma(-0.5)).epsilon(1e-14));
}

TEST_CASE("Kummer function identities") {
  CHECK(std::abs(kummer_m(0.7, 0.7, cplx(1.3, 0.4)) - std::exp(cplx(1.3, 0.4))) < 1e-13);
  CHECK(std::abs(kummer_m(0.7, 0.7, cplx(-6.0, 0.2)) - std::exp(cplx(-6.0, 0.2))) < 1e-15);
  CHECK(kummer_m(2.0, 3.0, 0.0) == cplx(1.0));
  // M(1, 2, x) = (e^x - 1) / x.
  const cplx x(2.5, -1.0);
  CHECK(std::abs(kummer_m(1.0, 2.0, x) - (std::exp(x) - 1.0) / x) < 1e-13);
}

TEST_CASE("integer orders match Hermite closed forms") {
  for (cplx z : {cplx(0.0), cplx(1.7, 0.0), cplx(0.0, 2.2), cplx(-1.1, 0.8)}) {
    const cplx g = std::exp(-0.25 * z * z);
    CHECK(std::abs(pcf_d(0.0, z).value - g) < 1e-12);
    CHECK(std::abs(pcf_d(1.0, z).value - z * g) < 1e-12);
    CHECK(std::abs(pcf_d(2.0, z).value - (z * z - 1.0) * g) < 1e-11);
    CHECK(std::abs(pcf_d(1.0, z).derivative - (1.0 - 0.5 * z * z) * g) < 1e-12);
  }
}

TEST_CASE("non-integer orders satisfy the Weber equation") {
  for (double nu : {0.3, 1.75, -0.5, -2.6, 3.2}) {
    // Real axis: D'' = (z^2/4 - nu - 1/2) D.
    auto qr = [&](double t) { return cplx(0.25 * t * t - nu - 0.5, 0.0); };
    auto [w, dw] = rk4(qr, 0.0, 3.0, d0(nu), dd0(nu), 20000);
    const auto p = pcf_d(nu, 3.0);
    CAPTURE(nu);
    CHECK(std::abs(p.value - w) < 1e-10 * std::max(1.0, std::abs(w)));
    CHECK(std::abs(p.derivative - dw) < 1e-10 * std::max(1.0, std::abs(dw)));
    // Imaginary axis: w(t) = D(i t) obeys w'' = (t^2/4 + nu + 1/2) w.
    auto qi = [&](double t) { return cplx(0.25 * t * t + nu + 0.5, 0.0); };
    auto [u, du] = rk4(qi, 0.0, 3.0, d0(nu), I * dd0(nu), 20000);
    const auto pi = pcf_d(nu, cplx(0.0, 3.0));
    CHECK(std::abs(pi.value - u) < 1e-10 * std::max(1.0, std::abs(u)));
    CHECK(std::abs(I * pi.derivative - du) < 1e-10 * std::max(1.0, std::abs(du)));
    CHECK(p.error_estimate < 1e-9);
  }
  CHECK_THROWS_AS(pcf_d(0.5, 9.0), DomainError);
}

TEST_CASE("slab amplitudes against RK4") {
  struct P {
    double k, b0, l;
  };
  for (const auto& p : {P{1.5, 1.0, 1.0}, P{3.0, 2.0, 1.0}, P{0.5, 1.0, 1.0}, P{0.8, 2.0, 0.5}, P{4.0, 1.5, 2.0}}) {
    Config cfg{p.b0, p.l, 0.5};
    const auto s = slab_analytic(p.k, cfg);
    const auto [r, t] = slab_oracle(p.k, cfg);
    CAPTURE(p.k);
    CHECK(std::abs(s.r - r) < 1e-9);
    CHECK(std::abs(s.t - t) < 1e-9);
    // The stored wavefunction continues the asymptotic forms.
    const double half = 0.5 * p.l;
    CHECK(std::abs(slab_wavefunction(s, cfg, -half + 1e-12) - slab_wavefunction(s, cfg, -half)) < 1e-9);
    CHECK(std::abs(slab_wavefunction(s, cfg, half - 1e-12) - slab_wavefunction(s, cfg, half)) < 1e-9);
  }
}

TEST_CASE("current conservation and total reflection") {
  for (double k : {1.2, 2.0, 3.5}) {
    Config cfg{1.0, 1.0, 0.5};
    const auto s = slab_analytic(k, cfg);
    const auto c = slab_currents(s.r, s.t, k, cfg.flux(), cfg.mass);
    CHECK(std::abs(c.j_in + c.j_refl - c.j_x) < 1e-10 * c.j_in);
    CHECK(c.tan_theta == doctest::Approx(-1.0 / std::sqrt(k * k - 1.0)));
  }
  for (double k : {0.2, 0.6, 0.95}) {
    Config cfg{1.0, 1.0, 0.5};
    CHECK(std::abs(std::abs(slab_analytic(k, cfg).r) - 1.0) < 1e-10);
    CHECK(std::abs(std::abs(step_reflection(k, 1.0)) - 1.0) < 1e-14);
  }
  CHECK_THROWS_AS(slab_currents(0.0, 0.0, 0.5, 1.0), DomainError);
}

TEST_CASE("thin slab approaches the step potential") {
  // Error is first order in L at fixed flux.
  for (double k : {0.5, 1.5, 3.0}) {
    double prev = 1.0;
    for (double l : {1e-3, 1e-5, 1e-7}) {
      Config cfg{1.0 / l, l, 0.5};
      const double e = std::abs(slab_analytic(k, cfg).r - step_reflection(k, 1.0));
      CHECK(e < prev);
      prev = e;
    }
    CHECK(prev < 1e-6);
  }
}
