#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "geomag/errors.hpp"
#include "geomag/model1d.hpp"

using namespace geomag;
using namespace geomag::model1d;

namespace {

// Independent reflection: exact propagator of the first-order system for
// (psi, D psi) with D = d/dx - iA, launched from the wall and matched at x = 0.
cplx oracle_reflection(double k, const Config& cfg) {
  const double dc = 4.0 * cfg.mass * cfg.delta;
  Eigen::Matrix2cd a;
  a << cfg.a0, cfg.a1, cfg.a1, -cfg.a0;
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m.block<2, 2>(0, 0) = I * a;
  m.block<2, 2>(0, 2) = Eigen::Matrix2cd::Identity();
  m(2, 0) = dc - k * k;
  m(3, 1) = -k * k;
  m.block<2, 2>(2, 2) = I * a;
  const Eigen::Matrix4cd prop = (m * (-cfg.wall)).exp();
  // Two solutions with psi(L) = 0.
  Eigen::Matrix<cplx, 4, 2> at_wall = Eigen::Matrix<cplx, 4, 2>::Zero();
  at_wall(2, 0) = 1.0;
  at_wall(3, 1) = 1.0;
  const Eigen::Matrix<cplx, 4, 2> at_zero = prop * at_wall;
  const double kappa = std::sqrt(dc - k * k);
  const cplx ein = std::exp(-I * k * cfg.wall), eout = std::exp(I * k * cfg.wall);
  // Unknowns: alpha1, alpha2, S, R.
  Eigen::Matrix4cd sys = Eigen::Matrix4cd::Zero();
  Eigen::Vector4cd rhs = Eigen::Vector4cd::Zero();
  sys.block<4, 2>(0, 0) = at_zero;
  sys(0, 2) = -1.0;
  sys(2, 2) = -kappa;
  sys(1, 3) = -eout;
  rhs(1) = ein;
  sys(3, 3) = I * k * eout;
  rhs(3) = I * k * ein;
  return sys.fullPivLu().solve(rhs)(3);
}

// Single-channel projected problem by RK4 from the wall.
cplx oracle_bo(double k, const Config& cfg) {
  const double w2 = k * k - cfg.a1 * cfg.a1;
  const int n = 20000;
  const double h = -cfg.wall / n;
  double psi = 0.0, dpsi = 1.0;
  for (int i = 0; i < n; ++i) {
    auto f = [&](double p, double dp, double& op, double& odp) {
      op = dp;
      odp = -w2 * p;
    };
    double k1p, k1d, k2p, k2d, k3p, k3d, k4p, k4d;
    f(psi, dpsi, k1p, k1d);
    f(psi + 0.5 * h * k1p, dpsi + 0.5 * h * k1d, k2p, k2d);
    f(psi + 0.5 * h * k2p, dpsi + 0.5 * h * k2d, k3p, k3d);
    f(psi + h * k3p, dpsi + h * k3d, k4p, k4d);
    psi += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    dpsi += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
  }
  const double y = dpsi / psi;
  return std::exp(-2.0 * I * k * cfg.wall) * (I * k - y) / (I * k + y);
}

}  // namespace

TEST_CASE("quartic momenta solve the ansatz") {
  for (double a0 : {0.0, 0.4}) {
    Config cfg;
    cfg.a0 = a0;
    cfg.a1 = 1.0;
    cfg.delta = 2.0;
    const double e = energy_of(0.7, cfg);
    const auto roots = quartic_momenta(e, cfg);
    cplx sum = 0.0;
    for (const auto& r : roots) {
      sum += r.omega;
      CHECK(std::abs(ansatz_matrix(r.omega, 0.7, cfg).determinant()) < 1e-9);
      CHECK((ansatz_matrix(r.omega, 0.7, cfg) * r.mixing).norm() < 1e-9);
      CHECK(std::abs(r.branch) == 1);
    }
    // No cubic term in the quartic.
    CHECK(std::abs(sum) < 1e-10);
  }
}

TEST_CASE("coupled reflection against the exact propagator") {
  for (double a0 : {0.0, 0.4}) {
    for (double delta : {0.5, 2.0}) {
      for (double k : {0.3, 0.8}) {
        Config cfg;
        cfg.a0 = a0;
        cfg.a1 = 1.0;
        cfg.delta = delta;
        const auto r = coupled_reflection(k, cfg);
        CAPTURE(a0);
        CAPTURE(delta);
        CAPTURE(k);
        CHECK(std::abs(r.r - oracle_reflection(k, cfg)) < 1e-10);
        CHECK(std::abs(std::abs(r.r) - 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("degenerate gap reflects with R = -1") {
  Config cfg;
  cfg.delta = 0.0;
  for (double k : {0.1, 0.5, 1.3, 2.0, 3.0}) CHECK(std::abs(coupled_reflection(k, cfg).r + 1.0) < 1e-10);
  // k = |A| merges two momenta; the mode basis degenerates.
  CHECK_THROWS_AS(coupled_reflection(1.0, cfg), ConditioningError);
}

TEST_CASE("closed channel must stay closed") {
  Config cfg;
  cfg.delta = 1.0;
  CHECK_THROWS_AS(coupled_reflection(std::sqrt(2.0), cfg), ThresholdError);
  CHECK_THROWS_AS(coupled_reflection(-1.0, cfg), ArgumentError);
  cfg.wall = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}

TEST_CASE("projected reflection against RK4") {
  for (double a1 : {0.5, 1.0, 2.0}) {
    for (double k : {0.2, 0.9, 1.7}) {
      Config cfg;
      cfg.a1 = a1;
      cfg.a0 = 0.3;
      CHECK(std::abs(bo_reflection(k, cfg) - oracle_bo(k, cfg)) < 1e-9);
    }
  }
  Config free;
  free.a1 = 0.0;
  CHECK(std::abs(bo_reflection(0.7, free) + 1.0) < 1e-14);
}

TEST_CASE("series branch of the log-derivative is continuous") {
  Config cfg;
  cfg.a1 = 1.0;
  const double k0 = 1.0;
  const cplx below = bo_reflection(k0 - 2e-5, cfg), at = bo_reflection(k0, cfg), above = bo_reflection(k0 + 2e-5, cfg);
  CHECK(std::abs(below - at) < 1e-4);
  CHECK(std::abs(above - at) < 1e-4);
  CHECK(std::abs(0.5 * (below + above) - at) < 1e-8);
}

TEST_CASE("effective length of the projected problem") {
  Config cfg;
  cfg.a1 = 1.0;
  cfg.wall = 3.0;
  const double k = 1e-4;
  const double fitted = bo_reflection(k, cfg).imag() / (2.0 * k);
  CHECK(fitted == doctest::Approx(effective_length_closed_form(1.0, 3.0)).epsilon(1e-6));
  CHECK(effective_length_closed_form(1.0, 3.0) == doctest::Approx(3.0 - std::tanh(3.0)).epsilon(1e-15));
  // Small-argument series agrees with the direct form across the switch.
  CHECK(effective_length_closed_form(1e-4 * (1 + 1e-9), 1.0) ==
        doctest::Approx(effective_length_closed_form(1.0001e-4, 1.0)).epsilon(1e-4));
}

TEST_CASE("coupled effective length approaches the projected one slowly") {
  // The closed channel decays over 1/sqrt(2 Delta): convergence is ~Delta^{-1/2}.
  Config cfg;
  cfg.a1 = 1.0;
  cfg.wall = 3.0;
  std::vector<double> err;
  for (double delta : {1e2, 1e3, 1e4}) {
    cfg.delta = delta;
    err.push_back(std::abs(effective_length(cfg).difference));
  }
  CHECK(err[0] > err[1]);
  CHECK(err[1] > err[2]);
  CHECK(err[0] / err[1] == doctest::Approx(std::sqrt(10.0)).epsilon(0.15));
  CHECK(err[1] / err[2] == doctest::Approx(std::sqrt(10.0)).epsilon(0.15));
}

TEST_CASE("constant field transport is the exponential") {
  Config cfg;
  cfg.a0 = 0.3;
  cfg.a1 = 0.8;
  Eigen::Matrix2cd a;
  a << 0.3, 0.8, 0.8, -0.3;
  for (double x : {0.0, 0.7, 4.0}) CHECK(max_abs(constant_field_transport(cfg, x) - (I * x * a).exp()) < 1e-14);
}
