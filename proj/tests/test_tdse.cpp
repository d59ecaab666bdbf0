#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geomag/errors.hpp"
#include "geomag/tdse.hpp"

using namespace geomag;
using namespace geomag::tdse;

namespace {

TdseConfig small() {
  TdseConfig cfg;
  cfg.grid.nx = 128;
  cfg.grid.ny = 128;
  cfg.k = 6.0;
  cfg.delta = 50.0;
  cfg.flux = 3.0;
  cfg.xi0 = -2.5;
  cfg.sigma = 0.6;
  cfg.xi_stop = 1e9;
  return cfg;
}

double variance_xi(const SpinorField& f) {
  const auto& gr = f.grid;
  double m = 0, m2 = 0, n = 0;
  for (int i = 0; i < gr.nx; ++i)
    for (int j = 0; j < gr.ny; ++j) {
      const double p = std::norm(f.g[i * gr.ny + j]) + std::norm(f.f[i * gr.ny + j]);
      n += p;
      m += gr.xi(i) * p;
      m2 += gr.xi(i) * gr.xi(i) * p;
    }
  m /= n;
  return m2 / n - m * m;
}

}  // namespace

TEST_CASE("potential matrix") {
  TdseConfig cfg;
  for (double xi : {-1.0, 0.0, 0.3, 2.0}) {
    const auto v = potential_matrix(xi, 0.7, cfg);
    CHECK(hermiticity_defect(v) < 1e-13);
    CHECK(std::abs(v.determinant() + cfg.delta * cfg.delta) < 1e-9);
    CHECK(std::abs(v.trace()) < 1e-12);
  }
  cfg.profile = FluxProfile::Lens;
  const double h = 1e-5;
  for (double eta : {-1.0, 0.4, 2.0})
    CHECK(cfg.chi_prime(eta) == doctest::Approx((cfg.chi(eta + h) - cfg.chi(eta - h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("free propagation is exact") {
  TdseConfig cfg = small();
  cfg.delta = 0.0;
  cfg.k = 3.0;
  cfg.sigma = 0.7;
  SpinorField field = initial_packet(cfg);
  CHECK(field.norm() == doctest::Approx(1.0).epsilon(1e-14));
  const double s2 = variance_xi(field);
  CHECK(s2 == doctest::Approx(cfg.sigma * cfg.sigma).epsilon(1e-10));
  Propagator prop(cfg);
  prop.steps(field, 1e-3, 100);
  const double t = 0.1;
  const auto p = measure(field);
  CHECK(p.xi_mean == doctest::Approx(cfg.xi0 + 2.0 * cfg.k * t).epsilon(1e-10));
  CHECK(std::abs(p.eta_mean) < 1e-12);
  CHECK(p.pop_f == 0.0);
  const double sig2 = cfg.sigma * cfg.sigma;
  CHECK(variance_xi(field) == doctest::Approx(sig2 + t * t / sig2).epsilon(1e-6));
}

TEST_CASE("a full potential period is invisible") {
  TdseConfig cfg = small();
  cfg.delta = 200.0;
  TdseConfig free = cfg;
  free.delta = 0.0;
  SpinorField a = initial_packet(cfg);
  SpinorField b = a;
  Propagator pa(cfg), pb(free);
  const double dt = 2.0 * std::acos(-1.0) / cfg.delta;
  pa.step(a, dt);
  pb.step(b, dt);
  double diff = 0.0;
  for (std::size_t n = 0; n < a.g.size(); ++n)
    diff = std::max({diff, std::abs(a.g[n] - b.g[n]), std::abs(a.f[n] - b.f[n])});
  CHECK(diff < 1e-12);
}

TEST_CASE("unitarity, symmetry and Strang order") {
  TdseConfig cfg = small();
  SpinorField field = initial_packet(cfg);
  Propagator prop(cfg);
  for (int s = 0; s < 200; ++s) {
    const double before = field.norm();
    prop.step(field, 5e-4);
    CHECK(std::abs(field.norm() - before) < 1e-12);
  }
  const auto ad = adiabatic_amplitudes(field, cfg);
  double na = 0.0;
  for (std::size_t n = 0; n < ad.f.size(); ++n) na += std::norm(ad.f[n]) + std::norm(ad.g[n]);
  CHECK(na * field.grid.dxi() * field.grid.deta() == doctest::Approx(field.norm()).epsilon(1e-14));

  TdseConfig flat = small();
  flat.flux = 0.0;
  SpinorField sym = initial_packet(flat);
  Propagator ps(flat);
  ps.steps(sym, 5e-4, 200);
  CHECK(std::abs(measure(sym).eta_mean) < 1e-10);

  std::vector<double> eta;
  for (int lev = 0; lev < 3; ++lev) {
    TdseConfig c = small();
    c.dt = 2e-3 / (1 << lev);
    c.max_steps = 100L << lev;
    c.output_every = static_cast<int>(c.max_steps);
    eta.push_back(propagate(c).trajectory.back().eta_mean);
  }
  const double ratio = (eta[0] - eta[1]) / (eta[1] - eta[2]);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("classical comparator") {
  TdseConfig cfg;
  const auto path = classical_trajectory(cfg.k, cfg, 0.0);
  CHECK(std::abs(path.tan_theta) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
  CHECK(path.speed_drift < 1e-10);
  TdseConfig lens = cfg;
  lens.profile = FluxProfile::Lens;
  lens.delta = 400.0;
  const auto cl = classical_lens({0.5, 1.0, 1.5}, lens);
  CHECK(cl.focal_xi == doctest::Approx(3.0).epsilon(0.5 / 3.0));
}

TEST_CASE("fits and focal points") {
  std::vector<LineFit> fits;
  for (double b : {0.5, 1.0, 1.5}) {
    LineFit f;
    f.slope = -b / 3.0;
    f.xi_center = 0.0;
    f.eta_center = b;
    fits.push_back(f);
  }
  const auto p = focal_point(fits);
  CHECK(p[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(p[1]) < 1e-12);
  CHECK_THROWS_AS(focal_point({fits[0]}), ArgumentError);
  CHECK_THROWS_AS(lens_run({1.0}, TdseConfig{}), ArgumentError);

  Trajectory line;
  for (int i = 0; i < 10; ++i) {
    TrajectoryPoint q;
    q.xi_mean = 2.0 + 0.2 * i;
    q.eta_mean = 0.5 - 0.25 * q.xi_mean;
    line.push_back(q);
  }
  const auto fit = deflection_from_trajectory(line, 2.5);
  CHECK(fit.slope == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(fit.points == 7);
  CHECK_THROWS_AS(deflection_from_trajectory(line, 3.5), InsufficientPropagationError);
}

TEST_CASE("configuration and wrap-around errors") {
  TdseConfig cfg = small();
  cfg.grid.nx = 100;
  CHECK_THROWS_AS(initial_packet(cfg), ArgumentError);
  cfg = small();
  cfg.xi0 = 20.0;
  CHECK_THROWS_AS(initial_packet(cfg), ArgumentError);
  cfg = small();
  cfg.dt = 0.0;
  CHECK_THROWS_AS(Propagator{cfg}, ArgumentError);

  cfg = small();
  cfg.xi0 = 8.0;
  cfg.max_steps = 1000;
  cfg.dt = 1e-3;
  CHECK_THROWS_AS(propagate(cfg), WrapAroundError);
}
