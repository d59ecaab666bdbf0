#include "geomag/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "geomag/errors.hpp"
#include "geomag/ferroslab.hpp"
#include "geomag/gauge_core.hpp"
#include "geomag/internal_gauge.hpp"
#include "geomag/model1d.hpp"
#include "geomag/ode.hpp"
#include "geomag/slab2d.hpp"
#include "geomag/tdse.hpp"

namespace geomag::acceptance {

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) passed = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " [FAIL]");
  }
};

std::string num(double v, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

// 1. Effective length of the coupled model at large gap.
void effective_range(Outcome& o, double seconds_budget, const std::chrono::steady_clock::time_point& t0) {
  model1d::Config cfg;
  cfg.a1 = 1.0;
  cfg.wall = 3.0;
  cfg.delta = 1e4;
  const auto eff = model1d::effective_length(cfg);
  const double target = 3.0 - std::tanh(3.0);
  const double rel = std::abs(eff.fitted - target) / target;
  o.check(rel <= 1e-3, "fitted " + num(eff.fitted, 8) + " vs " + num(target, 8) + " rel " + num(rel, 3));
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(s < seconds_budget, "runtime " + num(s, 3) + " s");
}

void degenerate_gap(Outcome& o) {
  model1d::Config cfg;
  cfg.delta = 0.0;
  double worst = 0.0;
  for (double k : {0.1, 0.5, 1.3, 2.0, 3.0}) worst = std::max(worst, std::abs(model1d::coupled_reflection(k, cfg).r + 1.0));
  o.check(worst <= 1e-10, "max |R + 1| = " + num(worst, 3));
}

void transmission_comparison(Outcome& o) {
  slab2d::Config cfg;
  cfg.beta = 1.0;
  cfg.b0 = 1.0;
  cfg.length = 1.0;
  double worst = 0.0;
  for (double ratio : {1.1, 1.25, 1.5, 2.0, 3.0}) {
    const double k = ratio * cfg.flux();
    slab2d::Config c = cfg;
    c.delta = k * k / (2.0 * c.mass);
    const auto sol = slab2d::coupled_scatter(0.0, c);
    const double tc = slab2d::transmission_coefficient(sol.amplitudes(), c.flux());
    const double tb = slab2d::bo_scatter_normal(k, c).transmission();
    worst = std::max(worst, std::abs(tc - tb));
  }
  o.check(worst <= 0.02, "max |T_BO - T_coupled| = " + num(worst, 3));
  double prev_c = 1.0, prev_b = 1.0;
  bool monotone = true;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const double k = cfg.flux() * (1.0 + eps);
    slab2d::Config c = cfg;
    c.delta = k * k / (2.0 * c.mass);
    const double tc = slab2d::transmission_coefficient(slab2d::coupled_scatter(0.0, c).amplitudes(), c.flux());
    const double tb = slab2d::bo_scatter_normal(k, c).transmission();
    monotone = monotone && tc < prev_c && tb < prev_b;
    prev_c = tc;
    prev_b = tb;
  }
  o.check(monotone && prev_c < 0.02 && prev_b < 0.02,
          "T at k = Phi(1 + 1e-6): coupled " + num(prev_c, 3) + ", BO " + num(prev_b, 3));
}

void deflection_identity(Outcome& o) {
  slab2d::Config cfg;
  const double k = 2.0 * cfg.flux();
  cfg.delta = k * k / (2.0 * cfg.mass);
  const auto sol = slab2d::coupled_scatter(0.0, cfg);
  const Eigen::Vector2d j = slab2d::current(sol, sol.cutoff(), 0.0);
  const double ratio = std::abs(j[1] / j[0]);
  const double expected = slab2d::deflection_angle(k, cfg.flux());
  o.check(std::abs(ratio - expected) <= 1e-6, "|jy/jx| = " + num(ratio, 10) + " vs " + num(expected, 10));
}

void flux_gauge(Outcome& o) {
  const double w = 1.0;
  {
    slab2d::Config cfg;
    const double k = 1.5;
    cfg.delta = k * k / (2.0 * cfg.mass);
    const auto sol = slab2d::coupled_scatter(0.0, cfg);
    const auto f = slab2d::flux_functional(sol, w);
    const double rel = std::abs(f.diabatic - f.adiabatic_current - f.gauge_part) / std::abs(f.diabatic);
    o.check(rel <= 1e-8, "closed: gauge split rel " + num(rel, 3));
    const double reduced = f.diabatic / (2.0 * w * cfg.flux() / cfg.mass);
    const double t2 = std::norm(sol.amplitudes().t12);
    const double rel2 = std::abs(reduced - t2) / t2;
    o.check(rel2 <= 1e-8, "closed: F/(2 w Phi/m) vs |t12|^2 rel " + num(rel2, 3));
  }
  {
    slab2d::Config cfg;
    cfg.delta = 1.0;
    const auto sol = slab2d::coupled_scatter(2.5, cfg);
    const auto f = slab2d::flux_functional(sol, w);
    const double rel = std::abs(f.diabatic - f.adiabatic_current - f.gauge_part) / std::abs(f.diabatic);
    o.check(sol.amplitudes().regime == slab2d::Regime::Open && rel <= 1e-8, "open: gauge split rel " + num(rel, 3));
  }
}

void packet_deflection(Outcome& o) {
  struct Row {
    double gap, ratio, expected, band;
  };
  const Row rows[] = {{25.0 / 9.0, 0.5, 0.587, 0.05},
                      {25.0 / 9.0, 0.25, 0.270, 0.03},
                      {25.0 / 9.0, 1.0 / 12.0, 0.088, 0.02},
                      {1.0, 0.5, 0.63, 0.06}};
  for (const auto& row : rows) {
    tdse::TdseConfig cfg;
    cfg.k = 12.0;
    cfg.delta = row.gap * cfg.k * cfg.k / 2.0;
    cfg.flux = row.ratio * cfg.k;
    const auto run = tdse::propagate(cfg);
    const double tan = std::abs(tdse::deflection_from_trajectory(run.trajectory, cfg.free_flight_xi).slope);
    o.check(std::abs(tan - row.expected) <= row.band,
            "(" + num(row.gap, 3) + ", " + num(row.ratio, 3) + "): " + num(tan, 4) + " vs " + num(row.expected, 3));
  }
}

tdse::TdseConfig small_box() {
  tdse::TdseConfig cfg;
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

void tdse_unitarity(Outcome& o) {
  tdse::TdseConfig cfg = small_box();
  cfg.dt = 5e-4;
  tdse::SpinorField field = tdse::initial_packet(cfg);
  tdse::Propagator prop(cfg);
  double prev = field.norm(), drift = 0.0;
  for (int s = 0; s < 1000; ++s) {
    prop.step(field, cfg.dt);
    const double n = field.norm();
    drift = std::max(drift, std::abs(n - prev));
    prev = n;
  }
  o.check(drift < 1e-12, "max norm change per step " + num(drift, 3) + " over 1000 steps");

  std::vector<double> eta;
  for (int lev = 0; lev < 3; ++lev) {
    tdse::TdseConfig c = small_box();
    c.dt = 2e-3 / (1 << lev);
    c.max_steps = 100L << lev;
    c.output_every = static_cast<int>(c.max_steps);
    eta.push_back(tdse::propagate(c).trajectory.back().eta_mean);
  }
  const double ratio = (eta[0] - eta[1]) / (eta[1] - eta[2]);
  o.check(ratio > 3.5 && ratio < 4.5, "error ratio under dt halving " + num(ratio, 4));
}

void lens(Outcome& o) {
  tdse::TdseConfig cfg;
  cfg.k = 12.0;
  cfg.delta = 400.0;
  cfg.gamma = 1.0;
  cfg.focal = 3.0;
  cfg.profile = tdse::FluxProfile::Lens;
  const std::vector<double> b = {0.5, 1.0, 1.5};
  const auto q = tdse::lens_run(b, cfg);
  o.check(std::abs(q.focal_xi - 3.0) <= 0.5, "packet focus xi = " + num(q.focal_xi, 4));
  const auto c = tdse::classical_lens(b, cfg);
  o.check(std::abs(c.focal_xi - 3.0) <= 0.5, "classical focus xi = " + num(c.focal_xi, 4));
}

// Integrates the slab equation backwards from the transmitted wave.
std::pair<cplx, cplx> ferroslab_oracle(double k, const ferroslab::Config& cfg) {
  const double half = 0.5 * cfg.length;
  const double phi = cfg.flux();
  ode::Coupling coupling = [&](double x, CMatrix& p) {
    const double a = cfg.b0 * (x + half);
    p(0, 0) = a * a - k * k;
  };
  CMatrix seed(2, 1);
  if (k > phi) {
    const double kx = std::sqrt(k * k - phi * phi);
    const cplx e = std::exp(I * kx * half);
    seed << e, I * kx * e;
  } else {
    const double q = std::sqrt(phi * phi - k * k);
    const double e = std::exp(-q * half);
    seed << e, -q * e;
  }
  ode::Solutions s(half, seed);
  ode::Options opts;
  opts.rtol = 1e-13;
  opts.h_max = 0.01;
  ode::integrate(coupling, s, -half, opts);
  const cplx f = std::exp(s.log_scale[0]) * s.y(0, 0), df = std::exp(s.log_scale[0]) * s.y(1, 0);
  const cplx e = std::exp(-I * k * half);
  const cplx a = (I * k * f + df) / (2.0 * I * k * e);
  const cplx b = (I * k * f - df) * e / (2.0 * I * k);
  return {b / a, 1.0 / a};
}

void ferroslab_checks(Outcome& o, double seconds_budget, const std::chrono::steady_clock::time_point& t0) {
  struct P {
    double k, b0, l;
  };
  const P pts[] = {{1.5, 1.0, 1.0}, {2.0, 1.0, 1.0}, {3.0, 2.0, 1.0}, {0.5, 1.0, 1.0}, {0.8, 2.0, 0.5},
                   {4.0, 1.5, 2.0}, {1.2, 0.5, 3.0}, {2.5, 3.0, 0.8}, {0.3, 1.0, 2.0}, {5.0, 0.7, 1.5}};
  double worst = 0.0, conservation = 0.0, below = 0.0;
  for (const auto& p : pts) {
    ferroslab::Config cfg{p.b0, p.l, 0.5};
    const auto s = ferroslab::slab_analytic(p.k, cfg);
    const auto [r, t] = ferroslab_oracle(p.k, cfg);
    worst = std::max({worst, std::abs(r - s.r), std::abs(t - s.t)});
    if (s.transmitting) {
      const auto c = ferroslab::slab_currents(s.r, s.t, p.k, cfg.flux(), cfg.mass);
      conservation = std::max(conservation, std::abs(c.j_in + c.j_refl - c.j_x) / c.j_in);
    } else {
      below = std::max(below, std::abs(std::abs(s.r) - 1.0));
    }
  }
  o.check(worst <= 1e-8, "analytic vs ODE max diff " + num(worst, 3));
  double step = 0.0;
  for (double k : {0.5, 1.5, 3.0}) {
    ferroslab::Config cfg{1.0 / 1e-7, 1e-7, 0.5};
    step = std::max(step, std::abs(ferroslab::slab_analytic(k, cfg).r - ferroslab::step_reflection(k, 1.0)));
  }
  o.check(step <= 1e-6, "L = 1e-7 vs step limit " + num(step, 3));
  o.check(conservation <= 1e-10, "current conservation " + num(conservation, 3));
  o.check(below <= 1e-10, "| |r| - 1 | below Phi " + num(below, 3));
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(s < seconds_budget, "runtime " + num(s, 3) + " s");
}

void holonomy(Outcome& o) {
  internal_gauge::AbConfig ab;
  const auto conn = internal_gauge::ab_gauge_connection(ab);
  const auto loop = gauge::ParamPath::arc(RVector::Zero(2), 1.0, 0.0, 2.0 * std::numbers::pi);
  std::vector<double> err;
  for (int n : {2500, 5000, 10000}) {
    const auto w = gauge::wilson_line(conn, loop, n);
    err.push_back(max_abs(w.value - CMatrix::Identity(2, 2)));
  }
  o.check(err[2] <= 1e-7, "AB loop |W - 1| at 1e4 steps " + num(err[2], 3));
  const double order = std::log2(err[1] / err[2]);
  o.check(order > 1.8 && order < 2.2, "observed order " + num(order, 3));

  double arc = 0.0;
  for (double t : {0.4, 1.3, 2.9}) {
    const auto w = gauge::wilson_line(conn, internal_gauge::ab_arc(t, ab), 10000);
    arc = std::max(arc, max_abs(w.value * internal_gauge::ab_wilson(0.0, ab) - internal_gauge::ab_wilson(t, ab)));
  }
  o.check(arc <= 1e-7, "arc closed form max diff " + num(arc, 3));

  model1d::Config m;
  m.a0 = 0.3;
  m.a1 = 0.8;
  const auto c1 = model1d::connection(m);
  double line = 0.0;
  for (double x : {0.5, 1.7, 3.0}) {
    RVector from = RVector::Zero(1), to = RVector::Constant(1, x);
    const auto w = gauge::wilson_line(c1, gauge::ParamPath::segment(from, to), 1000);
    line = std::max(line, max_abs(w.value - model1d::constant_field_transport(m, x)));
  }
  o.check(line <= 1e-12, "constant 1D field closed form max diff " + num(line, 3));
}

void curvature_checks(Outcome& o) {
  const double h = 1e-3;
  slab2d::Config slab;
  double worst_slab = 0.0;
  const auto sc = slab2d::connection(slab);
  for (auto [x, y] : {std::pair{0.0, 0.0}, {0.3, 0.7}, {-1.0, 2.0}, {1.5, -0.4}}) {
    RVector p(2);
    p << x, y;
    worst_slab = std::max(worst_slab, gauge::curvature(sc, p, h).max_norm());
  }
  o.check(worst_slab <= 1e-5, "slab |F| " + num(worst_slab, 3));

  internal_gauge::AbConfig ab;
  const auto ac = internal_gauge::ab_gauge_connection(ab);
  double worst_ab = 0.0;
  for (auto [x, y] : {std::pair{0.8, 0.5}, {-1.0, 1.0}, {0.2, -1.5}}) {
    RVector p(2);
    p << x, y;
    worst_ab = std::max(worst_ab, gauge::curvature(ac, p, h).max_norm());
  }
  o.check(worst_ab <= 1e-5, "AB |F| " + num(worst_ab, 3));

  const double r = 1.3;
  gauge::GaugeConnection dc(2, 4, [r](const RVector& p) {
    const auto c = internal_gauge::dipolar_connection(p[0], p[1], r);
    return std::vector<CMatrix>{r * c.theta_hat, r * std::sin(p[0]) * c.phi_hat};
  });
  double worst_dip = 0.0;
  for (auto [t, f] : {std::pair{0.7, 1.1}, {1.9, -0.4}, {2.5, 2.2}}) {
    RVector p(2);
    p << t, f;
    worst_dip = std::max(worst_dip, gauge::curvature(dc, p, h).max_norm());
  }
  o.check(worst_dip <= 1e-5, "dipolar |F| " + num(worst_dip, 3));

  const auto projected = gauge::projected_connection(sc, {1});
  double worst_b = 0.0;
  for (double x : {-2.0, -0.5, 0.0, 0.4, 1.3}) {
    RVector p(2);
    p << x, 0.3;
    const double f = gauge::curvature(projected, p, 1e-4)(0, 1)(0, 0).real();
    worst_b = std::max(worst_b, std::abs(f - slab2d::induction(x, slab, 1)));
  }
  o.check(worst_b <= 1e-6, "projected slab curvature vs B(x) " + num(worst_b, 3));
}

void dipolar_spectrum(Outcome& o) {
  double worst = 0.0, defect = 0.0;
  for (auto [t, f] : {std::pair{0.3, 1.1}, {1.7, -2.0}, {2.6, 0.4}}) {
    internal_gauge::DipolarConfig cfg;
    cfg.theta = t;
    cfg.phi = f;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(internal_gauge::dipolar_hamiltonian(cfg));
    Eigen::Vector4d expected = internal_gauge::dipolar_bo_energies(cfg);
    std::sort(expected.data(), expected.data() + 4);
    worst = std::max(worst, (es.eigenvalues() - expected).cwiseAbs().maxCoeff());
    defect = std::max(defect, internal_gauge::dipolar_factorization_defect(cfg));
  }
  o.check(worst <= 1e-12, "eigenvalue max diff " + num(worst, 3));
  o.check(defect <= 1e-10, "factorization defect " + num(defect, 3));
}

const char* kNames[kCriterionCount] = {
    "effective length at large gap",
    "degenerate gap reflection",
    "BO vs coupled transmission",
    "deflection identity",
    "gauge invariance of the current functional",
    "packet deflection table",
    "split-operator unitarity and order",
    "lens focusing",
    "uniform-field slab analytics",
    "holonomy closed forms",
    "pure-gauge curvature",
    "dipolar spectrum",
};

}  // namespace

CriterionResult run_criterion(int id) {
  if (id < 1 || id > kCriterionCount) throw ArgumentError("acceptance: criterion id out of range");
  CriterionResult res;
  res.id = id;
  res.name = kNames[id - 1];
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: effective_range(o, 1.0, t0); break;
      case 2: degenerate_gap(o); break;
      case 3: transmission_comparison(o); break;
      case 4: deflection_identity(o); break;
      case 5: flux_gauge(o); break;
      case 6: packet_deflection(o); break;
      case 7: tdse_unitarity(o); break;
      case 8: lens(o); break;
      case 9: ferroslab_checks(o, 5.0, t0); break;
      case 10: holonomy(o); break;
      case 11: curvature_checks(o); break;
      case 12: dipolar_spectrum(o); break;
    }
  } catch (const std::exception& e) {
    o.check(false, std::string("error: ") + e.what());
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (id == 3) o.check(res.seconds < 30.0, "runtime " + num(res.seconds, 3) + " s");
  if (id == 2) o.check(res.seconds < 1.0, "runtime " + num(res.seconds, 3) + " s");
  res.passed = o.passed;
  res.detail = o.detail.str();
  return res;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids,
                                            const std::function<void(const CriterionResult&)>& progress) {
  std::vector<int> todo = ids;
  if (todo.empty())
    for (int i = 1; i <= kCriterionCount; ++i) todo.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : todo) {
    out.push_back(run_criterion(id));
    if (progress) progress(out.back());
  }
  return out;
}

}  // namespace geomag::acceptance
