#include "geomag/tdse.hpp"

#include <fftw3.h>

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "geomag/errors.hpp"

namespace geomag::tdse {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double omega(double xi, double beta) { return 0.25 * kPi * (1.0 + std::tanh(beta * xi)); }

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void Grid2D::validate() const {
  if (!power_of_two(nx) || !power_of_two(ny)) throw ArgumentError("tdse grid: nx and ny must be powers of two");
  if (!(xi_max > xi_min) || !(eta_max > eta_min)) throw ArgumentError("tdse grid: empty range");
}

void TdseConfig::validate() const {
  grid.validate();
  if (!(dt > 0.0)) throw ArgumentError("tdse: dt must be > 0");
  if (!(sigma > 0.0)) throw ArgumentError("tdse: sigma must be > 0");
  if (!(beta > 0.0)) throw ArgumentError("tdse: beta must be > 0");
  if (!(delta >= 0.0)) throw ArgumentError("tdse: Delta must be >= 0");
  if (max_steps < 1 || output_every < 1) throw ArgumentError("tdse: step counts must be positive");
  if (profile == FluxProfile::Lens && !(focal > 0.0 && gamma > 0.0))
    throw ArgumentError("tdse: lens needs f > 0 and gamma > 0");
  if (!(xi0 > grid.xi_min + guard && xi0 < grid.xi_max - guard))
    throw ArgumentError("tdse: packet centre outside the box");
}

double TdseConfig::chi(double eta) const {
  if (profile == FluxProfile::Constant) return flux * eta;
  return eta * eta * k / std::sqrt(eta * eta + 4.0 * gamma * focal * focal);
}

double TdseConfig::chi_prime(double eta) const {
  if (profile == FluxProfile::Constant) return flux;
  const double s = eta * eta + 4.0 * gamma * focal * focal;
  return k * eta * (eta * eta + 8.0 * gamma * focal * focal) / (s * std::sqrt(s));
}

double SpinorField::norm() const {
  double acc = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) acc += std::norm(f[n]) + std::norm(g[n]);
  return acc * grid.dxi() * grid.deta();
}

Eigen::Matrix2cd potential_matrix(double xi, double eta, const TdseConfig& cfg) {
  const double om = omega(xi, cfg.beta);
  const double v = cfg.delta * std::cos(2.0 * om);
  const cplx v12 = std::exp(-I * cfg.chi(eta)) * cfg.delta * std::sin(2.0 * om);
  Eigen::Matrix2cd m;
  m << v, v12, std::conj(v12), -v;
  return m;
}

SpinorField initial_packet(const TdseConfig& cfg) {
  cfg.validate();
  const Grid2D& gr = cfg.grid;
  SpinorField field;
  field.grid = gr;
  field.f.assign(gr.size(), cplx(0.0));
  field.g.resize(gr.size());
  const double s2 = 4.0 * cfg.sigma * cfg.sigma;
  for (int i = 0; i < gr.nx; ++i) {
    const double dx = gr.xi(i) - cfg.xi0;
    const cplx phase = std::exp(I * cfg.k * gr.xi(i));
    for (int j = 0; j < gr.ny; ++j) {
      const double dy = gr.eta(j) - cfg.eta0;
      field.g[i * gr.ny + j] = std::exp(-(dx * dx + dy * dy) / s2) * phase;
    }
  }
  const double scale = 1.0 / std::sqrt(field.norm());
  for (auto& v : field.g) v *= scale;
  return field;
}

TrajectoryPoint measure(const SpinorField& field) {
  const Grid2D& gr = field.grid;
  const double da = gr.dxi() * gr.deta();
  double nf = 0, ng = 0, xf = 0, yf = 0, xg = 0, yg = 0;
  for (int i = 0; i < gr.nx; ++i) {
    const double x = gr.xi(i);
    for (int j = 0; j < gr.ny; ++j) {
      const double y = gr.eta(j);
      const std::size_t n = static_cast<std::size_t>(i) * gr.ny + j;
      const double pf = std::norm(field.f[n]), pg = std::norm(field.g[n]);
      nf += pf;
      ng += pg;
      xf += x * pf;
      yf += y * pf;
      xg += x * pg;
      yg += y * pg;
    }
  }
  TrajectoryPoint p;
  p.tau = field.tau;
  const double total = nf + ng;
  p.norm = total * da;
  p.xi_mean = (xf + xg) / total;
  p.eta_mean = (yf + yg) / total;
  p.pop_f = nf / total;
  p.pop_g = ng / total;
  p.xi_f = nf > 0 ? xf / nf : 0.0;
  p.eta_f = nf > 0 ? yf / nf : 0.0;
  p.xi_g = ng > 0 ? xg / ng : 0.0;
  p.eta_g = ng > 0 ? yg / ng : 0.0;
  return p;
}

struct Propagator::Impl {
  TdseConfig cfg;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  fftw_complex* scratch = nullptr;
  std::vector<double> kappa2;
  std::vector<double> v_diag;   // Delta cos 2 Omega per xi row
  std::vector<double> v_off;    // Delta sin 2 Omega per xi row
  std::vector<cplx> phase;      // exp(-i chi) per eta column
  double cached_dt = -1.0;
  std::vector<cplx> kin_half, kin_full;

  void prepare(double dt) {
    if (dt == cached_dt) return;
    const double inv_n = 1.0 / static_cast<double>(cfg.grid.size());
    kin_half.resize(kappa2.size());
    kin_full.resize(kappa2.size());
    for (std::size_t n = 0; n < kappa2.size(); ++n) {
      kin_half[n] = std::exp(-I * kappa2[n] * 0.5 * dt) * inv_n;
      kin_full[n] = std::exp(-I * kappa2[n] * dt) * inv_n;
    }
    cached_dt = dt;
  }

  void kinetic(std::vector<cplx>& psi, const std::vector<cplx>& factor) {
    auto* p = reinterpret_cast<fftw_complex*>(psi.data());
    fftw_execute_dft(forward, p, p);
    for (std::size_t n = 0; n < psi.size(); ++n) psi[n] *= factor[n];
    fftw_execute_dft(backward, p, p);
  }

  void potential(SpinorField& field, double dt) {
    const double d = cfg.delta;
    const double c = std::cos(d * dt);
    const double s = d > 0.0 ? std::sin(d * dt) / d : dt;
    const int ny = cfg.grid.ny;
    for (int i = 0; i < cfg.grid.nx; ++i) {
      const cplx a = c - I * s * v_diag[i];
      const cplx b = c + I * s * v_diag[i];
      for (int j = 0; j < ny; ++j) {
        const std::size_t n = static_cast<std::size_t>(i) * ny + j;
        const cplx off = -I * s * v_off[i] * phase[j];
        const cplx off_c = -I * s * v_off[i] * std::conj(phase[j]);
        const cplx f = field.f[n], g = field.g[n];
        field.f[n] = a * f + off * g;
        field.g[n] = off_c * f + b * g;
      }
    }
  }
};

Propagator::Propagator(const TdseConfig& cfg) : impl_(std::make_unique<Impl>()) {
  cfg.validate();
  Impl& m = *impl_;
  m.cfg = cfg;
  const Grid2D& gr = cfg.grid;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    m.scratch = fftw_alloc_complex(gr.size());
    m.forward = fftw_plan_dft_2d(gr.nx, gr.ny, m.scratch, m.scratch, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    m.backward = fftw_plan_dft_2d(gr.nx, gr.ny, m.scratch, m.scratch, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  auto wave = [](int idx, int n, double range) {
    const int freq = idx < n / 2 ? idx : idx - n;
    return 2.0 * kPi * freq / range;
  };
  m.kappa2.resize(gr.size());
  for (int i = 0; i < gr.nx; ++i) {
    const double kx = wave(i, gr.nx, gr.xi_max - gr.xi_min);
    for (int j = 0; j < gr.ny; ++j) {
      const double ky = wave(j, gr.ny, gr.eta_max - gr.eta_min);
      m.kappa2[static_cast<std::size_t>(i) * gr.ny + j] = kx * kx + ky * ky;
    }
  }
  m.v_diag.resize(gr.nx);
  m.v_off.resize(gr.nx);
  for (int i = 0; i < gr.nx; ++i) {
    const double om = omega(gr.xi(i), cfg.beta);
    m.v_diag[i] = cfg.delta * std::cos(2.0 * om);
    m.v_off[i] = cfg.delta * std::sin(2.0 * om);
  }
  m.phase.resize(gr.ny);
  for (int j = 0; j < gr.ny; ++j) m.phase[j] = std::exp(-I * cfg.chi(gr.eta(j)));
}

Propagator::~Propagator() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(impl_->forward);
  fftw_destroy_plan(impl_->backward);
  fftw_free(impl_->scratch);
}

void Propagator::step(SpinorField& field, double dt) { steps(field, dt, 1); }

void Propagator::steps(SpinorField& field, double dt, long n) {
  if (n < 1) return;
  Impl& m = *impl_;
  if (field.f.size() != m.cfg.grid.size() || field.g.size() != m.cfg.grid.size())
    throw ArgumentError("Propagator: field does not match the grid");
  m.prepare(dt);
  m.kinetic(field.f, m.kin_half);
  m.kinetic(field.g, m.kin_half);
  for (long s = 0; s < n; ++s) {
    m.potential(field, dt);
    const auto& factor = s + 1 < n ? m.kin_full : m.kin_half;
    m.kinetic(field.f, factor);
    m.kinetic(field.g, factor);
  }
  field.tau += dt * static_cast<double>(n);
}

namespace {

double edge_norm(const SpinorField& field, double guard) {
  const Grid2D& gr = field.grid;
  const double da = gr.dxi() * gr.deta();
  double acc = 0.0;
  for (int i = 0; i < gr.nx; ++i) {
    const double x = gr.xi(i);
    const bool edge_x = x < gr.xi_min + guard || x >= gr.xi_max - guard;
    for (int j = 0; j < gr.ny; ++j) {
      const double y = gr.eta(j);
      if (edge_x || y < gr.eta_min + guard || y >= gr.eta_max - guard) {
        const std::size_t n = static_cast<std::size_t>(i) * gr.ny + j;
        acc += std::norm(field.f[n]) + std::norm(field.g[n]);
      }
    }
  }
  return acc * da;
}

void check_wrap(const SpinorField& field, const TdseConfig& cfg) {
  const double e = edge_norm(field, cfg.guard);
  if (e > cfg.wrap_tolerance) {
    std::ostringstream msg;
    msg << "tdse: norm " << e << " inside the edge band at tau = " << field.tau << " (wrap-around)";
    throw WrapAroundError(msg.str(), e);
  }
}

}  // namespace

PropagationResult propagate(const TdseConfig& cfg, const Observer& observer) {
  PropagationResult res;
  res.final = initial_packet(cfg);
  Propagator prop(cfg);
  auto record = [&] {
    check_wrap(res.final, cfg);
    const TrajectoryPoint p = measure(res.final);
    res.trajectory.push_back(p);
    if (observer) observer(res.final, p);
    return p;
  };
  TrajectoryPoint p = record();
  while (res.steps < cfg.max_steps && p.xi_mean < cfg.xi_stop) {
    const long n = std::min<long>(cfg.output_every, cfg.max_steps - res.steps);
    prop.steps(res.final, cfg.dt, n);
    res.steps += n;
    p = record();
  }
  return res;
}

AdiabaticField adiabatic_amplitudes(const SpinorField& field, const TdseConfig& cfg) {
  const Grid2D& gr = field.grid;
  AdiabaticField out;
  out.f.resize(gr.size());
  out.g.resize(gr.size());
  for (int i = 0; i < gr.nx; ++i) {
    const double om = omega(gr.xi(i), cfg.beta);
    const double c = std::cos(om), s = std::sin(om);
    for (int j = 0; j < gr.ny; ++j) {
      const cplx e = std::exp(-I * cfg.chi(gr.eta(j)));
      const std::size_t n = static_cast<std::size_t>(i) * gr.ny + j;
      out.f[n] = field.f[n] * c + e * s * field.g[n];
      out.g[n] = field.g[n] * c - std::conj(e) * s * field.f[n];
    }
  }
  return out;
}

namespace {

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientPropagationError("deflection fit: window has no extent in xi");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.xi_center = mx;
  fit.eta_center = my;
  fit.points = static_cast<int>(n);
  double r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = ys[i] - (fit.intercept + fit.slope * xs[i]);
    r += d * d;
  }
  fit.residual = std::sqrt(r / n);
  return fit;
}

}  // namespace

LineFit deflection_from_trajectory(const Trajectory& traj, double xi_start) {
  std::vector<double> xs, ys;
  for (const auto& p : traj) {
    if (p.xi_mean >= xi_start) {
      xs.push_back(p.xi_mean);
      ys.push_back(p.eta_mean);
    }
  }
  if (xs.size() < 3) throw InsufficientPropagationError("deflection: fewer than 3 points in the free-flight window");
  return fit_line(xs, ys);
}

double classical_induction(double xi, double eta, const TdseConfig& cfg) {
  const double om = omega(xi, cfg.beta);
  const double c = std::cosh(cfg.beta * xi);
  const double dom = 0.25 * kPi * cfg.beta / (c * c);
  return cfg.chi_prime(eta) * std::sin(2.0 * om) * dom;
}

ClassicalPath classical_trajectory(double k, const TdseConfig& cfg, double eta0, double xi_end) {
  using State = std::array<double, 4>;
  namespace odeint = boost::numeric::odeint;
  auto rhs = [&](const State& s, State& ds, double) {
    const double b = classical_induction(s[0], s[1], cfg);
    ds[0] = s[2];
    ds[1] = s[3];
    ds[2] = 2.0 * s[3] * b;
    ds[3] = -2.0 * s[2] * b;
  };
  auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
  State s{cfg.xi0, eta0, 2.0 * k, 0.0};
  const double v0 = 2.0 * k;
  double t = 0.0, dt = 1e-4;
  const double t_max = 100.0 * (xi_end - cfg.xi0) / v0;
  ClassicalPath path;
  path.points.push_back({t, s[0], s[1], s[2], s[3]});
  while (s[0] < xi_end && t < t_max && s[0] > cfg.xi0 - 1.0) {
    dt = std::min(dt, 1e-3);
    if (stepper.try_step(rhs, s, t, dt) == odeint::success) {
      path.points.push_back({t, s[0], s[1], s[2], s[3]});
      path.speed_drift = std::max(path.speed_drift, std::abs(std::hypot(s[2], s[3]) / v0 - 1.0));
    }
  }
  const auto& last = path.points.back();
  path.tan_theta = last.v_eta / last.v_xi;
  return path;
}

std::array<double, 2> focal_point(const std::vector<LineFit>& fits) {
  if (fits.size() < 2) throw ArgumentError("focal_point: need at least 2 lines");
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  for (const auto& fit : fits) {
    const Eigen::Vector2d d = Eigen::Vector2d(1.0, fit.slope).normalized();
    const Eigen::Matrix2d proj = Eigen::Matrix2d::Identity() - d * d.transpose();
    a += proj;
    b += proj * Eigen::Vector2d(fit.xi_center, fit.eta_center);
  }
  const Eigen::Vector2d p = a.fullPivLu().solve(b);
  return {p[0], p[1]};
}

LensResult lens_run(const std::vector<double>& impacts, const TdseConfig& cfg) {
  if (impacts.size() < 2) throw ArgumentError("lens_run: need at least 2 impact parameters");
  LensResult res;
  res.impacts = impacts;
  for (double b : impacts) {
    TdseConfig c = cfg;
    c.profile = FluxProfile::Lens;
    c.eta0 = b;
    auto run = propagate(c);
    res.fits.push_back(deflection_from_trajectory(run.trajectory, c.free_flight_xi));
    res.trajectories.push_back(std::move(run.trajectory));
  }
  const auto p = focal_point(res.fits);
  res.focal_xi = p[0];
  res.focal_eta = p[1];
  return res;
}

LensResult classical_lens(const std::vector<double>& impacts, const TdseConfig& cfg, double xi_start) {
  if (impacts.size() < 2) throw ArgumentError("classical_lens: need at least 2 impact parameters");
  LensResult res;
  res.impacts = impacts;
  TdseConfig c = cfg;
  c.profile = FluxProfile::Lens;
  for (double b : impacts) {
    const auto path = classical_trajectory(c.k, c, b);
    std::vector<double> xs, ys;
    for (const auto& p : path.points) {
      if (p.xi >= xi_start) {
        xs.push_back(p.xi);
        ys.push_back(p.eta);
      }
    }
    if (xs.size() < 3) throw InsufficientPropagationError("classical_lens: path never left the lens");
    res.fits.push_back(fit_line(xs, ys));
  }
  const auto p = focal_point(res.fits);
  res.focal_xi = p[0];
  res.focal_eta = p[1];
  return res;
}

}  // namespace geomag::tdse
