#include "geomag/slab2d.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "geomag/errors.hpp"
#include "geomag/ode.hpp"

namespace geomag::slab2d {

namespace {

constexpr double kPi = std::numbers::pi;

double sin2omega(double x, const Config& cfg) { return std::cos(0.5 * kPi * std::tanh(cfg.beta * x)); }
double cos2omega(double x, const Config& cfg) { return -std::sin(0.5 * kPi * std::tanh(cfg.beta * x)); }
double sech2(double x, const Config& cfg) {
  const double c = std::cosh(cfg.beta * x);
  return 1.0 / (c * c);
}

}  // namespace

double Config::cutoff() const { return std::atanh(1.0 - 1e-12) / beta; }

void Config::validate() const {
  if (!(beta > 0.0)) throw ArgumentError("slab: beta must be > 0");
  if (!std::isfinite(b0) || !std::isfinite(length)) throw ArgumentError("slab: B0 and L must be finite");
  if (!(delta > 0.0)) throw ArgumentError("slab: Delta must be > 0");
  if (!(mass > 0.0)) throw ArgumentError("slab: mass must be > 0");
}

double omega_profile(double x, const Config& cfg) { return 0.25 * kPi * (1.0 + std::tanh(cfg.beta * x)); }

double omega_derivative(double x, const Config& cfg) { return 0.25 * kPi * cfg.beta * sech2(x, cfg); }

std::array<Eigen::Matrix2cd, 2> vector_potential(double x, double y, const Config& cfg) {
  const double phi = cfg.flux();
  const double om = omega_profile(x, cfg);
  const double dom = omega_derivative(x, cfg);
  const double s2 = std::pow(std::sin(om), 2);
  const double sin2 = sin2omega(x, cfg);
  const cplx em = std::exp(-I * phi * y);
  Eigen::Matrix2cd ax, ay;
  ax << 0.0, -I * dom * em, I * dom * std::conj(em), 0.0;
  ay << -phi * s2, -0.5 * phi * em * sin2, -0.5 * phi * std::conj(em) * sin2, phi * s2;
  return {ax, ay};
}

double induction(double x, const Config& cfg, int channel) {
  const double b = cfg.flux() * sin2omega(x, cfg) * omega_derivative(x, cfg);
  return channel == 0 ? -b : b;
}

double total_flux(const Config& cfg) {
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity();
  auto f = [&](double x) { return std::abs(induction(x, cfg, 1)); };
  // Split at the centre so each half sees a monotone tail.
  return gauss_kronrod<double, 61>::integrate(f, -inf, 0.0, 15, 1e-14) +
         gauss_kronrod<double, 61>::integrate(f, 0.0, inf, 15, 1e-14);
}

double bo_vector_potential(double x, const Config& cfg) {
  return cfg.flux() * std::pow(std::sin(omega_profile(x, cfg)), 2);
}

double induced_scalar(double x, const Config& cfg) {
  const double phi = cfg.flux();
  const double s = sech2(x, cfg);
  return (2.0 * phi * phi * (std::cos(kPi * std::tanh(cfg.beta * x)) + 1.0) +
          kPi * kPi * cfg.beta * cfg.beta * s * s) /
         16.0;
}

double effective_potential(double x, const Config& cfg) {
  const double a0 = bo_vector_potential(x, cfg);
  return a0 * a0 + induced_scalar(x, cfg);
}

Eigen::Matrix2cd unitary(double x, double y, const Config& cfg) {
  const double om = omega_profile(x, cfg);
  const double c = std::cos(om), s = std::sin(om);
  const cplx e = std::exp(I * cfg.flux() * y);
  Eigen::Matrix2cd u;
  u << c, -s * std::conj(e), s * e, c;
  return u;
}

gauge::GaugeConnection connection(const Config& cfg) {
  return gauge::GaugeConnection(2, 2, [cfg](const RVector& p) {
    const auto a = vector_potential(p[0], p[1], cfg);
    return std::vector<CMatrix>{a[0], a[1]};
  });
}

gauge::UnitaryFamily unitary_family(const Config& cfg) {
  return gauge::UnitaryFamily(2, 2, [cfg](const RVector& p) -> CMatrix { return unitary(p[0], p[1], cfg); });
}

double BoResult::transmission() const { return transmitting ? k_out * std::norm(t) / k : 0.0; }

namespace {

struct BoRun {
  cplx r, t;
};

BoRun bo_run(double k, const Config& cfg, double rtol, bool transmitting, double k_out) {
  const double a = cfg.cutoff();
  ode::Coupling coupling = [&](double x, CMatrix& p) { p(0, 0) = effective_potential(x, cfg) - k * k; };
  CMatrix seed(2, 1);
  ode::Solutions s;
  if (transmitting) {
    const cplx e = std::exp(I * k_out * a);
    seed << e, I * k_out * e;
    s = ode::Solutions(a, seed);
  } else {
    seed << 1.0, -k_out;
    s = ode::Solutions(a, seed);
    s.log_scale[0] = -k_out * a;
  }
  ode::Options opts;
  opts.rtol = rtol;
  ode::integrate(coupling, s, -a, opts);
  const cplx f = s.y(0, 0), df = s.y(1, 0);
  const cplx ein = std::exp(-I * k * a);  // e^{ikx} at x = -a
  const cplx amp_in = (I * k * f + df) / (2.0 * I * k * ein);
  const cplx amp_out = (I * k * f - df) / (2.0 * I * k / ein);
  return BoRun{amp_out / amp_in, std::exp(-s.log_scale[0]) / amp_in};
}

}  // namespace

BoResult bo_scatter_normal(double k, const Config& cfg, const SolverOptions& opts) {
  cfg.validate();
  if (!(k > 0.0)) throw ArgumentError("bo_scatter_normal: k must be > 0");
  const double phi = cfg.flux();
  const double gap = k * k - phi * phi;
  if (std::abs(gap) < 1e-12 * std::max(1.0, k * k))
    throw ThresholdError("bo_scatter_normal: k equals the transmission threshold Phi");
  BoResult res;
  res.k = k;
  res.transmitting = gap > 0.0;
  res.k_out = std::sqrt(std::abs(gap));
  const BoRun fine = bo_run(k, cfg, opts.rtol, res.transmitting, res.k_out);
  const BoRun finer = bo_run(k, cfg, opts.rtol / 32.0, res.transmitting, res.k_out);
  res.achieved = std::max(std::abs(fine.r - finer.r), std::abs(fine.t - finer.t));
  if (!(res.achieved <= opts.agreement)) {
    std::ostringstream msg;
    msg << "bo_scatter_normal: no agreement under step halving (change " << res.achieved << ")";
    throw AccuracyError(msg.str(), res.achieved);
  }
  res.r = finer.r;
  res.t = finer.t;
  return res;
}

namespace {

void coupled_matrix(double x, double energy, const Config& cfg, CMatrix& p) {
  const double c = 2.0 * cfg.mass;
  const double phi = cfg.flux();
  const double s = sin2omega(x, cfg);
  const double co = cos2omega(x, cfg);
  p(0, 0) = phi * phi + c * cfg.delta * co - c * energy;
  p(0, 1) = c * cfg.delta * s;
  p(1, 0) = p(0, 1);
  p(1, 1) = -c * cfg.delta * co - c * energy;
}

// Solutions of one half-line, stored at segment boundaries. The closed
// (growing) columns are orthonormalized after every segment and the open
// columns are projected off them, which keeps the open columns from being
// swamped by the growing modes. post = pre * g at each boundary.
struct SideRun {
  std::vector<double> xs;
  std::vector<CMatrix> basis;
  std::vector<RVector> ls;
  std::vector<RVector> ls_pre;
  std::vector<CMatrix> g;
};

CMatrix stabilize(CMatrix& y, RVector& ls, const std::vector<int>& closed, const std::vector<int>& open) {
  const Eigen::Index n = y.cols();
  CMatrix g = CMatrix::Identity(n, n);
  auto normalize = [&](int i) {
    const double nn = y.col(i).norm();
    y.col(i) /= nn;
    g.col(i) /= nn;
    ls[i] += std::log(nn);
  };
  std::vector<int> done;
  for (int i : closed) {
    for (int j : done) {
      const cplx m = y.col(j).dot(y.col(i));
      y.col(i) -= m * y.col(j);
      g.col(i) -= m * g.col(j);
    }
    normalize(i);
    done.push_back(i);
  }
  for (int i : open) {
    for (int j : done) {
      const cplx m = y.col(j).dot(y.col(i));
      y.col(i) -= m * y.col(j);
      g.col(i) -= m * g.col(j);
    }
    normalize(i);
  }
  return g;
}

SideRun integrate_side(const ode::Coupling& coupling, double x0, double x1, const CMatrix& seed,
                       const RVector& ls0, const std::vector<int>& closed, double segment, double rtol) {
  std::vector<int> open;
  for (int i = 0; i < seed.cols(); ++i)
    if (std::find(closed.begin(), closed.end(), i) == closed.end()) open.push_back(i);
  SideRun run;
  ode::Solutions s(x0, seed);
  s.log_scale = ls0;
  auto record = [&](double x) {
    run.xs.push_back(x);
    run.ls_pre.push_back(s.log_scale);
    run.g.push_back(stabilize(s.y, s.log_scale, closed, open));
    run.basis.push_back(s.y);
    run.ls.push_back(s.log_scale);
  };
  record(x0);
  const int nseg = std::max(1, static_cast<int>(std::ceil(std::abs(x1 - x0) / segment)));
  ode::Options opts;
  opts.rtol = rtol;
  opts.h_max = segment;
  for (int b = 1; b <= nseg; ++b) {
    const double xb = b == nseg ? x1 : x0 + (x1 - x0) * static_cast<double>(b) / nseg;
    ode::integrate(coupling, s, xb, opts);
    record(xb);
  }
  return run;
}

// Physical [f; f'] at every boundary given normalized coefficients at the last one.
std::vector<Eigen::Vector4cd> back_substitute(const SideRun& run, CVector c, double log_factor) {
  std::vector<Eigen::Vector4cd> psi(run.xs.size());
  for (std::size_t b = run.xs.size(); b-- > 0;) {
    psi[b] = std::exp(log_factor) * (run.basis[b] * c);
    CVector pre = run.g[b] * c;
    if (b > 0) {
      for (Eigen::Index i = 0; i < pre.size(); ++i) pre[i] *= std::exp(run.ls[b - 1][i] - run.ls_pre[b][i]);
    }
    c = pre;
  }
  return psi;
}

struct ChannelSetup {
  double k = 0.0;
  double kappa = 0.0;
  bool left_open = false;
  double kp = 0.0;
  bool right_ground_open = false;
  double kappap = 0.0;
  bool right_excited_open = false;
};

ChannelSetup classify(double energy, const Config& cfg) {
  const double c = 2.0 * cfg.mass;
  const double phi = cfg.flux();
  const double k2 = c * (energy + cfg.delta);
  if (!(k2 > 0.0)) throw ArgumentError("coupled_scatter: energy must exceed -Delta (open ground channel)");
  const double scale = std::max({1.0, k2, phi * phi, c * cfg.delta});
  const double left = c * (cfg.delta - energy) + phi * phi;
  const double right_ground = k2 - phi * phi;
  const double right_excited = c * (cfg.delta - energy);
  auto near = [&](double v) { return std::abs(v) < 1e-9 * scale; };
  if (near(left)) throw ThresholdError("coupled_scatter: E within 1e-9 of Delta + Phi^2/2m (regime boundary)");
  if (near(right_ground)) throw ThresholdError("coupled_scatter: k within 1e-9 of the transmission threshold Phi");
  if (near(right_excited)) throw ThresholdError("coupled_scatter: E within 1e-9 of the excited threshold Delta");
  ChannelSetup ch;
  ch.k = std::sqrt(k2);
  ch.left_open = left < 0.0;
  ch.kappa = std::sqrt(std::abs(left));
  ch.right_ground_open = right_ground > 0.0;
  ch.kp = std::sqrt(std::abs(right_ground));
  ch.right_excited_open = right_excited < 0.0;
  ch.kappap = std::sqrt(std::abs(right_excited));
  return ch;
}

struct CoupledRun {
  SlabAmplitudes amps;
  std::vector<double> xs;
  std::vector<Eigen::Vector4cd> psi;
};

CoupledRun coupled_run(double energy, const Config& cfg, const ChannelSetup& ch, double rtol, double segment) {
  const double a = cfg.cutoff();
  ode::Coupling coupling = [&](double x, CMatrix& p) { coupled_matrix(x, energy, cfg, p); };

  // Left seeds at x = -a: incoming and outgoing ground waves, excited mode.
  CMatrix left(4, 3);
  RVector lls = RVector::Zero(3);
  std::vector<int> lclosed;
  {
    const cplx ein = std::exp(-I * ch.k * a), eout = std::exp(I * ch.k * a);
    left.col(0) << 0.0, ein, 0.0, I * ch.k * ein;
    left.col(1) << 0.0, eout, 0.0, -I * ch.k * eout;
    if (ch.left_open) {
      const cplx e = std::exp(I * ch.kappa * a);  // e^{-i k2 x} at -a
      left.col(2) << e, 0.0, -I * ch.kappa * e, 0.0;
    } else {
      left.col(2) << 1.0, 0.0, ch.kappa, 0.0;
      lls[2] = -ch.kappa * a;
      lclosed.push_back(2);
    }
  }
  // Right seeds at x = +a: ground (f1) and excited (f2) channels.
  CMatrix right(4, 2);
  RVector rls = RVector::Zero(2);
  std::vector<std::pair<double, int>> rclosed_rates;
  if (ch.right_ground_open) {
    const cplx e = std::exp(I * ch.kp * a);
    right.col(0) << e, 0.0, I * ch.kp * e, 0.0;
  } else {
    right.col(0) << 1.0, 0.0, -ch.kp, 0.0;
    rls[0] = -ch.kp * a;
    rclosed_rates.push_back({ch.kp, 0});
  }
  if (ch.right_excited_open) {
    const cplx e = std::exp(I * ch.kappap * a);
    right.col(1) << 0.0, e, 0.0, I * ch.kappap * e;
  } else {
    right.col(1) << 0.0, 1.0, 0.0, -ch.kappap;
    rls[1] = -ch.kappap * a;
    rclosed_rates.push_back({ch.kappap, 1});
  }
  std::sort(rclosed_rates.begin(), rclosed_rates.end(), [](auto p, auto q) { return p.first > q.first; });
  std::vector<int> rclosed;
  for (auto& [rate, idx] : rclosed_rates) rclosed.push_back(idx);

  const SideRun lrun = integrate_side(coupling, -a, 0.0, left, lls, lclosed, segment, rtol);
  const SideRun rrun = integrate_side(coupling, a, 0.0, right, rls, rclosed, segment, rtol);

  const CMatrix& yl = lrun.basis.back();
  const CMatrix& yr = rrun.basis.back();
  Eigen::Matrix4cd m;
  m.col(0) = yl.col(1);
  m.col(1) = yl.col(2);
  m.col(2) = -yr.col(0);
  m.col(3) = -yr.col(1);
  const Eigen::Vector4cd rhs = -yl.col(0);
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(m);
  const double cond = svd.singularValues()(0) / svd.singularValues()(3);
  if (!(cond <= 1e12)) {
    std::ostringstream msg;
    msg << "coupled_scatter: matching matrix condition number " << cond << " exceeds 1e12";
    throw ConditioningError(msg.str(), cond);
  }
  const Eigen::Vector4cd sol = m.fullPivLu().solve(rhs);

  const RVector& lsl = lrun.ls.back();
  const RVector& lsr = rrun.ls.back();
  const double scale_in = lsl[0];
  CVector cl(3), cr(2);
  cl << 1.0, sol[0], sol[1];
  cr << sol[2], sol[3];

  CoupledRun out;
  const auto psil = back_substitute(lrun, cl, scale_in);
  const auto psir = back_substitute(rrun, cr, scale_in);
  const Eigen::Vector4cd psi0 = psil.back();

  SlabAmplitudes& amps = out.amps;
  amps.energy = energy;
  amps.k = ch.k;
  amps.kappa = ch.kappa;
  amps.left_excited_open = ch.left_open;
  amps.k_prime = ch.kp;
  amps.right_ground_open = ch.right_ground_open;
  amps.kappa_prime = ch.kappap;
  amps.right_excited_open = ch.right_excited_open;
  amps.regime = ch.left_open ? Regime::Open : Regime::Closed;
  amps.r11 = sol[0] * std::exp(scale_in - lsl[1]);
  // Closed-channel amplitudes are reported at the matching point x = 0,
  // where the asymptotic forms exp(+-kappa x) equal one.
  amps.r12 = ch.left_open ? sol[1] * std::exp(scale_in - lsl[2]) : psi0[0];
  amps.t12 = ch.right_ground_open ? sol[2] * std::exp(scale_in - lsr[0]) : psi0[0];
  amps.t11 = ch.right_excited_open ? sol[3] * std::exp(scale_in - lsr[1]) : psi0[1];

  for (std::size_t i = 0; i < lrun.xs.size(); ++i) {
    out.xs.push_back(lrun.xs[i]);
    out.psi.push_back(psil[i]);
  }
  // Right boundaries run from +a down to 0; skip the duplicate point at 0.
  for (std::size_t i = rrun.xs.size() - 1; i-- > 0;) {
    out.xs.push_back(rrun.xs[i]);
    out.psi.push_back(psir[i]);
  }
  return out;
}

}  // namespace

SlabSolution coupled_scatter(double energy, const Config& cfg, const SolverOptions& opts) {
  cfg.validate();
  const ChannelSetup ch = classify(energy, cfg);
  const CoupledRun fine = coupled_run(energy, cfg, ch, opts.rtol, opts.segment);
  CoupledRun finer = coupled_run(energy, cfg, ch, opts.rtol / 32.0, opts.segment);
  auto diff = [](cplx a, cplx b) { return std::abs(a - b); };
  double achieved = std::max(diff(fine.amps.r11, finer.amps.r11), diff(fine.amps.t12, finer.amps.t12));
  if (ch.left_open) achieved = std::max(achieved, diff(fine.amps.r12, finer.amps.r12));
  if (ch.right_excited_open) achieved = std::max(achieved, diff(fine.amps.t11, finer.amps.t11));
  if (!(achieved <= opts.agreement)) {
    std::ostringstream msg;
    msg << "coupled_scatter: no agreement under step halving (change " << achieved << ")";
    throw AccuracyError(msg.str(), achieved);
  }
  SlabSolution sol;
  sol.amps_ = finer.amps;
  sol.amps_.achieved = achieved;
  sol.cfg_ = cfg;
  sol.a_ = cfg.cutoff();
  sol.rtol_ = opts.rtol / 32.0;
  sol.xs_ = std::move(finer.xs);
  sol.psi_ = std::move(finer.psi);
  return sol;
}

Eigen::Vector4cd SlabSolution::at(double x) const {
  if (!(std::abs(x) <= a_ * (1.0 + 1e-12))) throw DomainError("SlabSolution::at: x outside the integrated range");
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  if (i == xs_.size()) i = xs_.size() - 1;
  if (i > 0 && std::abs(xs_[i - 1] - x) < std::abs(xs_[i] - x)) --i;
  if (xs_[i] == x) return psi_[i];
  const double energy = amps_.energy;
  const Config cfg = cfg_;
  ode::Coupling coupling = [&](double xx, CMatrix& p) { coupled_matrix(xx, energy, cfg, p); };
  ode::Solutions s(xs_[i], CMatrix(psi_[i]));
  ode::Options opts;
  opts.rtol = rtol_;
  opts.h_max = 0.05;
  ode::integrate(coupling, s, x, opts);
  return std::exp(s.log_scale[0]) * s.y.col(0);
}

double transmission_coefficient(const SlabAmplitudes& amps, double flux) {
  if (!(amps.k > std::abs(flux))) throw DomainError("transmission_coefficient: undefined for k <= Phi");
  return std::norm(amps.t12) * std::sqrt(amps.k * amps.k - flux * flux) / amps.k;
}

double deflection_angle(double k, double flux) {
  if (!(k > std::abs(flux))) throw DomainError("deflection_angle: requires k > |Phi|");
  return std::abs(flux) / std::sqrt(k * k - flux * flux);
}

Eigen::Vector2d current(const SlabSolution& sol, double x, double y) {
  const Eigen::Vector4cd v = sol.at(x);
  const double phi = sol.config().flux();
  const double m = sol.config().mass;
  const cplx e = std::exp(-I * phi * y);
  const Eigen::Vector2cd g(e * v[0], v[1]);
  const Eigen::Vector2cd gx(e * v[2], v[3]);
  const Eigen::Vector2cd gy(-I * phi * e * v[0], 0.0);
  return Eigen::Vector2d(g.dot(gx).imag() / m, g.dot(gy).imag() / m);
}

namespace {

std::array<Eigen::Vector2d, 2> adiabatic_from_state(const Eigen::Vector4cd& v, double x, double y,
                                                    const Config& cfg) {
  const double phi = cfg.flux();
  const double m = cfg.mass;
  const cplx e = std::exp(-I * phi * y);
  const Eigen::Vector2cd g(e * v[0], v[1]);
  const Eigen::Vector2cd gx(e * v[2], v[3]);
  const Eigen::Vector2cd gy(-I * phi * e * v[0], 0.0);
  const Eigen::Matrix2cd ud = unitary(x, y, cfg).adjoint();
  const double om = omega_profile(x, cfg);
  const double dom = omega_derivative(x, cfg);
  const double c = std::cos(om), s = std::sin(om);
  Eigen::Matrix2cd dud_x, dud_y;
  dud_x << -s, c * e, -c * std::conj(e), -s;
  dud_x *= dom;
  dud_y << 0.0, -I * phi * s * e, -I * phi * s * std::conj(e), 0.0;
  const Eigen::Vector2cd f = ud * g;
  const Eigen::Vector2cd fx = dud_x * g + ud * gx;
  const Eigen::Vector2cd fy = dud_y * g + ud * gy;
  const auto a = vector_potential(x, y, cfg);
  Eigen::Vector2d jt(f.dot(fx).imag() / m, f.dot(fy).imag() / m);
  Eigen::Vector2d ja(-f.dot(a[0] * f).real() / m, -f.dot(a[1] * f).real() / m);
  return {jt, ja};
}

}  // namespace

std::array<Eigen::Vector2d, 2> adiabatic_current(const SlabSolution& sol, double x, double y) {
  return adiabatic_from_state(sol.at(x), x, y, sol.config());
}

double flux_formula(const SlabAmplitudes& amps, const Config& cfg, double w) {
  double t = std::norm(amps.t12);
  if (amps.regime == Regime::Open) t -= std::norm(amps.r12);
  return 2.0 * w * cfg.flux() * t / cfg.mass;
}

FluxResult flux_functional(const SlabSolution& sol, double w) {
  if (!(w > 0.0)) throw ArgumentError("flux_functional: w must be > 0");
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const Config& cfg = sol.config();
  const double a = sol.cutoff();
  FluxResult res;
  res.w = w;
  res.formula = flux_formula(sol.amplitudes(), cfg, w);

  // Vertical segments: up along x = -a, down along x = +a.
  auto vertical = [&](double x, double sign) -> Eigen::Vector3d {
    const Eigen::Vector4cd v = sol.at(x);
    const Config& c = cfg;
    auto comp = [&](int which) {
      auto f = [&](double y) {
        if (which == 0) {
          const double phi = c.flux();
          const cplx e = std::exp(-I * phi * y);
          const Eigen::Vector2cd g(e * v[0], v[1]);
          const Eigen::Vector2cd gy(-I * phi * e * v[0], 0.0);
          return g.dot(gy).imag() / c.mass;
        }
        return adiabatic_from_state(v, x, y, c)[which - 1][1];
      };
      return sign * gauss_kronrod<double, 31>::integrate(f, -w, w, 10, 1e-14);
    };
    return Eigen::Vector3d(comp(0), comp(1), comp(2));
  };
  // Horizontal segments: along y = +w from -a to a, back along y = -w.
  auto horizontal = [&](double y, double sign) -> Eigen::Vector3d {
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    const int n = std::max(1, static_cast<int>(std::ceil(2.0 * a / 0.05)));
    const double h = 2.0 * a / n;
    const auto& nodes = gauss<double, 10>::abscissa();
    const auto& weights = gauss<double, 10>::weights();
    for (int i = 0; i < n; ++i) {
      const double mid = -a + (i + 0.5) * h;
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        for (double side : {-1.0, 1.0}) {
          if (nodes[q] == 0.0 && side > 0.0) continue;
          const double x = mid + side * nodes[q] * 0.5 * h;
          const Eigen::Vector4cd v = sol.at(x);
          const double phi = cfg.flux();
          const cplx e = std::exp(-I * phi * y);
          const Eigen::Vector2cd g(e * v[0], v[1]);
          const Eigen::Vector2cd gx(e * v[2], v[3]);
          const auto ad = adiabatic_from_state(v, x, y, cfg);
          const double wq = weights[q] * 0.5 * h;
          acc += wq * Eigen::Vector3d(g.dot(gx).imag() / cfg.mass, ad[0][0], ad[1][0]);
        }
      }
    }
    return sign * acc;
  };
  const Eigen::Vector3d total =
      vertical(-a, 1.0) + horizontal(w, 1.0) + vertical(a, -1.0) + horizontal(-w, -1.0);
  res.diabatic = total[0];
  res.adiabatic_current = total[1];
  res.gauge_part = total[2];
  return res;
}

std::vector<CurrentSample> current_field(const SlabSolution& sol, const std::vector<double>& xs,
                                         const std::vector<double>& ys) {
  std::vector<CurrentSample> out;
  out.reserve(xs.size() * ys.size());
  const double phi = sol.config().flux();
  const double m = sol.config().mass;
  for (double x : xs) {
    const Eigen::Vector4cd v = sol.at(x);
    for (double y : ys) {
      const cplx e = std::exp(-I * phi * y);
      const Eigen::Vector2cd g(e * v[0], v[1]);
      const Eigen::Vector2cd gx(e * v[2], v[3]);
      const Eigen::Vector2cd gy(-I * phi * e * v[0], 0.0);
      out.push_back({x, y, g.dot(gx).imag() / m, g.dot(gy).imag() / m});
    }
  }
  return out;
}

double divergence_residual(const SlabSolution& sol, const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 3 || ys.size() < 3) throw ArgumentError("divergence_residual: grid needs >= 3 points per axis");
  const auto field = current_field(sol, xs, ys);
  const std::size_t ny = ys.size();
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      const double djx = (field[(i + 1) * ny + j].jx - field[(i - 1) * ny + j].jx) / (xs[i + 1] - xs[i - 1]);
      const double djy = (field[i * ny + j + 1].jy - field[i * ny + j - 1].jy) / (ys[j + 1] - ys[j - 1]);
      worst = std::max(worst, std::abs(djx + djy));
    }
  }
  return worst;
}

}  // namespace geomag::slab2d
