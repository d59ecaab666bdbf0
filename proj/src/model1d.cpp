#include "geomag/model1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geomag/errors.hpp"

namespace geomag::model1d {

void Config::validate() const {
  if (!(delta >= 0.0)) throw ArgumentError("model1d: delta must be >= 0");
  if (!(wall > 0.0)) throw ArgumentError("model1d: wall position L must be > 0");
  if (!(mass > 0.0)) throw ArgumentError("model1d: mass must be > 0");
  if (!std::isfinite(a0) || !std::isfinite(a1)) throw ArgumentError("model1d: A0, A1 must be finite");
}

namespace {

Eigen::Matrix2cd field_matrix(const Config& cfg) {
  Eigen::Matrix2cd a;
  a << cfg.a0, cfg.a1, cfg.a1, -cfg.a0;
  return a;
}

// g = q cot(qL) with q^2 = k^2 - A1^2, continued through q = 0.
double log_derivative(double k, double a1, double wall) {
  const double q2 = k * k - a1 * a1;
  const double s = q2 * wall * wall;
  if (std::abs(s) < 1e-3) return (1.0 - s / 3.0 - s * s / 45.0 - 2.0 * s * s * s / 945.0) / wall;
  if (q2 > 0.0) {
    const double q = std::sqrt(q2);
    return q / std::tan(q * wall);
  }
  const double q = std::sqrt(-q2);
  return q / std::tanh(q * wall);
}

}  // namespace

gauge::GaugeConnection connection(const Config& cfg) {
  const Eigen::Matrix2cd a = field_matrix(cfg);
  return gauge::GaugeConnection(1, 2, [a](const RVector&) { return std::vector<CMatrix>{a}; });
}

Eigen::Matrix2cd constant_field_transport(const Config& cfg, double x) {
  const double amp = std::hypot(cfg.a0, cfg.a1);
  Eigen::Matrix2cd u = std::cos(amp * x) * Eigen::Matrix2cd::Identity();
  if (amp > 0.0) u += I * (std::sin(amp * x) / amp) * field_matrix(cfg);
  return u;
}

cplx bo_reflection(double k, const Config& cfg) {
  cfg.validate();
  if (!(k > 0.0)) throw ArgumentError("bo_reflection: k must be > 0");
  const double g = log_derivative(k, cfg.a1, cfg.wall);
  return std::exp(-2.0 * I * k * cfg.wall) * (k - I * g) / (k + I * g);
}

double energy_of(double k, const Config& cfg) { return -cfg.delta + k * k / (2.0 * cfg.mass); }

Eigen::Matrix2cd ansatz_matrix(cplx omega, double k, const Config& cfg) {
  const double a2 = cfg.a0 * cfg.a0 + cfg.a1 * cfg.a1;
  const double dc = 4.0 * cfg.mass * cfg.delta;
  Eigen::Matrix2cd m;
  m(0, 0) = omega * omega + a2 - 2.0 * omega * cfg.a0 + dc - k * k;
  m(0, 1) = -2.0 * omega * cfg.a1;
  m(1, 0) = m(0, 1);
  m(1, 1) = omega * omega + a2 + 2.0 * omega * cfg.a0 - k * k;
  return m;
}

std::array<QuarticRoot, 4> quartic_momenta(double energy, const Config& cfg) {
  cfg.validate();
  const double k2 = 2.0 * cfg.mass * (energy + cfg.delta);
  const cplx kc = std::sqrt(cplx(k2, 0.0));
  const double k = kc.real();  // only used through k^2 below
  const double a2 = cfg.a0 * cfg.a0 + cfg.a1 * cfg.a1;
  const double q = a2 - k2;
  const double dc = 4.0 * cfg.mass * cfg.delta;
  const double c2 = 2.0 * q + dc - 4.0 * a2;
  const double c1 = 2.0 * cfg.a0 * dc;
  const double c0 = q * q + dc * q;

  Eigen::Matrix4cd companion = Eigen::Matrix4cd::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(3, 2) = 1.0;
  companion(0, 3) = -c0;
  companion(1, 3) = -c1;
  companion(2, 3) = -c2;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw ConditioningError("quartic_momenta: eigen solve failed", 0.0);

  auto poly = [&](cplx w) { return (((w * w) + c2) * w + c1) * w + c0; };
  auto dpoly = [&](cplx w) { return (4.0 * w * w + 2.0 * c2) * w + c1; };
  const double scale = std::max({1.0, a2, k2, 0.5 * dc});

  std::array<QuarticRoot, 4> out;
  int accepted = 0;
  std::ostringstream diag;
  for (int i = 0; i < 4; ++i) {
    cplx w = solver.eigenvalues()[i];
    for (int it = 0; it < 3; ++it) {
      const cplx d = dpoly(w);
      if (std::abs(d) == 0.0) break;
      w -= poly(w) / d;
    }
    // Branch check against the unsquared eigenvalue equation.
    const cplx s = -w * w - a2 - 2.0 * cfg.mass * cfg.delta + k2;
    const cplx r = std::sqrt(std::pow(2.0 * cfg.mass * cfg.delta - 2.0 * cfg.a0 * w, 2) +
                             std::pow(2.0 * cfg.a1 * w, 2));
    const double res_minus = std::abs(s - r) / scale;
    const double res_plus = std::abs(s + r) / scale;
    const int branch = res_minus <= res_plus ? -1 : +1;
    const double branch_res = std::min(res_minus, res_plus);

    const Eigen::Matrix2cd m = ansatz_matrix(w, k, cfg);
    Eigen::Vector2cd v;
    if (m.row(0).cwiseAbs().sum() >= m.row(1).cwiseAbs().sum())
      v << -m(0, 1), m(0, 0);
    else
      v << m(1, 1), -m(1, 0);
    if (v.norm() == 0.0) v << 1.0, 0.0;  // m == 0: any vector is a null vector
    v.normalize();
    const double mnorm = std::max(m.cwiseAbs().maxCoeff(), scale);
    const double matrix_res = (m * v).cwiseAbs().maxCoeff() / mnorm;

    QuarticRoot root{w, v, branch, std::max(branch_res, matrix_res)};
    diag << " omega=" << w << " residual=" << root.residual << ";";
    if (root.residual < 1e-9) out[accepted++] = root;
  }
  if (accepted < 4) {
    throw ConditioningError("quartic_momenta: fewer than four roots pass the residual filter:" + diag.str(),
                            0.0);
  }
  return out;
}

Reflection coupled_reflection(double k, const Config& cfg) {
  cfg.validate();
  if (!(k > 0.0)) throw ArgumentError("coupled_reflection: k must be > 0");
  const double dc = 4.0 * cfg.mass * cfg.delta;
  if (cfg.delta > 0.0 && k * k >= dc)
    throw ThresholdError("coupled_reflection: closed channel is open (k^2/2m >= 2 Delta)");

  const double L = cfg.wall;
  const auto roots = quartic_momenta(energy_of(k, cfg), cfg);
  const Eigen::Matrix2cd a = field_matrix(cfg);
  // Left-region closed-channel exponent: exp(kappa x) decays as x -> -inf, or
  // an outgoing wave when the upper channel is degenerate with the lower one.
  const cplx kappa = dc > k * k ? cplx(std::sqrt(dc - k * k), 0.0) : cplx(0.0, -std::sqrt(k * k - dc));

  Eigen::Matrix<cplx, 6, 6> sys = Eigen::Matrix<cplx, 6, 6>::Zero();
  Eigen::Matrix<cplx, 6, 1> rhs = Eigen::Matrix<cplx, 6, 1>::Zero();
  for (int j = 0; j < 4; ++j) {
    const cplx w = roots[j].omega;
    const Eigen::Vector2cd& v = roots[j].mixing;
    // Modes growing towards the wall are referenced there.
    const double xref = w.imag() < 0.0 ? L : 0.0;
    const cplx at_wall = std::exp(I * w * (L - xref));
    const cplx at_zero = std::exp(I * w * (0.0 - xref));
    sys.block<2, 1>(0, j) = at_wall * v;
    sys.block<2, 1>(2, j) = at_zero * v;
    sys.block<2, 1>(4, j) = I * w * at_zero * v - I * a * (at_zero * v);
  }
  const cplx ein = std::exp(-I * k * L);
  const cplx eout = std::exp(I * k * L);
  // Unknown 4: R, unknown 5: closed-channel admixture S.
  sys(2, 5) = -1.0;
  sys(3, 4) = -eout;
  rhs(3) = ein;
  sys(4, 5) = -kappa;
  sys(5, 4) = I * k * eout;
  rhs(5) = I * k * ein;

  Eigen::JacobiSVD<Eigen::Matrix<cplx, 6, 6>> svd(sys);
  const auto& sv = svd.singularValues();
  const double cond = sv(5) > 0.0 ? sv(0) / sv(5) : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e12)) {
    std::ostringstream msg;
    msg << "coupled_reflection: matching matrix condition number " << cond
        << " exceeds 1e12; rescale the growing exponentials";
    throw ConditioningError(msg.str(), cond);
  }
  const Eigen::Matrix<cplx, 6, 1> sol = sys.fullPivLu().solve(rhs);
  return Reflection{sol(4), sol(5), k, cond};
}

double effective_length_closed_form(double a1, double wall) {
  const double x = a1 * wall;
  if (std::abs(x) < 1e-4) return wall * x * x / 3.0 * (1.0 - 2.0 * x * x / 5.0);
  return wall - std::tanh(x) / a1;
}

EffectiveLength effective_length(const Config& cfg) {
  cfg.validate();
  EffectiveLength e;
  e.closed_form = effective_length_closed_form(cfg.a1, cfg.wall);
  const double k1 = 1e-3, k2 = 2e-3;
  const double im1 = coupled_reflection(k1, cfg).r.imag();
  const double im2 = coupled_reflection(k2, cfg).r.imag();
  e.fitted = (im2 - im1) / (k2 - k1) / 2.0;
  e.difference = e.fitted - e.closed_form;
  return e;
}

}  // namespace geomag::model1d
