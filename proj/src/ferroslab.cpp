#include "geomag/ferroslab.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "geomag/errors.hpp"

namespace geomag::ferroslab {

void Config::validate() const {
  if (!(b0 > 0.0)) throw ArgumentError("ferroslab: B0 must be > 0");
  if (!(length > 0.0)) throw ArgumentError("ferroslab: L must be > 0");
  if (!(mass > 0.0)) throw ArgumentError("ferroslab: mass must be > 0");
}

double rgamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  if (x < 0.5) {
    // Reflection keeps Gamma(1 - x) in its well-behaved range.
    return std::tgamma(1.0 - x) * std::sin(std::numbers::pi * x) / std::numbers::pi;
  }
  return 1.0 / std::tgamma(x);
}

namespace {

cplx kummer_series(double a, double b, cplx x, double& abs_sum) {
  cplx term = 1.0;
  cplx sum = 1.0;
  abs_sum = 1.0;
  const double xa = std::abs(x);
  for (int n = 0; n < 5000; ++n) {
    term *= (a + n) / (b + n) * x / static_cast<double>(n + 1);
    sum += term;
    abs_sum += std::abs(term);
    if (term == 0.0) break;
    if (n > xa && std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

cplx kummer_m(double a, double b, cplx x, double* abs_sum) {
  double s = 0.0;
  cplx m;
  if (x.real() < 0.0) {
    const cplx e = std::exp(x);
    m = e * kummer_series(b - a, b, -x, s);
    s *= std::abs(e);
  } else {
    m = kummer_series(a, b, x, s);
  }
  if (abs_sum) *abs_sum = s;
  return m;
}

PcfValue pcf_d(double nu, cplx z) {
  const cplx x = 0.5 * z * z;
  if (std::abs(x) > 40.0) {
    std::ostringstream msg;
    msg << "pcf_d: |z^2/2| = " << std::abs(x) << " outside the validated series domain (<= 40)";
    throw DomainError(msg.str());
  }
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  const double sqrt_2pi = std::sqrt(2.0 * std::numbers::pi);
  const double g1 = sqrt_pi * rgamma(0.5 * (1.0 - nu));
  const double g2 = sqrt_2pi * rgamma(-0.5 * nu);
  const double a1 = -0.5 * nu, b1 = 0.5;
  const double a2 = 0.5 * (1.0 - nu), b2 = 1.5;

  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  const cplx m1 = kummer_m(a1, b1, x, &s1);
  const cplx m2 = kummer_m(a2, b2, x, &s2);
  const cplx dm1 = (a1 / b1) * kummer_m(a1 + 1.0, b1 + 1.0, x, &s3);
  const cplx dm2 = (a2 / b2) * kummer_m(a2 + 1.0, b2 + 1.0, x, &s4);

  const cplx pref = std::pow(2.0, 0.5 * nu) * std::exp(-0.25 * z * z);
  const cplx bracket = g1 * m1 - g2 * z * m2;
  // d/dz of the bracket, using dM/dx = (a/b) M(a+1, b+1) and dx/dz = z.
  const cplx dbracket = g1 * z * dm1 - g2 * (m2 + z * z * dm2);

  PcfValue out;
  out.nu = nu;
  out.z = z;
  out.value = pref * bracket;
  out.derivative = pref * (dbracket - 0.5 * z * bracket);
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::abs(g1) * s1 + std::abs(g2 * z) * s2;
  const double mag = std::abs(bracket);
  out.error_estimate = mag > 0.0 ? 4.0 * eps * scale / mag : (scale > 0.0 ? 1.0 : 0.0);
  return out;
}

SlabResult slab_analytic(double k, const Config& cfg) {
  cfg.validate();
  if (!(k > 0.0)) throw ArgumentError("slab_analytic: k must be > 0");
  const double phi = cfg.flux();
  const double L = cfg.length;
  const double alpha = std::sqrt(2.0 * cfg.b0);
  const double nu1 = k * k / (2.0 * cfg.b0) - 0.5;
  const double nu2 = -k * k / (2.0 * cfg.b0) - 0.5;

  SlabResult s;
  s.k = k;
  s.transmitting = k > phi;
  // Outgoing log-derivative on the right: i k' (travelling) or -q (evanescent).
  cplx right;
  if (s.transmitting) {
    s.kx_out = std::sqrt(k * k - phi * phi);
    right = I * s.kx_out;
  } else {
    s.kx_out = std::sqrt(phi * phi - k * k);
    right = -s.kx_out;
  }

  // Interior solution psi(u) = c1 D_nu1(alpha u) + c2 D_nu2(i alpha u) with
  // u = x + L/2; x-derivatives carry the chain-rule factors alpha and i alpha.
  const PcfValue d1_end = pcf_d(nu1, cplx(alpha * L, 0.0));
  const PcfValue d2_end = pcf_d(nu2, cplx(0.0, alpha * L));
  const PcfValue d1_0 = pcf_d(nu1, 0.0);
  const PcfValue d2_0 = pcf_d(nu2, 0.0);

  const cplx num = alpha * d1_end.derivative - right * d1_end.value;
  const cplx den = -I * alpha * d2_end.derivative + right * d2_end.value;
  s.gamma = num / den;

  const cplx psi0 = d1_0.value + s.gamma * d2_0.value;
  const cplx dpsi0 = alpha * d1_0.derivative + I * alpha * s.gamma * d2_0.derivative;
  const cplx y = dpsi0 / psi0;
  s.r = std::exp(-I * k * L) * (k + I * y) / (k - I * y);

  const cplx left_value = std::exp(-0.5 * I * k * L) + s.r * std::exp(0.5 * I * k * L);
  const cplx c1 = left_value / psi0;
  const cplx psi_end = c1 * (d1_end.value + s.gamma * d2_end.value);
  s.t = psi_end * std::exp(-0.5 * right * L);
  return s;
}

cplx slab_wavefunction(const SlabResult& s, const Config& cfg, double x) {
  const double L = cfg.length;
  if (x <= -0.5 * L) return std::exp(I * s.k * x) + s.r * std::exp(-I * s.k * x);
  const cplx right = s.transmitting ? I * s.kx_out : cplx(-s.kx_out, 0.0);
  if (x >= 0.5 * L) return s.t * std::exp(right * x);
  const double alpha = std::sqrt(2.0 * cfg.b0);
  const double nu1 = s.k * s.k / (2.0 * cfg.b0) - 0.5;
  const double nu2 = -s.k * s.k / (2.0 * cfg.b0) - 0.5;
  const double u = x + 0.5 * L;
  const cplx psi0 = pcf_d(nu1, 0.0).value + s.gamma * pcf_d(nu2, 0.0).value;
  const cplx c1 = (std::exp(-0.5 * I * s.k * L) + s.r * std::exp(0.5 * I * s.k * L)) / psi0;
  return c1 * (pcf_d(nu1, alpha * u).value + s.gamma * pcf_d(nu2, cplx(0.0, alpha * u)).value);
}

Currents slab_currents(cplx r, cplx t, double k, double flux, double mass) {
  if (!(k > std::abs(flux))) throw DomainError("slab_currents: transmitted current undefined for k <= |Phi|");
  const double kx = std::sqrt(k * k - flux * flux);
  Currents c;
  c.j_in = k / mass;
  c.j_refl = -k * std::norm(r) / mass;
  c.j_x = kx * std::norm(t) / mass;
  c.j_y = -flux * std::norm(t) / mass;
  c.tan_theta = -flux / kx;
  return c;
}

cplx step_reflection(double k, double flux) {
  const cplx kx = std::sqrt(cplx(k * k - flux * flux, 0.0));
  return (k - kx) / (k + kx);
}

}  // namespace geomag::ferroslab
