#include "geomag/internal_gauge.hpp"

#include <cmath>
#include <numbers>

#include "geomag/errors.hpp"

namespace geomag::internal_gauge {

namespace {

Eigen::Matrix2cd rot(int axis, double angle) {
  // exp(-i angle sigma_axis)
  return std::cos(angle) * pauli(0) - I * std::sin(angle) * pauli(axis);
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

Eigen::Matrix2cd ab_u(double phi) {
  return rot(3, 0.5 * phi) * rot(1, -0.25 * std::numbers::pi) * rot(3, -0.5 * phi);
}

}  // namespace

void AbConfig::validate() const {
  if (!(radius > 0.0)) throw ArgumentError("internal: arc radius must be > 0");
  if (!(rho_min > 0.0)) throw ArgumentError("internal: rho_min must be > 0");
  if (!(mass > 0.0)) throw ArgumentError("internal: mass must be > 0");
}

double AbConfig::field(double rho) const { return inverse_profile ? delta * radius / rho : delta; }

Eigen::Matrix2cd ab_connection(double rho, double phi) {
  Eigen::Matrix2cd m;
  m << -1.0, I * std::exp(-I * phi), -I * std::exp(I * phi), 1.0;
  return m / (2.0 * rho);
}

gauge::GaugeConnection ab_gauge_connection(const AbConfig& cfg) {
  cfg.validate();
  RVector origin = RVector::Zero(2);
  return gauge::GaugeConnection(
      2, 2,
      [](const RVector& p) {
        const double rho = std::hypot(p[0], p[1]);
        const double phi = std::atan2(p[1], p[0]);
        const Eigen::Matrix2cd a = ab_connection(rho, phi);
        // phi-hat = (-sin phi, cos phi)
        return std::vector<CMatrix>{-std::sin(phi) * a, std::cos(phi) * a};
      },
      {gauge::SingularLocus{origin, cfg.rho_min}});
}

gauge::UnitaryFamily ab_unitary() {
  return gauge::UnitaryFamily(2, 2, [](const RVector& p) -> CMatrix { return ab_u(std::atan2(p[1], p[0])); });
}

AbBo ab_bo(double rho, const AbConfig& cfg) {
  cfg.validate();
  if (rho < cfg.rho_min) throw DomainError("ab_bo: rho inside the exclusion radius around the origin");
  const Eigen::Matrix2cd a = ab_connection(rho, 0.7);
  AbBo bo;
  bo.a_phi = a(1, 1).real();
  // b = A_10 A_01 summed over components; only phi-hat is non-zero.
  const double b = (a(1, 0) * a(0, 1)).real();
  bo.induced = b / (2.0 * cfg.mass);
  bo.potential = -cfg.field(rho) + bo.induced;
  return bo;
}

Eigen::Matrix2cd ab_wilson(double t, const AbConfig& cfg) {
  const double wt = cfg.omega * t;
  Eigen::Matrix2cd w;
  w << 1.0, -I * std::exp(-I * wt), -I * std::exp(I * wt), 1.0;
  return w / std::sqrt(2.0);
}

gauge::ParamPath ab_arc(double t, const AbConfig& cfg) {
  return gauge::ParamPath::arc(RVector::Zero(2), cfg.radius, 0.0, cfg.omega * t);
}

void DipolarConfig::validate() const {
  if (!(r > 0.0)) throw ArgumentError("dipolar: R must be > 0");
  if (!triplet || !singlet) throw ArgumentError("dipolar: scalar potentials must be set");
}

Eigen::Matrix4cd dipolar_hamiltonian(const DipolarConfig& cfg) {
  cfg.validate();
  const double t3 = cfg.triplet(cfg.r);
  const double s1 = cfg.singlet(cfg.r);
  const double n[3] = {std::sin(cfg.theta) * std::cos(cfg.phi), std::sin(cfg.theta) * std::sin(cfg.phi),
                       std::cos(cfg.theta)};
  Eigen::Matrix4cd ss = Eigen::Matrix4cd::Zero();
  Eigen::Matrix4cd sn = Eigen::Matrix4cd::Zero();
  Eigen::Matrix4cd tn = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 3; ++i) {
    ss += spin_a(i + 1) * spin_b(i + 1);
    sn += n[i] * spin_a(i + 1);
    tn += n[i] * spin_b(i + 1);
  }
  const double dip = cfg.alpha * cfg.alpha / std::pow(cfg.r, 3);
  return (t3 - s1) * ss + 0.25 * (3.0 * t3 + s1) * Eigen::Matrix4cd::Identity() + dip * (ss - 3.0 * sn * tn);
}

Eigen::Vector4d dipolar_bo_energies(const DipolarConfig& cfg) {
  cfg.validate();
  const double t3 = cfg.triplet(cfg.r);
  const double dip = cfg.alpha * cfg.alpha / std::pow(cfg.r, 3);
  return Eigen::Vector4d(t3 - 0.5 * dip, t3 + dip, t3 - 0.5 * dip, cfg.singlet(cfg.r));
}

Eigen::Matrix4cd dipolar_z() {
  const double h = 1.0 / std::sqrt(2.0);
  Eigen::Matrix4cd z;
  z << 0, 0, 1, 0,
       0, -h, 0, -h,
       0, -h, 0, h,
       1, 0, 0, 0;
  return z;
}

Eigen::Matrix4cd dipolar_unitary(double theta, double phi) {
  const Eigen::Matrix2cd ua = rot(3, 0.5 * phi) * rot(2, 0.5 * theta) * rot(3, -0.5 * phi);
  return kron(ua, ua) * dipolar_z();
}

gauge::UnitaryFamily dipolar_family() {
  return gauge::UnitaryFamily(2, 4, [](const RVector& p) -> CMatrix { return dipolar_unitary(p[0], p[1]); });
}

double dipolar_factorization_defect(const DipolarConfig& cfg) {
  const Eigen::Matrix4cd u = dipolar_unitary(cfg.theta, cfg.phi);
  const Eigen::Matrix4cd hbo = dipolar_bo_energies(cfg).cast<cplx>().asDiagonal();
  return max_abs(dipolar_hamiltonian(cfg) - u * hbo * u.adjoint());
}

DipolarConnection dipolar_connection(double theta, double phi, double r) {
  if (!(r > 0.0)) throw ArgumentError("dipolar_connection: R must be > 0");
  if (!(theta > 0.0)) throw DomainError("dipolar_connection: theta must be > 0 (phi-hat undefined on the axis)");
  if (std::numbers::pi - theta < 1e-6) throw DomainError("dipolar_connection: theta within 1e-6 of the tan(theta/2) pole");
  const Eigen::Matrix2cd e3 = rot(3, 0.5 * phi);
  const Eigen::Matrix2cd e2 = rot(2, 0.5 * theta);
  const Eigen::Matrix2cd e3i = rot(3, -0.5 * phi);
  const Eigen::Matrix2cd ua = e3 * e2 * e3i;
  const Eigen::Matrix2cd s2 = 0.5 * pauli(2);
  const Eigen::Matrix2cd s3 = 0.5 * pauli(3);
  const Eigen::Matrix2cd dua_theta = e3 * (-I * s2) * e2 * e3i;
  const Eigen::Matrix2cd dua_phi = -I * s3 * ua + ua * (I * s3);
  const Eigen::Matrix4cd z = dipolar_z();
  const Eigen::Matrix4cd u = kron(ua, ua) * z;
  const Eigen::Matrix4cd du_theta = (kron(dua_theta, ua) + kron(ua, dua_theta)) * z;
  const Eigen::Matrix4cd du_phi = (kron(dua_phi, ua) + kron(ua, dua_phi)) * z;
  DipolarConnection c;
  c.theta_hat = I * u.adjoint() * du_theta / r;
  c.phi_hat = I * u.adjoint() * du_phi / (r * std::sin(theta));
  c.theta_hat = 0.5 * (c.theta_hat + c.theta_hat.adjoint()).eval();
  c.phi_hat = 0.5 * (c.phi_hat + c.phi_hat.adjoint()).eval();
  return c;
}

}  // namespace geomag::internal_gauge
