#pragma once

#include <functional>

#include "geomag/gauge_core.hpp"
#include "geomag/linalg.hpp"

namespace geomag::internal_gauge {

// Spin-1/2 dressed by an azimuthal field of strength B(rho); mu0 = 1.
struct AbConfig {
  double delta = 1.0;       // B(rho) for the constant profile
  double radius = 1.0;      // arc radius R0
  double omega = 1.0;       // arc angular rate
  double rho_min = 1e-3;    // exclusion radius around the origin
  double mass = 0.5;
  bool inverse_profile = false;  // B(rho) = delta * radius / rho instead of delta

  void validate() const;
  double field(double rho) const;
};

// phi-hat component of the 2x2 connection at (rho, phi).
Eigen::Matrix2cd ab_connection(double rho, double phi);

// Cartesian (x, y) gauge connection with the origin declared singular.
gauge::GaugeConnection ab_gauge_connection(const AbConfig& cfg);

// U(phi) = exp(-i phi sigma3/2) exp(i pi sigma1/4) exp(i phi sigma3/2) as a
// family over Cartesian (x, y).
gauge::UnitaryFamily ab_unitary();

struct AbBo {
  double a_phi = 0.0;      // Abelian phi-hat component of the open channel
  double potential = 0.0;  // -B(rho) + 1/(8 m rho^2)
  double induced = 0.0;    // the scalar term alone, from the off-diagonal elements
};

// Projection onto the lower (open) channel.
AbBo ab_bo(double rho, const AbConfig& cfg);

// Closed form of the ordered exponential along the arc phi = omega t.
Eigen::Matrix2cd ab_wilson(double t, const AbConfig& cfg);

// Arc of radius cfg.radius from phi = 0 to phi = omega t.
gauge::ParamPath ab_arc(double t, const AbConfig& cfg);

struct DipolarConfig {
  std::function<double(double)> triplet = [](double) { return -1.0; };
  std::function<double(double)> singlet = [](double) { return -2.0; };
  double alpha = 0.7;
  double r = 1.3;
  double theta = 0.0;
  double phi = 0.0;

  void validate() const;
};

Eigen::Matrix4cd dipolar_hamiltonian(const DipolarConfig& cfg);

// Diagonal of H_BO in the order used by the factorization.
Eigen::Vector4d dipolar_bo_energies(const DipolarConfig& cfg);

// The basis change Z of the factorization on |uu>,|ud>,|du>,|dd>.
Eigen::Matrix4cd dipolar_z();

// U = (Ua x Ua) Z with Ua built from spin operators, i.e. half angles.
Eigen::Matrix4cd dipolar_unitary(double theta, double phi);

// Family over (theta, phi).
gauge::UnitaryFamily dipolar_family();

// max |H_ad - U H_BO U^dagger|.
double dipolar_factorization_defect(const DipolarConfig& cfg);

struct DipolarConnection {
  Eigen::Matrix4cd theta_hat;  // A_theta / R
  Eigen::Matrix4cd phi_hat;    // A_phi / (R sin theta)
};

DipolarConnection dipolar_connection(double theta, double phi, double r);

}  // namespace geomag::internal_gauge
