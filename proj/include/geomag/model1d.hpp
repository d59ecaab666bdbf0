#pragma once

#include <array>

#include "geomag/gauge_core.hpp"
#include "geomag/linalg.hpp"

namespace geomag::model1d {

// Two-channel model with constant connection A = A0 sigma_3 + A1 sigma_1 on
// 0 < x < L, a hard wall at x = L and channel potentials +/-Delta. Channel 0
// is the closed (upper) channel, channel 1 the open one. Units hbar = 1.
struct Config {
  double a0 = 0.0;
  double a1 = 1.0;
  double delta = 0.0;
  double mass = 0.5;
  double wall = 3.0;

  void validate() const;
};

// Constant connection of the model as a 1D gauge field.
gauge::GaugeConnection connection(const Config& cfg);

// exp(i A x) for the constant connection (closed form with |A| = sqrt(A0^2 + A1^2)).
Eigen::Matrix2cd constant_field_transport(const Config& cfg, double x);

// Open-channel reflection of the projected single-channel problem, phase
// referenced at x = L. Independent of A0.
cplx bo_reflection(double k, const Config& cfg);

struct QuarticRoot {
  cplx omega;
  Eigen::Vector2cd mixing;  // unit-norm null vector (closed, open)
  int branch = 0;           // +1 or -1: sign of the square root it satisfies
  double residual = 0.0;    // max of branch and matrix residuals (relative)
};

// The four channel momenta inside the gauge region at energy
// E = -Delta + k^2/(2m).
std::array<QuarticRoot, 4> quartic_momenta(double energy, const Config& cfg);

// Energy of an open-channel wavenumber k.
double energy_of(double k, const Config& cfg);

// The 2x2 matrix whose determinant defines the momenta.
Eigen::Matrix2cd ansatz_matrix(cplx omega, double k, const Config& cfg);

struct Reflection {
  cplx r;
  cplx closed_admixture;
  double k = 0.0;
  double condition_number = 0.0;
};

Reflection coupled_reflection(double k, const Config& cfg);

struct EffectiveLength {
  double closed_form = 0.0;
  double fitted = 0.0;
  double difference = 0.0;
};

double effective_length_closed_form(double a1, double wall);
EffectiveLength effective_length(const Config& cfg);

}  // namespace geomag::model1d
