#pragma once

#include "geomag/linalg.hpp"

namespace geomag::ferroslab {

// Uniform field B0 on -L/2 < x < L/2, vector potential along y growing
// linearly across the slab to Phi = B0 L. Units hbar = 1, q/(hbar c) = 1.
struct Config {
  double b0 = 1.0;
  double length = 1.0;
  double mass = 0.5;

  double flux() const { return b0 * length; }
  void validate() const;
};

struct PcfValue {
  double nu = 0.0;
  cplx z;
  cplx value;
  cplx derivative;  // dD/dz
  // Relative error bound from series truncation and cancellation between
  // the two Kummer terms.
  double error_estimate = 0.0;
};

// Confluent hypergeometric M(a, b, x) by its power series (with Kummer's
// transformation for Re x < 0). `abs_sum` receives the sum of term moduli.
cplx kummer_m(double a, double b, cplx x, double* abs_sum = nullptr);

// 1/Gamma(x), exactly zero at the poles.
double rgamma(double x);

// Parabolic cylinder function D_nu(z), valid for |z^2/2| <= 40.
PcfValue pcf_d(double nu, cplx z);

struct SlabResult {
  cplx r;
  cplx t;
  bool transmitting = false;  // k > Phi
  double k = 0.0;
  double kx_out = 0.0;        // sqrt(k^2 - Phi^2), or the decay rate when evanescent
  cplx gamma;                 // c2 / c1
};

SlabResult slab_analytic(double k, const Config& cfg);

// Exact wavefunction of the analytic solution (for oracles and plotting).
cplx slab_wavefunction(const SlabResult& s, const Config& cfg, double x);

struct Currents {
  double j_in = 0.0;
  double j_refl = 0.0;
  double j_x = 0.0;
  double j_y = 0.0;
  double tan_theta = 0.0;
};

Currents slab_currents(cplx r, cplx t, double k, double flux, double mass = 0.5);

// Step-potential limit L -> 0 at fixed Phi.
cplx step_reflection(double k, double flux);

}  // namespace geomag::ferroslab
