#pragma once

#include <array>
#include <memory>
#include <vector>

#include "geomag/gauge_core.hpp"
#include "geomag/linalg.hpp"

namespace geomag::slab2d {

// Smooth slab: Omega(x) = (pi/4)(1 + tanh(beta x)), phi(y) = Phi y / 2 with
// Phi = B0 L. Channel potentials +/-Delta; units hbar = 1.
struct Config {
  double beta = 1.0;
  double b0 = 1.0;
  double length = 1.0;
  double delta = 1.0;
  double mass = 0.5;

  double flux() const { return b0 * length; }
  // Cutoff a with |tanh(beta a)| = 1 - 1e-12.
  double cutoff() const;
  void validate() const;
};

double omega_profile(double x, const Config& cfg);
double omega_derivative(double x, const Config& cfg);

// {A_x, A_y} of the full two-channel connection at (x, y).
std::array<Eigen::Matrix2cd, 2> vector_potential(double x, double y, const Config& cfg);

// d(A_y)_{cc}/dx: channel 0 (closed, upper sign) or 1 (open, lower sign).
double induction(double x, const Config& cfg, int channel = 1);

// Integral of |B(x)| over the real line by adaptive quadrature.
double total_flux(const Config& cfg);

// A0(x) = Phi sin^2 Omega, b(x), and v_eff = A0^2 + b.
double bo_vector_potential(double x, const Config& cfg);
double induced_scalar(double x, const Config& cfg);
double effective_potential(double x, const Config& cfg);

gauge::GaugeConnection connection(const Config& cfg);
gauge::UnitaryFamily unitary_family(const Config& cfg);
Eigen::Matrix2cd unitary(double x, double y, const Config& cfg);

struct SolverOptions {
  double rtol = 1e-10;
  double agreement = 1e-8;  // allowed change between the run and the halved-step run
  double segment = 0.05;    // spacing of stored wave samples
};

struct BoResult {
  cplx r;
  cplx t;
  double k = 0.0;
  double k_out = 0.0;        // sqrt(k^2 - Phi^2), or the decay rate below threshold
  bool transmitting = false;
  double achieved = 0.0;     // change under step halving
  double transmission() const;
};

BoResult bo_scatter_normal(double k, const Config& cfg, const SolverOptions& opts = {});

enum class Regime { Closed, Open };

struct SlabAmplitudes {
  cplx r11, r12, t11, t12;
  Regime regime = Regime::Closed;
  double energy = 0.0;
  double k = 0.0;
  // Left excited channel: kappa (closed) or k2 (open).
  double kappa = 0.0;
  bool left_excited_open = false;
  // Right channels: k' (or decay rate q when k < Phi) and kappa' (or k2').
  double k_prime = 0.0;
  bool right_ground_open = false;
  double kappa_prime = 0.0;
  bool right_excited_open = false;
  double achieved = 0.0;
};

// Exact solution at normal incidence. Holds the amplitudes and the
// wavefunction (f1, f2) of the reduced equations on [-a, a].
class SlabSolution {
 public:
  const SlabAmplitudes& amplitudes() const { return amps_; }
  const Config& config() const { return cfg_; }
  double cutoff() const { return a_; }
  // [f1, f2, f1', f2'] at x in [-a, a].
  Eigen::Vector4cd at(double x) const;

 private:
  friend SlabSolution coupled_scatter(double, const Config&, const SolverOptions&);
  SlabAmplitudes amps_;
  Config cfg_;
  double a_ = 0.0;
  double rtol_ = 1e-10;
  std::vector<double> xs_;
  std::vector<Eigen::Vector4cd> psi_;
};

SlabSolution coupled_scatter(double energy, const Config& cfg, const SolverOptions& opts = {});

double transmission_coefficient(const SlabAmplitudes& amps, double flux);
double deflection_angle(double k, double flux);

struct FluxResult {
  double diabatic = 0.0;
  double adiabatic_current = 0.0;  // F tilde
  double gauge_part = 0.0;         // F_A
  double formula = 0.0;            // (1/m) 2 w Phi (|t12|^2 [- |r12|^2 when open])
  double w = 0.0;
  double per_width() const { return diabatic / (2.0 * w); }
};

// Contour integral of the current on the rectangle |x| <= a, |y| <= w,
// traversed clockwise, in the diabatic and the adiabatic pictures.
FluxResult flux_functional(const SlabSolution& sol, double w);
double flux_formula(const SlabAmplitudes& amps, const Config& cfg, double w);

struct CurrentSample {
  double x, y, jx, jy;
};

// Diabatic current j = (1/m) Im(G^dagger grad G) with G = (e^{-i Phi y} f1, f2).
Eigen::Vector2d current(const SlabSolution& sol, double x, double y);
// Adiabatic current split: {j_tilde, j_A}.
std::array<Eigen::Vector2d, 2> adiabatic_current(const SlabSolution& sol, double x, double y);

std::vector<CurrentSample> current_field(const SlabSolution& sol, const std::vector<double>& xs,
                                         const std::vector<double>& ys);

// Max |div j| from central differences on the sampled grid interior.
double divergence_residual(const SlabSolution& sol, const std::vector<double>& xs,
                           const std::vector<double>& ys);

}  // namespace geomag::slab2d
