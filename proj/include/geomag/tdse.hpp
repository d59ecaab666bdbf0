#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "geomag/linalg.hpp"

namespace geomag::tdse {

// Periodic box, row-major storage: index = i * ny + j with xi_i, eta_j.
struct Grid2D {
  int nx = 256;
  int ny = 256;
  double xi_min = -12.566370614359172;
  double xi_max = 12.566370614359172;
  double eta_min = -12.566370614359172;
  double eta_max = 12.566370614359172;

  double dxi() const { return (xi_max - xi_min) / nx; }
  double deta() const { return (eta_max - eta_min) / ny; }
  double xi(int i) const { return xi_min + i * dxi(); }
  double eta(int j) const { return eta_min + j * deta(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  void validate() const;
};

enum class FluxProfile { Constant, Lens };

struct TdseConfig {
  Grid2D grid;
  double k = 12.0;
  double sigma = 0.5;
  double xi0 = -4.0;
  double eta0 = 0.0;
  double delta = 200.0;
  double beta = 2.0;
  double flux = 6.0;
  FluxProfile profile = FluxProfile::Constant;
  double gamma = 1.0;
  double focal = 3.0;
  double dt = 2.5e-4;
  long max_steps = 4000;
  int output_every = 10;
  double xi_stop = 4.5;        // stop once <xi> passes this value
  double free_flight_xi = 2.5; // start of the fit window
  double guard = 0.5;          // width of the edge band watched for wrap-around
  double wrap_tolerance = 1e-6;

  void validate() const;
  // Phase chi(eta) of the coupling: Phi*eta, or Phi(eta)*eta for the lens.
  double chi(double eta) const;
  double chi_prime(double eta) const;
};

struct SpinorField {
  Grid2D grid;
  std::vector<cplx> f;
  std::vector<cplx> g;
  double tau = 0.0;

  double norm() const;
};

struct TrajectoryPoint {
  double tau = 0.0;
  double xi_mean = 0.0;
  double eta_mean = 0.0;
  double pop_f = 0.0;
  double pop_g = 0.0;
  double norm = 0.0;
  double xi_f = 0.0, eta_f = 0.0, xi_g = 0.0, eta_g = 0.0;
};

using Trajectory = std::vector<TrajectoryPoint>;

Eigen::Matrix2cd potential_matrix(double xi, double eta, const TdseConfig& cfg);

// Gaussian packet in the g channel moving along +xi, unit norm.
SpinorField initial_packet(const TdseConfig& cfg);

TrajectoryPoint measure(const SpinorField& field);

// Strang split-operator stepping on the periodic box.
class Propagator {
 public:
  explicit Propagator(const TdseConfig& cfg);
  ~Propagator();
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  // One full step K(dt/2) V(dt) K(dt/2).
  void step(SpinorField& field, double dt);
  // n steps, with the inner half kinetic steps fused.
  void steps(SpinorField& field, double dt, long n);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct PropagationResult {
  Trajectory trajectory;
  SpinorField final;
  long steps = 0;
};

using Observer = std::function<void(const SpinorField&, const TrajectoryPoint&)>;

// Propagates the initial packet until <xi> passes xi_stop or max_steps is
// reached. Throws WrapAroundError when the edge band holds more than
// wrap_tolerance of the norm.
PropagationResult propagate(const TdseConfig& cfg, const Observer& observer = {});

struct AdiabaticField {
  std::vector<cplx> f;
  std::vector<cplx> g;
};
AdiabaticField adiabatic_amplitudes(const SpinorField& field, const TdseConfig& cfg);

struct LineFit {
  double slope = 0.0;       // d<eta>/d<xi>
  double intercept = 0.0;
  double residual = 0.0;    // rms of the fit
  double xi_center = 0.0;
  double eta_center = 0.0;
  int points = 0;
};

// Linear fit of <eta> against <xi> over the free-flight window <xi> >= xi_start.
LineFit deflection_from_trajectory(const Trajectory& traj, double xi_start = 2.5);

struct ClassicalPoint {
  double t, xi, eta, v_xi, v_eta;
};

struct ClassicalPath {
  std::vector<ClassicalPoint> points;
  double tan_theta = 0.0;   // exit slope v_eta / v_xi
  double speed_drift = 0.0; // max relative change of |v|
};

// Lorentz motion v' = 2 v x B z (m = 1/2) in the induction of the open
// adiabatic channel, starting at (xi0, eta0) with v = (2k, 0).
double classical_induction(double xi, double eta, const TdseConfig& cfg);
ClassicalPath classical_trajectory(double k, const TdseConfig& cfg, double eta0, double xi_end = 6.0);

struct LensResult {
  std::vector<double> impacts;
  std::vector<Trajectory> trajectories;
  std::vector<LineFit> fits;
  double focal_xi = 0.0;
  double focal_eta = 0.0;
};

// Least-squares intersection of lines (xi_center, eta_center) + s (1, slope).
std::array<double, 2> focal_point(const std::vector<LineFit>& fits);

LensResult lens_run(const std::vector<double>& impacts, const TdseConfig& cfg);
LensResult classical_lens(const std::vector<double>& impacts, const TdseConfig& cfg, double xi_start = 2.5);

}  // namespace geomag::tdse
