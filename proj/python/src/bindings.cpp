#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geomag/acceptance.hpp"
#include "geomag/errors.hpp"
#include "geomag/ferroslab.hpp"
#include "geomag/gauge_core.hpp"
#include "geomag/internal_gauge.hpp"
#include "geomag/model1d.hpp"
#include "geomag/slab2d.hpp"
#include "geomag/tdse.hpp"

namespace py = pybind11;
using namespace geomag;

namespace {

slab2d::Config slab_cfg(double beta, double b0, double length, double delta, double mass) {
  slab2d::Config c;
  c.beta = beta;
  c.b0 = b0;
  c.length = length;
  c.delta = delta;
  c.mass = mass;
  c.validate();
  return c;
}

py::dict trajectory_dict(const tdse::Trajectory& traj) {
  std::vector<double> tau, xi, eta, pf, pg, norm;
  for (const auto& p : traj) {
    tau.push_back(p.tau);
    xi.push_back(p.xi_mean);
    eta.push_back(p.eta_mean);
    pf.push_back(p.pop_f);
    pg.push_back(p.pop_g);
    norm.push_back(p.norm);
  }
  auto arr = [](const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
  };
  py::dict d;
  d["tau"] = arr(tau);
  d["xi"] = arr(xi);
  d["eta"] = arr(eta);
  d["pop_f"] = arr(pf);
  d["pop_g"] = arr(pg);
  d["norm"] = arr(norm);
  return d;
}

}  // namespace

PYBIND11_MODULE(_geomag, m) {
  m.doc() = "Gauge-potential scattering solvers";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<EvaluationError>(m, "EvaluationError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<ConditioningError>(m, "ConditioningError", base.ptr());
  py::register_exception<AccuracyError>(m, "AccuracyError", base.ptr());
  py::register_exception<ThresholdError>(m, "ThresholdError", base.ptr());
  py::register_exception<InsufficientPropagationError>(m, "InsufficientPropagationError", base.ptr());
  py::register_exception<WrapAroundError>(m, "WrapAroundError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def(
      "ab_loop",
      [](double radius, int steps) {
        internal_gauge::AbConfig ab;
        ab.radius = radius;
        const auto conn = internal_gauge::ab_gauge_connection(ab);
        const auto loop = gauge::ParamPath::arc(RVector::Zero(2), radius, 0.0, 2.0 * std::acos(-1.0));
        const auto w = gauge::wilson_line(conn, loop, steps);
        return py::make_tuple(Eigen::MatrixXcd(w.value), w.error_estimate);
      },
      py::arg("radius") = 1.0, py::arg("steps") = 10000,
      "Wilson loop of the Aharonov-Bohm connection around the origin: (matrix, error estimate).");

  m.def(
      "dipolar_spectrum",
      [](double theta, double phi, double alpha, double r) {
        internal_gauge::DipolarConfig d;
        d.theta = theta;
        d.phi = phi;
        d.alpha = alpha;
        d.r = r;
        return py::make_tuple(Eigen::Matrix4cd(internal_gauge::dipolar_hamiltonian(d)),
                              Eigen::Vector4d(internal_gauge::dipolar_bo_energies(d)),
                              internal_gauge::dipolar_factorization_defect(d));
      },
      py::arg("theta"), py::arg("phi"), py::arg("alpha") = 0.7, py::arg("r") = 1.3);

  m.def(
      "model1d_reflection",
      [](double k, double a0, double a1, double delta, double wall, double mass) {
        model1d::Config c{a0, a1, delta, mass, wall};
        const auto r = model1d::coupled_reflection(k, c);
        return py::make_tuple(r.r, model1d::bo_reflection(k, c), r.condition_number);
      },
      py::arg("k"), py::arg("a0") = 0.0, py::arg("a1") = 1.0, py::arg("delta") = 0.0, py::arg("wall") = 3.0,
      py::arg("mass") = 0.5, "(coupled r, BO r, matching condition number).");

  m.def(
      "effective_length",
      [](double a1, double delta, double wall) {
        model1d::Config c;
        c.a1 = a1;
        c.delta = delta;
        c.wall = wall;
        const auto e = model1d::effective_length(c);
        return py::make_tuple(e.fitted, e.closed_form);
      },
      py::arg("a1") = 1.0, py::arg("delta") = 1e4, py::arg("wall") = 3.0);

  m.def(
      "slab_bo",
      [](double k, double beta, double b0, double length, double delta, double mass) {
        const auto r = slab2d::bo_scatter_normal(k, slab_cfg(beta, b0, length, delta, mass));
        py::dict d;
        d["r"] = r.r;
        d["t"] = r.t;
        d["transmission"] = r.transmission();
        return d;
      },
      py::arg("k"), py::arg("beta") = 1.0, py::arg("b0") = 1.0, py::arg("length") = 1.0, py::arg("delta") = 1.0,
      py::arg("mass") = 0.5);

  m.def(
      "slab_coupled",
      [](double energy, double beta, double b0, double length, double delta, double mass) {
        const auto cfg = slab_cfg(beta, b0, length, delta, mass);
        const auto a = slab2d::coupled_scatter(energy, cfg).amplitudes();
        py::dict d;
        d["r11"] = a.r11;
        d["r12"] = a.r12;
        d["t11"] = a.t11;
        d["t12"] = a.t12;
        d["k"] = a.k;
        d["open"] = a.regime == slab2d::Regime::Open;
        d["transmission"] = a.k > std::abs(cfg.flux()) ? slab2d::transmission_coefficient(a, cfg.flux()) : 0.0;
        return d;
      },
      py::arg("energy"), py::arg("beta") = 1.0, py::arg("b0") = 1.0, py::arg("length") = 1.0,
      py::arg("delta") = 1.0, py::arg("mass") = 0.5);

  m.def(
      "flux_functional",
      [](double energy, double w, double beta, double b0, double delta) {
        const auto sol = slab2d::coupled_scatter(energy, slab_cfg(beta, b0, 1.0, delta, 0.5));
        const auto f = slab2d::flux_functional(sol, w);
        py::dict d;
        d["diabatic"] = f.diabatic;
        d["adiabatic_current"] = f.adiabatic_current;
        d["gauge_part"] = f.gauge_part;
        d["formula"] = f.formula;
        return d;
      },
      py::arg("energy"), py::arg("w") = 1.0, py::arg("beta") = 1.0, py::arg("b0") = 1.0, py::arg("delta") = 1.0);

  m.def("deflection_angle", &slab2d::deflection_angle, py::arg("k"), py::arg("flux"));

  m.def(
      "ferroslab",
      [](double k, double b0, double length) {
        ferroslab::Config c{b0, length, 0.5};
        const auto s = ferroslab::slab_analytic(k, c);
        return py::make_tuple(s.r, s.t, s.transmitting);
      },
      py::arg("k"), py::arg("b0"), py::arg("length"));

  m.def(
      "tdse_run",
      [](double k, double delta, double flux, int n, double half_width, double dt, long max_steps, double xi0,
         double sigma) {
        tdse::TdseConfig c;
        c.k = k;
        c.delta = delta;
        c.flux = flux;
        c.grid.nx = c.grid.ny = n;
        c.grid.xi_min = c.grid.eta_min = -half_width;
        c.grid.xi_max = c.grid.eta_max = half_width;
        c.dt = dt;
        c.max_steps = max_steps;
        c.xi0 = xi0;
        c.sigma = sigma;
        tdse::PropagationResult res;
        {
          py::gil_scoped_release release;
          res = tdse::propagate(c);
        }
        return trajectory_dict(res.trajectory);
      },
      py::arg("k") = 12.0, py::arg("delta") = 200.0, py::arg("flux") = 6.0, py::arg("n") = 256,
      py::arg("half_width") = 4.0 * std::acos(-1.0), py::arg("dt") = 2.5e-4, py::arg("max_steps") = 4000,
      py::arg("xi0") = -4.0, py::arg("sigma") = 0.5, "Propagate the packet; returns trajectory arrays.");

  m.def(
      "classical_tan_theta",
      [](double k, double flux) {
        tdse::TdseConfig c;
        c.k = k;
        c.flux = flux;
        return tdse::classical_trajectory(k, c, 0.0).tan_theta;
      },
      py::arg("k"), py::arg("flux"));

  m.def(
      "run_acceptance",
      [](const std::vector<int>& ids) {
        std::vector<acceptance::CriterionResult> out;
        {
          py::gil_scoped_release release;
          out = acceptance::run_acceptance(ids);
        }
        py::list l;
        for (const auto& r : out) l.append(py::make_tuple(r.id, r.name, r.passed, r.detail));
        return l;
      },
      py::arg("ids") = std::vector<int>{});
}
