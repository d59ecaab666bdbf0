#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <set>
#include <thread>

#include "geomag/acceptance.hpp"
#include "geomag/cli.hpp"
#include "geomag/config.hpp"
#include "geomag/csv.hpp"
#include "geomag/errors.hpp"
#include "geomag/ferroslab.hpp"
#include "geomag/gauge_core.hpp"
#include "geomag/internal_gauge.hpp"
#include "geomag/model1d.hpp"
#include "geomag/slab2d.hpp"
#include "geomag/tdse.hpp"

namespace geomag::cli {

namespace {

using io::CsvWriter;
using io::ExperimentConfig;
using json = nlohmann::ordered_json;

struct Context {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  double tolerance = std::nan("");
  bool seedless = true;
  std::string slab_mode = "scan";

  bool has_tolerance() const { return !std::isnan(tolerance); }
  std::string out(const std::string& name) const { return (std::filesystem::path(out_dir) / name).string(); }
};

struct Summary {
  json doc;
  bool all_passed = true;

  explicit Summary(const std::string& name) {
    doc["experiment"] = name;
    doc["inputs"] = json::object();
    doc["results"] = json::object();
    doc["assertions"] = json::object();
  }
  void input(const ExperimentConfig& cfg) {
    for (const auto& [k, v] : cfg.entries()) doc["inputs"][k] = v;
  }
  void result(const std::string& key, double v) { doc["results"][key] = v; }
  void assertion(const std::string& key, bool ok) {
    doc["assertions"][key] = ok;
    all_passed = all_passed && ok;
  }
};

// Applies f to every item on a pool of `threads` workers; results keep input order.
template <class T, class F>
auto parallel_map(const std::vector<T>& items, int threads, F f) {
  using R = decltype(f(items.front()));
  std::vector<R> out(items.size());
  const std::size_t n = std::max(1, threads);
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex m;
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < std::min(n, items.size()); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < items.size(); i = next++) {
        try {
          out[i] = f(items[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

ExperimentConfig load_config(const Context& ctx, const std::string& experiment, std::set<std::string> known,
                             const std::vector<std::string>& required) {
  if (ctx.config_path.empty()) throw ConfigError(experiment + ": --config is required");
  auto cfg = ExperimentConfig::load(ctx.config_path);
  known.insert("experiment");
  cfg.require({"experiment"});
  if (cfg.text("experiment") != experiment)
    throw ConfigError(cfg.source() + ": experiment '" + cfg.text("experiment") + "' does not match subcommand '" +
                      experiment + "'");
  cfg.restrict_to(known);
  cfg.require(required);
  return cfg;
}

std::vector<double> sweep(const ExperimentConfig& cfg, const std::string& prefix) {
  if (cfg.has(prefix)) return cfg.list(prefix);
  const double lo = cfg.number(prefix + "_min"), hi = cfg.number(prefix + "_max");
  const long n = cfg.integer(prefix + "_points");
  if (n < 1) throw ConfigError(cfg.source() + ": key '" + prefix + "_points' must be >= 1");
  std::vector<double> v;
  for (long i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  return v;
}

const std::set<std::string> kSlabKeys = {"beta", "b0", "length", "delta", "mass"};

slab2d::Config slab_config(const ExperimentConfig& cfg) {
  slab2d::Config c;
  c.beta = cfg.number("beta");
  c.b0 = cfg.number("b0");
  c.length = cfg.number_or("length", 1.0);
  c.delta = cfg.number_or("delta", 1.0);
  c.mass = cfg.number_or("mass", 0.5);
  c.validate();
  return c;
}

std::set<std::string> with(std::set<std::string> a, const std::set<std::string>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

void cmd_potentials(const Context& ctx, Summary& sum) {
  auto cfg = load_config(ctx, "potentials", with(kSlabKeys, {"x_min", "x_max", "x_points"}), {"beta", "b0"});
  sum.input(cfg);
  const auto c = slab_config(cfg);
  CsvWriter csv(ctx.out("potentials.csv"), {"x", "omega", "a0", "b", "v_eff", "induction", "upper", "lower"});
  for (double x : sweep(cfg, "x")) {
    csv.row({x, slab2d::omega_profile(x, c), slab2d::bo_vector_potential(x, c), slab2d::induced_scalar(x, c),
             slab2d::effective_potential(x, c), slab2d::induction(x, c, 1), c.delta, -c.delta});
  }
  sum.result("total_flux", slab2d::total_flux(c));
  sum.result("flux", c.flux());
}

void cmd_scatter1d(const Context& ctx, Summary& sum) {
  auto cfg = load_config(ctx, "scatter1d", {"a0", "a1", "delta", "wall", "mass", "k", "k_min", "k_max", "k_points"},
                         {"a1", "wall", "delta"});
  sum.input(cfg);
  model1d::Config m;
  m.a0 = cfg.number_or("a0", 0.0);
  m.a1 = cfg.number("a1");
  m.delta = cfg.number("delta");
  m.wall = cfg.number("wall");
  m.mass = cfg.number_or("mass", 0.5);
  m.validate();
  const auto ks = sweep(cfg, "k");
  const auto rows = parallel_map(ks, ctx.threads, [&](double k) {
    const auto r = model1d::coupled_reflection(k, m);
    const cplx bo = model1d::bo_reflection(k, m);
    return std::vector<double>{k, r.r.real(), r.r.imag(), std::abs(r.r), bo.real(), bo.imag(), r.condition_number};
  });
  CsvWriter csv(ctx.out("scatter1d.csv"), {"k", "re_r", "im_r", "abs_r", "re_r_bo", "im_r_bo", "condition"});
  for (const auto& r : rows) csv.row(r);
  if (m.delta > 0.0) {
    const auto eff = model1d::effective_length(m);
    sum.result("effective_length_closed_form", eff.closed_form);
    sum.result("effective_length_fitted", eff.fitted);
  }
}

void cmd_slab(const Context& ctx, Summary& sum) {
  auto cfg = load_config(ctx, "slab",
                         with(kSlabKeys, {"k", "k_min", "k_max", "k_points", "energy", "energy_min", "energy_max",
                                          "energy_points", "k_over_phi", "k_over_phi_min", "k_over_phi_max",
                                          "k_over_phi_points", "rtol"}),
                         {"beta", "b0"});
  sum.input(cfg);
  const auto c = slab_config(cfg);
  slab2d::SolverOptions opts;
  opts.rtol = cfg.number_or("rtol", opts.rtol);
  if (ctx.has_tolerance()) opts.agreement = ctx.tolerance;
  sum.doc["inputs"]["mode"] = ctx.slab_mode;

  if (ctx.slab_mode == "bo") {
    const auto ks = sweep(cfg, "k");
    const auto rows = parallel_map(ks, ctx.threads, [&](double k) {
      const auto r = slab2d::bo_scatter_normal(k, c, opts);
      return std::vector<double>{k, r.r.real(), r.r.imag(), r.t.real(), r.t.imag(), r.transmission()};
    });
    CsvWriter csv(ctx.out("slab_bo.csv"), {"k", "re_r", "im_r", "re_t", "im_t", "transmission"});
    for (const auto& r : rows) csv.row(r);
  } else if (ctx.slab_mode == "coupled") {
    const auto es = sweep(cfg, "energy");
    const auto rows = parallel_map(es, ctx.threads, [&](double e) {
      const auto a = slab2d::coupled_scatter(e, c, opts).amplitudes();
      const double tc = a.k > c.flux() ? slab2d::transmission_coefficient(a, c.flux()) : 0.0;
      return std::vector<double>{e,
                                 a.k,
                                 a.regime == slab2d::Regime::Open ? 1.0 : 0.0,
                                 a.r11.real(),
                                 a.r11.imag(),
                                 a.r12.real(),
                                 a.r12.imag(),
                                 a.t11.real(),
                                 a.t11.imag(),
                                 a.t12.real(),
                                 a.t12.imag(),
                                 tc,
                                 a.achieved};
    });
    CsvWriter csv(ctx.out("slab_coupled.csv"), {"energy", "k", "open", "re_r11", "im_r11", "re_r12", "im_r12", "re_t11",
                                                "im_t11", "re_t12", "im_t12", "transmission", "achieved"});
    for (const auto& r : rows) csv.row(r);
  } else if (ctx.slab_mode == "scan") {
    // Scan convention: E = 0 with Delta = k^2 / 2m, so kappa' = k.
    const auto ratios = sweep(cfg, "k_over_phi");
    const auto rows = parallel_map(ratios, ctx.threads, [&](double ratio) {
      const double k = ratio * c.flux();
      slab2d::Config cc = c;
      cc.delta = k * k / (2.0 * cc.mass);
      const double tc = slab2d::transmission_coefficient(slab2d::coupled_scatter(0.0, cc, opts).amplitudes(), cc.flux());
      const double tb = slab2d::bo_scatter_normal(k, cc, opts).transmission();
      return std::vector<double>{ratio, k, tb, tc};
    });
    CsvWriter csv(ctx.out("transmission.csv"), {"k_over_phi", "k", "t_bo", "t_coupled"});
    double worst = 0.0;
    for (const auto& r : rows) {
      csv.row(r);
      worst = std::max(worst, std::abs(r[2] - r[3]));
    }
    sum.result("max_abs_difference", worst);
  } else {
    throw ConfigError("slab: unknown --mode '" + ctx.slab_mode + "' (bo, coupled or scan)");
  }
}

void cmd_flux(const Context& ctx, Summary& sum) {
  auto cfg = load_config(ctx, "flux", with(kSlabKeys, {"energy", "w", "rtol"}), {"beta", "b0", "delta", "energy"});
  sum.input(cfg);
  const auto c = slab_config(cfg);
  slab2d::SolverOptions opts;
  opts.rtol = cfg.number_or("rtol", opts.rtol);
  if (ctx.has_tolerance()) opts.agreement = ctx.tolerance;
  const double w = cfg.number_or("w", 1.0);
  const auto sol = slab2d::coupled_scatter(cfg.number("energy"), c, opts);
  const auto f = slab2d::flux_functional(sol, w);
  const auto& a = sol.amplitudes();
  CsvWriter csv(ctx.out("flux.csv"), {"w", "diabatic", "adiabatic_current", "gauge_part", "formula", "per_width",
                                      "abs_t12_sq", "abs_r12_sq"});
  csv.row({w, f.diabatic, f.adiabatic_current, f.gauge_part, f.formula, f.per_width(), std::norm(a.t12),
           std::norm(a.r12)});
  sum.result("diabatic", f.diabatic);
  sum.result("adiabatic_sum", f.adiabatic_current + f.gauge_part);
  sum.result("formula", f.formula);
  sum.result("per_width", f.per_width());
  sum.result("open_regime", a.regime == slab2d::Regime::Open ? 1.0 : 0.0);
  const double rel = std::abs(f.diabatic - f.adiabatic_current - f.gauge_part) / std::abs(f.diabatic);
  sum.result("gauge_split_relative", rel);
  sum.assertion("gauge_invariance_1e-8", rel <= 1e-8);
}

void cmd_current_field(const Context& ctx, Summary& sum) {
  auto cfg = load_config(ctx, "current-field",
                         with(kSlabKeys, {"energy", "x_min", "x_max", "x_points", "y_min", "y_max", "y_points", "rtol"}),
                         {"beta", "b0", "delta", "energy"});
  sum.input(cfg);
  const auto c = slab_config(cfg);
  slab2d::SolverOptions opts;
  opts.rtol = cfg.number_or("rtol", opts.rtol);
  if (ctx.has_tolerance()) opts.agreement = ctx.tolerance;
  const auto sol = slab2d::coupled_scatter(cfg.number("energy"), c, opts);
  const auto xs = sweep(cfg, "x"), ys = sweep(cfg, "y");
  CsvWriter csv(ctx.out("current_field.csv"), {"x", "y", "jx", "jy"});
  for (const auto& s : slab2d::current_field(sol, xs, ys)) csv.row({s.x, s.y, s.jx, s.jy});
  if (xs.size() >= 3 && ys.size() >= 3) sum.result("divergence_residual", slab2d::divergence_residual(sol, xs, ys));
}

const std::set<std::string> kTdseKeys = {"k",       "delta",     "flux",     "beta",      "sigma",        "xi0",
                                         "eta0",    "dt",        "max_steps", "output_every", "xi_stop",   "free_flight_xi",
                                         "nx",      "ny",        "xi_min",   "xi_max",    "eta_min",      "eta_max",
                                         "guard",   "snapshot_every", "focal", "gamma",   "impacts"};

tdse::TdseConfig tdse_config(const ExperimentConfig& cfg, const Context& ctx) {
  tdse::TdseConfig c;
  c.k = cfg.number("k");
  c.delta = cfg.number("delta");
  c.flux = cfg.number_or("flux", 0.0);
  c.beta = cfg.number_or("beta", c.beta);
  c.sigma = cfg.number_or("sigma", c.sigma);
  c.xi0 = cfg.number_or("xi0", c.xi0);
  c.eta0 = cfg.number_or("eta0", c.eta0);
  c.dt = cfg.number_or("dt", c.dt);
  c.max_steps = cfg.integer_or("max_steps", c.max_steps);
  c.output_every = static_cast<int>(cfg.integer_or("output_every", c.output_every));
  c.xi_stop = cfg.number_or("xi_stop", c.xi_stop);
  c.free_flight_xi = cfg.number_or("free_flight_xi", c.free_flight_xi);
  c.grid.nx = static_cast<int>(cfg.integer_or("nx", c.grid.nx));
  c.grid.ny = static_cast<int>(cfg.integer_or("ny", c.grid.ny));
  c.grid.xi_min = cfg.number_or("xi_min", c.grid.xi_min);
  c.grid.xi_max = cfg.number_or("xi_max", c.grid.xi_max);
  c.grid.eta_min = cfg.number_or("eta_min", c.grid.eta_min);
  c.grid.eta_max = cfg.number_or("eta_max", c.grid.eta_max);
  c.guard = cfg.number_or("guard", c.guard);
  c.focal = cfg.number_or("focal", c.focal);
  c.gamma = cfg.number_or("gamma", c.gamma);
  if (ctx.has_tolerance()) c.wrap_tolerance = ctx.tolerance;
  try {
    c.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(cfg.source() + ": " + e.what());
  }
  return c;
}

void write_trajectory(const std::string& path, const tdse::Trajectory& traj) {
  CsvWriter csv(path, {"tau", "xi_mean", "eta_mean", "pop_f", "pop_g", "norm", "xi_f", "eta_f", "xi_g", "eta_g"});
  for (const auto& p : traj)
    csv.row({p.tau, p.xi_mean, p.eta_mean, p.pop_f, p.pop_g, p.norm, p.xi_f, p.eta_f, p.xi_g, p.eta_g});
}

void cmd_tdse(const Context& ctx, Summary& sum) {
  auto cfg = load_config(ctx, "tdse", kTdseKeys, {"k", "delta", "flux"});
  sum.input(cfg);
  const auto c = tdse_config(cfg, ctx);
  const long snapshot_every = cfg.integer_or("snapshot_every", 0);
  long index = 0, written = 0;
  const auto run = tdse::propagate(c, [&](const tdse::SpinorField& field, const tdse::TrajectoryPoint&) {
    if (snapshot_every > 0 && index % snapshot_every == 0) {
      const auto& g = field.grid;
      const std::string stem = ctx.out("snapshot_" + std::to_string(written));
      std::ofstream meta(stem + ".meta");
      meta << "nx = " << g.nx << "\nny = " << g.ny << "\nxi_min = " << io::format_number(g.xi_min)
           << "\nxi_max = " << io::format_number(g.xi_max) << "\neta_min = " << io::format_number(g.eta_min)
           << "\neta_max = " << io::format_number(g.eta_max) << "\ntau = " << io::format_number(field.tau) << "\n";
      CsvWriter csv(stem + ".csv", {"xi", "eta", "density_f", "density_g"});
      for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
          const std::size_t n = static_cast<std::size_t>(i) * g.ny + j;
          csv.row({g.xi(i), g.eta(j), std::norm(field.f[n]), std::norm(field.g[n])});
        }
      ++written;
    }
    ++index;
  });
  write_trajectory(ctx.out("trajectory.csv"), run.trajectory);
  sum.result("steps", static_cast<double>(run.steps));
  sum.result("final_pop_f", run.trajectory.back().pop_f);
  sum.result("final_norm", run.trajectory.back().norm);
  try {
    const auto fit = tdse::deflection_from_trajectory(run.trajectory, c.free_flight_xi);
    sum.result("tan_theta", std::abs(fit.slope));
    sum.result("slope", fit.slope);
    sum.result("fit_residual", fit.residual);
  } catch (const InsufficientPropagationError& e) {
    sum.doc["results"]["tan_theta"] = nullptr;
    sum.doc["results"]["deflection_error"] = e.what();
  }
  if (c.k > c.flux) {
    const auto path = tdse::classical_trajectory(c.k, c, c.eta0);
    sum.result("tan_theta_classical", std::abs(path.tan_theta));
  }
}

void cmd_lens(const Context& ctx, Summary& sum) {
  auto cfg = load_config(ctx, "lens", kTdseKeys, {"k", "delta", "focal", "impacts"});
  sum.input(cfg);
  auto c = tdse_config(cfg, ctx);
  c.profile = tdse::FluxProfile::Lens;
  const auto impacts = cfg.list("impacts");
  if (impacts.size() < 2) throw ConfigError(cfg.source() + ": key 'impacts' needs at least 2 values");
  const auto runs = parallel_map(impacts, ctx.threads, [&](double b) {
    auto cc = c;
    cc.eta0 = b;
    return tdse::propagate(cc).trajectory;
  });
  std::vector<tdse::LineFit> fits;
  CsvWriter csv(ctx.out("lens.csv"), {"impact", "tau", "xi_mean", "eta_mean", "norm"});
  for (std::size_t i = 0; i < impacts.size(); ++i) {
    for (const auto& p : runs[i]) csv.row({impacts[i], p.tau, p.xi_mean, p.eta_mean, p.norm});
    fits.push_back(tdse::deflection_from_trajectory(runs[i], c.free_flight_xi));
  }
  const auto focus = tdse::focal_point(fits);
  const auto classical = tdse::classical_lens(impacts, c, c.free_flight_xi);
  CsvWriter ccsv(ctx.out("lens_classical.csv"), {"impact", "t", "xi", "eta"});
  for (double b : impacts) {
    const auto path = tdse::classical_trajectory(c.k, c, b);
    for (std::size_t i = 0; i < path.points.size(); i += 20)
      ccsv.row({b, path.points[i].t, path.points[i].xi, path.points[i].eta});
  }
  sum.result("focal_xi", focus[0]);
  sum.result("focal_eta", focus[1]);
  sum.result("classical_focal_xi", classical.focal_xi);
  sum.result("classical_focal_eta", classical.focal_eta);
}

void cmd_ferroslab(const Context& ctx, Summary& sum) {
  auto cfg = load_config(ctx, "ferroslab", {"b0", "length", "k", "k_min", "k_max", "k_points"}, {"b0", "length"});
  sum.input(cfg);
  ferroslab::Config c{cfg.number("b0"), cfg.number("length"), 0.5};
  c.validate();
  CsvWriter csv(ctx.out("ferroslab.csv"), {"k", "re_r", "im_r", "re_t", "im_t", "abs_r", "transmitting", "tan_theta"});
  double worst = 0.0;
  for (double k : sweep(cfg, "k")) {
    const auto s = ferroslab::slab_analytic(k, c);
    double tan = 0.0;
    if (s.transmitting) {
      const auto cur = ferroslab::slab_currents(s.r, s.t, k, c.flux(), c.mass);
      tan = cur.tan_theta;
      worst = std::max(worst, std::abs(cur.j_in + cur.j_refl - cur.j_x) / cur.j_in);
    }
    csv.row({k, s.r.real(), s.r.imag(), s.t.real(), s.t.imag(), std::abs(s.r), s.transmitting ? 1.0 : 0.0, tan});
  }
  sum.result("current_conservation", worst);
  sum.assertion("current_conservation_1e-10", worst <= 1e-10);
}

void cmd_holonomy(const Context& ctx, Summary& sum) {
  auto cfg = load_config(ctx, "holonomy", {"radius", "omega", "steps", "times"}, {"radius"});
  sum.input(cfg);
  internal_gauge::AbConfig ab;
  ab.radius = cfg.number("radius");
  ab.omega = cfg.number_or("omega", 1.0);
  ab.validate();
  const auto conn = internal_gauge::ab_gauge_connection(ab);
  const auto loop = gauge::ParamPath::arc(RVector::Zero(2), ab.radius, 0.0, 2.0 * std::numbers::pi);
  CsvWriter csv(ctx.out("holonomy.csv"), {"steps", "loop_error", "error_estimate"});
  const long max_steps = cfg.integer_or("steps", 10000);
  double final_error = 0.0;
  for (long n = 625; n <= max_steps; n *= 2) {
    const auto w = gauge::wilson_line(conn, loop, static_cast<int>(n));
    final_error = max_abs(w.value - CMatrix::Identity(2, 2));
    csv.row({static_cast<double>(n), final_error, w.error_estimate});
  }
  CsvWriter arc(ctx.out("holonomy_arc.csv"), {"t", "closed_form_error"});
  for (double t : cfg.list_or("times", {0.5, 1.0, 2.0, 3.0})) {
    const auto w = gauge::wilson_line(conn, internal_gauge::ab_arc(t, ab), static_cast<int>(max_steps));
    arc.row({t, max_abs(w.value * internal_gauge::ab_wilson(0.0, ab) - internal_gauge::ab_wilson(t, ab))});
  }
  const double tol = ctx.has_tolerance() ? ctx.tolerance : 1e-7;
  sum.result("loop_error", final_error);
  sum.assertion("loop_identity", final_error <= tol);
}

void cmd_internal(const Context& ctx, Summary& sum) {
  auto cfg = load_config(ctx, "internal", {"delta", "rho", "rho_min", "rho_max", "rho_points", "alpha", "r", "theta"},
                         {"delta", "alpha", "r"});
  sum.input(cfg);
  internal_gauge::AbConfig ab;
  ab.delta = cfg.number("delta");
  ab.validate();
  CsvWriter abcsv(ctx.out("internal_ab.csv"), {"rho", "a_phi", "potential", "induced"});
  for (double rho : sweep(cfg, "rho")) {
    const auto bo = internal_gauge::ab_bo(rho, ab);
    abcsv.row({rho, bo.a_phi, bo.potential, bo.induced});
  }
  internal_gauge::DipolarConfig dip;
  dip.alpha = cfg.number("alpha");
  dip.r = cfg.number("r");
  CsvWriter dcsv(ctx.out("internal_dipolar.csv"), {"theta", "e0", "e1", "e2", "e3", "defect", "diag_phi_hat"});
  double worst = 0.0;
  for (double th : cfg.list_or("theta", {0.3, 0.8, 1.2, std::numbers::pi / 2, 2.0, 2.7})) {
    dip.theta = th;
    dip.phi = 0.4;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(internal_gauge::dipolar_hamiltonian(dip));
    const double defect = internal_gauge::dipolar_factorization_defect(dip);
    worst = std::max(worst, defect);
    const auto conn = internal_gauge::dipolar_connection(th, dip.phi, dip.r);
    dcsv.row({th, es.eigenvalues()[0], es.eigenvalues()[1], es.eigenvalues()[2], es.eigenvalues()[3], defect,
              conn.phi_hat(0, 0).real()});
  }
  sum.result("max_factorization_defect", worst);
  sum.assertion("factorization_1e-10", worst <= 1e-10);
}

int cmd_accept(const Context& ctx, Summary& sum) {
  CsvWriter csv(ctx.out("acceptance.csv"), {"criterion", "passed", "seconds"});
  const auto results = acceptance::run_acceptance({}, [&](const acceptance::CriterionResult& r) {
    std::cout << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail << "\n"
              << std::flush;
  });
  for (const auto& r : results) {
    csv.row({static_cast<double>(r.id), r.passed ? 1.0 : 0.0, r.seconds});
    sum.assertion("criterion_" + std::to_string(r.id), r.passed);
    sum.doc["results"]["criterion_" + std::to_string(r.id) + "_detail"] = r.detail;
  }
  return sum.all_passed ? kSuccess : kAcceptanceFailure;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Geometric magnetism toolkit"};
  app.require_subcommand(1);
  Context ctx;
  ctx.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--config", ctx.config_path, "Experiment config file (key = value)");
  app.add_option("--out", ctx.out_dir, "Output directory");
  app.add_option("--threads", ctx.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--tolerance", ctx.tolerance, "Override the subcommand's numerical tolerance");
  app.add_flag("--seedless", ctx.seedless, "No random numbers are used (always on)");
  app.fallthrough();

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"potentials", "Slab potentials and induction"},
      {"scatter1d", "One-dimensional model reflection sweep"},
      {"slab", "Slab scattering at normal incidence"},
      {"flux", "Current functional on a rectangle"},
      {"current-field", "Current density on a grid"},
      {"tdse", "Wave-packet propagation and deflection"},
      {"lens", "Lens trajectories and focal point"},
      {"ferroslab", "Uniform-field slab reflection and transmission"},
      {"holonomy", "Wilson loop and arc checks"},
      {"internal", "Aharonov-Bohm and dipolar checks"},
      {"accept", "Run the acceptance suite"}};
  std::map<std::string, CLI::App*> cmds;
  for (const auto& [name, help] : subs) cmds[name] = app.add_subcommand(name, help);
  cmds["slab"]->add_option("--mode", ctx.slab_mode, "bo, coupled or scan")->check(CLI::IsMember({"bo", "coupled", "scan"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Summary sum(name);
  const auto t0 = std::chrono::steady_clock::now();
  int code = kSuccess;
  try {
    std::filesystem::create_directories(ctx.out_dir);
    if (name == "potentials") cmd_potentials(ctx, sum);
    else if (name == "scatter1d") cmd_scatter1d(ctx, sum);
    else if (name == "slab") cmd_slab(ctx, sum);
    else if (name == "flux") cmd_flux(ctx, sum);
    else if (name == "current-field") cmd_current_field(ctx, sum);
    else if (name == "tdse") cmd_tdse(ctx, sum);
    else if (name == "lens") cmd_lens(ctx, sum);
    else if (name == "ferroslab") cmd_ferroslab(ctx, sum);
    else if (name == "holonomy") cmd_holonomy(ctx, sum);
    else if (name == "internal") cmd_internal(ctx, sum);
    else if (name == "accept") code = cmd_accept(ctx, sum);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << name << ": numerical failure: " << e.what() << "\n";
    sum.doc["error"] = e.what();
    code = kNumericalError;
  }
  if (code == kSuccess && !sum.all_passed) code = kAcceptanceFailure;
  sum.doc["exit_code"] = code;
  sum.doc["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream(ctx.out("summary.json")) << sum.doc.dump(2) << "\n";
  return code;
}

}  // namespace geomag::cli
