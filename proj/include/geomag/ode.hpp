#pragma once

#include <functional>
#include <vector>

#include "geomag/linalg.hpp"

namespace geomag::ode {

// Coefficient matrix P(x) of the linear second-order system f'' = P(x) f.
using Coupling = std::function<void(double x, CMatrix& p)>;

struct Options {
  double rtol = 1e-10;
  double h_init = 1e-3;
  double h_max = 0.05;
  long max_steps = 20'000'000;
};

// A set of solutions stored column-wise as [f; f'] (2n rows). Column j of the
// true solution is exp(log_scale[j]) * y.col(j); columns are renormalized
// after each step so that growing or decaying modes never over- or underflow.
struct Solutions {
  double x = 0.0;
  CMatrix y;
  RVector log_scale;

  Solutions() = default;
  Solutions(double x0, const CMatrix& y0) : x(x0), y(y0), log_scale(RVector::Zero(y0.cols())) {}
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
};

// Adaptive Dormand-Prince 5(4) integration of s from s.x to x_end (either
// direction). The error of each column is measured relative to that column's
// own magnitude. The observer is invoked at every point of `stops`, which must
// be ordered along the integration direction.
Stats integrate(const Coupling& coupling, Solutions& s, double x_end, const Options& options,
                const std::vector<double>& stops = {},
                const std::function<void(const Solutions&)>& observer = {});

}  // namespace geomag::ode
