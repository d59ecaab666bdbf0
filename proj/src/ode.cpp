#include "geomag/ode.hpp"

#include <algorithm>
#include <cmath>

#include "geomag/errors.hpp"

namespace geomag::ode {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Difference between the fifth- and fourth-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

class Rhs {
 public:
  Rhs(const Coupling& coupling, Eigen::Index n) : coupling_(coupling), n_(n), p_(n, n) {}

  void operator()(double x, const CMatrix& y, CMatrix& dy) {
    coupling_(x, p_);
    dy.topRows(n_) = y.bottomRows(n_);
    dy.bottomRows(n_).noalias() = p_ * y.topRows(n_);
  }

 private:
  const Coupling& coupling_;
  Eigen::Index n_;
  CMatrix p_;
};

void renormalize(Solutions& s) {
  for (Eigen::Index j = 0; j < s.y.cols(); ++j) {
    const double norm = s.y.col(j).cwiseAbs().maxCoeff();
    if (norm > 0.0 && std::isfinite(norm)) {
      s.y.col(j) /= norm;
      s.log_scale[j] += std::log(norm);
    }
  }
}

}  // namespace

Stats integrate(const Coupling& coupling, Solutions& s, double x_end, const Options& options,
                const std::vector<double>& stops,
                const std::function<void(const Solutions&)>& observer) {
  if (s.y.rows() % 2 != 0) throw ArgumentError("ode: state must hold [f; f'] rows");
  if (s.log_scale.size() != s.y.cols()) s.log_scale = RVector::Zero(s.y.cols());
  const Eigen::Index n = s.y.rows() / 2;
  const Eigen::Index cols = s.y.cols();
  Rhs rhs(coupling, n);
  Stats stats;
  const double dir = x_end >= s.x ? 1.0 : -1.0;
  double h = std::min(options.h_init, options.h_max);

  CMatrix k1(2 * n, cols), k2(2 * n, cols), k3(2 * n, cols), k4(2 * n, cols),
      k5(2 * n, cols), k6(2 * n, cols), k7(2 * n, cols), tmp(2 * n, cols), ynew(2 * n, cols);

  renormalize(s);
  std::size_t next_stop = 0;
  auto target = [&]() {
    return next_stop < stops.size() ? stops[next_stop] : x_end;
  };

  while (true) {
    while (next_stop < stops.size() && dir * (stops[next_stop] - s.x) <= 0.0) {
      if (observer) observer(s);
      ++next_stop;
    }
    const double xt = target();
    const double remaining = dir * (xt - s.x);
    if (remaining <= 0.0) {
      if (next_stop >= stops.size()) break;
      continue;
    }
    bool last = false;
    double step = h;
    if (step >= remaining * (1.0 - 1e-12)) {
      step = remaining;
      last = true;
    }
    const double hs = dir * step;
    const double x = s.x;
    const CMatrix& y = s.y;
    rhs(x, y, k1);
    tmp = y + hs * a21 * k1;
    rhs(x + c2 * hs, tmp, k2);
    tmp = y + hs * (a31 * k1 + a32 * k2);
    rhs(x + c3 * hs, tmp, k3);
    tmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(x + c4 * hs, tmp, k4);
    tmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(x + c5 * hs, tmp, k5);
    tmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(x + hs, tmp, k6);
    ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(x + hs, ynew, k7);
    tmp = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double scale = std::max(y.col(j).cwiseAbs().maxCoeff(), ynew.col(j).cwiseAbs().maxCoeff());
      const double ej = tmp.col(j).cwiseAbs().maxCoeff() / (options.rtol * scale + 1e-300);
      err = std::max(err, ej);
    }
    // maxCoeff may drop NaN once vectorized, so test the state itself.
    if (!std::isfinite(err) || !ynew.allFinite() || !tmp.allFinite())
      throw EvaluationError("ode: non-finite state", x);

    const double factor =
        err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      s.y = ynew;
      s.x = last ? xt : x + hs;
      renormalize(s);
      ++stats.accepted;
      if (!last || step >= h * 0.5) h = std::min(step * factor, options.h_max);
    } else {
      ++stats.rejected;
      h = step * factor;
      if (h < 1e-14 * std::max(1.0, std::abs(x)))
        throw AccuracyError("ode: step size underflow", err);
    }
    if (stats.accepted + stats.rejected > options.max_steps)
      throw AccuracyError("ode: step budget exhausted", err);
  }
  return stats;
}

}  // namespace geomag::ode
