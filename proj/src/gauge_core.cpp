#include "geomag/gauge_core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "geomag/errors.hpp"

namespace geomag::gauge {

GaugeConnection::GaugeConnection(int dimension, int channels, Evaluator evaluator,
                                 std::vector<SingularLocus> singular)
    : dimension_(dimension),
      channels_(channels),
      evaluator_(std::make_shared<const Evaluator>(std::move(evaluator))),
      singular_(std::move(singular)) {
  if (dimension < 1) throw ArgumentError("connection dimension must be >= 1");
  if (channels < 1) throw ArgumentError("connection channel count must be >= 1");
}

double GaugeConnection::clearance(const RVector& point) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& locus : singular_) best = std::min(best, (point - locus.center).norm() - locus.radius);
  return best;
}

std::vector<CMatrix> GaugeConnection::operator()(const RVector& point) const {
  if (point.size() != dimension_) throw ArgumentError("point dimension does not match connection");
  if (clearance(point) < 0.0) {
    std::ostringstream msg;
    msg << "connection evaluated inside the exclusion zone of a singular locus at distance "
        << clearance(point);
    throw DomainError(msg.str());
  }
  std::vector<CMatrix> a = (*evaluator_)(point);
  if (static_cast<int>(a.size()) != dimension_) throw InvariantError("connection returned wrong component count");
  for (const auto& c : a) {
    if (c.rows() != channels_ || c.cols() != channels_)
      throw InvariantError("connection component has wrong shape");
    if (!all_finite(c)) throw EvaluationError("connection value is not finite", 0.0);
    if (hermiticity_defect(c) > 1e-12 * std::max(1.0, max_abs(c)))
      throw InvariantError("connection component is not Hermitian");
  }
  return a;
}

ParamPath::ParamPath(int dimension, Curve curve, bool closed, Curve tangent)
    : dimension_(dimension),
      curve_(std::make_shared<const Curve>(std::move(curve))),
      tangent_(std::make_shared<const Curve>(std::move(tangent))),
      closed_(closed) {
  if (closed_) {
    const RVector a = (*curve_)(0.0);
    const RVector b = (*curve_)(1.0);
    if ((a - b).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff()))
      throw ArgumentError("closed path endpoints do not coincide");
  }
}

ParamPath ParamPath::segment(const RVector& from, const RVector& to) {
  return ParamPath(
      static_cast<int>(from.size()), [from, to](double t) -> RVector { return from + t * (to - from); }, false,
      [from, to](double) -> RVector { return to - from; });
}

ParamPath ParamPath::arc(const RVector& center, double r, double phi0, double phi1) {
  const bool closed = std::abs(std::abs(phi1 - phi0) - 2.0 * std::numbers::pi) < 1e-15;
  return ParamPath(
      2,
      [center, r, phi0, phi1, closed](double t) -> RVector {
        // The end point of a full circle is returned exactly equal to the start.
        const double phi = (closed && t == 1.0) ? phi0 : phi0 + t * (phi1 - phi0);
        RVector p(2);
        p << center[0] + r * std::cos(phi), center[1] + r * std::sin(phi);
        return p;
      },
      closed,
      [r, phi0, phi1](double t) -> RVector {
        const double phi = phi0 + t * (phi1 - phi0);
        RVector d(2);
        d << -std::sin(phi), std::cos(phi);
        return r * (phi1 - phi0) * d;
      });
}

ParamPath ParamPath::reversed() const {
  auto curve = curve_;
  auto tangent = tangent_;
  Curve back;
  if (*tangent) back = [tangent](double t) -> RVector { return -(*tangent)(1.0 - t); };
  return ParamPath(dimension_, [curve](double t) { return (*curve)(1.0 - t); }, closed_, std::move(back));
}

namespace {

CMatrix ordered_product(const GaugeConnection& conn, const ParamPath& path, int steps) {
  const int n = conn.channels();
  CMatrix w = CMatrix::Identity(n, n);
  RVector prev = path(0.0);
  for (int i = 0; i < steps; ++i) {
    const double ta = static_cast<double>(i) / steps;
    const double tb = static_cast<double>(i + 1) / steps;
    const RVector next = path(tb);
    const double tm = 0.5 * (ta + tb);
    const RVector mid = path(tm);
    std::vector<CMatrix> a;
    try {
      a = conn(mid);
    } catch (const EvaluationError&) {
      std::ostringstream msg;
      msg << "non-finite connection value on path at t = " << tm;
      throw EvaluationError(msg.str(), tm);
    }
    CMatrix h = CMatrix::Zero(n, n);
    const RVector dr = path.has_tangent() ? RVector(path.tangent(tm) / steps) : RVector(next - prev);
    for (int mu = 0; mu < conn.dimension(); ++mu) h += dr[mu] * a[mu];
    w = expi_hermitian(h) * w;
    prev = next;
  }
  return w;
}

}  // namespace

HolonomyResult wilson_line(const GaugeConnection& conn, const ParamPath& path, int steps) {
  if (steps < 2) throw ArgumentError("wilson_line needs at least 2 steps");
  if (path.dimension() != conn.dimension()) throw ArgumentError("path and connection dimensions differ");
  HolonomyResult result;
  result.steps = steps;
  result.value = ordered_product(conn, path, steps);
  const CMatrix coarse = ordered_product(conn, path, steps / 2);
  result.error_estimate = max_abs(result.value - coarse) / 3.0;
  const double defect = unitarity_defect(result.value);
  if (defect > 1e-10) {
    std::ostringstream msg;
    msg << "wilson_line result not unitary (defect " << defect << ")";
    throw InvariantError(msg.str());
  }
  return result;
}

Curvature::Curvature(int dimension, int channels)
    : dim_(dimension), f_(dimension * dimension, CMatrix::Zero(channels, channels)) {}

double Curvature::max_norm() const {
  double m = 0.0;
  for (const auto& f : f_) m = std::max(m, max_abs(f));
  return m;
}

Curvature curvature(const GaugeConnection& conn, const RVector& point, double h) {
  if (!(h > 0.0)) throw ArgumentError("curvature step h must be positive");
  if (conn.clearance(point) < 2.0 * h) {
    std::ostringstream msg;
    msg << "curvature requested within 2h of a singular locus (clearance " << conn.clearance(point)
        << ", h = " << h << ")";
    throw DomainError(msg.str());
  }
  const int d = conn.dimension();
  const int n = conn.channels();
  Curvature f(d, n);
  const std::vector<CMatrix> a = conn(point);
  // Derivatives d_mu A_nu for all mu, nu.
  std::vector<std::vector<CMatrix>> da(d);
  for (int mu = 0; mu < d; ++mu) {
    RVector p = point, q = point;
    p[mu] += h;
    q[mu] -= h;
    const auto ap = conn(p);
    const auto aq = conn(q);
    for (int nu = 0; nu < d; ++nu) da[mu].push_back((ap[nu] - aq[nu]) / (2.0 * h));
  }
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = mu + 1; nu < d; ++nu) {
      const CMatrix fmn = da[mu][nu] - da[nu][mu] - I * (a[mu] * a[nu] - a[nu] * a[mu]);
      f.at(mu, nu) = fmn;
      f.at(nu, mu) = -fmn;
    }
  }
  return f;
}

UnitaryFamily::UnitaryFamily(int dimension, int channels, Evaluator evaluator)
    : dimension_(dimension),
      channels_(channels),
      evaluator_(std::make_shared<const Evaluator>(std::move(evaluator))) {}

CMatrix UnitaryFamily::operator()(const RVector& point) const {
  CMatrix u = (*evaluator_)(point);
  if (u.rows() != channels_ || u.cols() != channels_) throw InvariantError("unitary family has wrong shape");
  if (!all_finite(u)) throw EvaluationError("unitary family value is not finite", 0.0);
  const double defect = unitarity_defect(u);
  if (defect > 1e-10) {
    std::ostringstream msg;
    msg << "unitary family is not unitary at the evaluated point (defect " << defect << ")";
    throw InvariantError(msg.str());
  }
  return u;
}

ConnectionSample connection_from_unitary(const UnitaryFamily& family, const RVector& point,
                                         double h) {
  if (!(h > 0.0)) throw ArgumentError("finite-difference step h must be positive");
  ConnectionSample sample;
  const CMatrix u = family(point);
  for (int mu = 0; mu < family.dimension(); ++mu) {
    RVector p = point, q = point;
    p[mu] += h;
    q[mu] -= h;
    const CMatrix du = (family(p) - family(q)) / (2.0 * h);
    const CMatrix a = I * u.adjoint() * du;
    sample.hermiticity_defect = std::max(sample.hermiticity_defect, hermiticity_defect(a));
    sample.components.push_back(0.5 * (a + a.adjoint()));
  }
  return sample;
}

GaugeConnection connection_of(const UnitaryFamily& family, double h,
                              std::vector<SingularLocus> singular) {
  return GaugeConnection(
      family.dimension(), family.channels(),
      [family, h](const RVector& p) { return connection_from_unitary(family, p, h).components; },
      std::move(singular));
}

GaugeConnection projected_connection(const GaugeConnection& conn, const std::vector<int>& channels) {
  if (channels.empty()) throw ArgumentError("projected_connection needs a non-empty channel subset");
  std::set<int> seen;
  for (int c : channels) {
    if (c < 0 || c >= conn.channels()) throw ArgumentError("projected_connection channel index out of range");
    if (!seen.insert(c).second) throw ArgumentError("projected_connection channel index repeated");
  }
  const int m = static_cast<int>(channels.size());
  return GaugeConnection(
      conn.dimension(), m,
      [conn, channels, m](const RVector& p) {
        std::vector<CMatrix> full = conn(p);
        std::vector<CMatrix> out;
        for (const auto& a : full) {
          CMatrix b(m, m);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) b(i, j) = a(channels[i], channels[j]);
          out.push_back(b);
        }
        return out;
      },
      conn.singular_loci());
}

}  // namespace geomag::gauge
