#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "geomag/linalg.hpp"

namespace geomag::gauge {

// Point singularity of a connection (e.g. the origin of the Aharonov-Bohm
// potential). Evaluation within `radius` of `center` is refused.
struct SingularLocus {
  RVector center;
  double radius = 0.0;
};

class GaugeConnection {
 public:
  using Evaluator = std::function<std::vector<CMatrix>(const RVector&)>;

  GaugeConnection(int dimension, int channels, Evaluator evaluator,
                  std::vector<SingularLocus> singular = {});

  int dimension() const { return dimension_; }
  int channels() const { return channels_; }
  const std::vector<SingularLocus>& singular_loci() const { return singular_; }

  // Distance from `point` to the nearest declared singular locus minus its
  // exclusion radius (infinity when none are declared).
  double clearance(const RVector& point) const;

  // Components A_mu at `point`. Throws DomainError inside an exclusion zone,
  // EvaluationError on non-finite output and InvariantError on non-Hermitian
  // output.
  std::vector<CMatrix> operator()(const RVector& point) const;

 private:
  int dimension_;
  int channels_;
  std::shared_ptr<const Evaluator> evaluator_;
  std::vector<SingularLocus> singular_;
};

class ParamPath {
 public:
  using Curve = std::function<RVector(double)>;

  // Without a tangent, segment increments fall back to chords.
  ParamPath(int dimension, Curve curve, bool closed = false, Curve tangent = {});

  static ParamPath segment(const RVector& from, const RVector& to);
  // Circle arc of radius r around `center` from angle phi0 to phi1 (2D).
  static ParamPath arc(const RVector& center, double r, double phi0, double phi1);

  int dimension() const { return dimension_; }
  bool closed() const { return closed_; }
  RVector operator()(double t) const { return (*curve_)(t); }
  bool has_tangent() const { return static_cast<bool>(*tangent_); }
  RVector tangent(double t) const { return (*tangent_)(t); }
  ParamPath reversed() const;

 private:
  int dimension_;
  std::shared_ptr<const Curve> curve_;
  std::shared_ptr<const Curve> tangent_;
  bool closed_;
};

struct HolonomyResult {
  CMatrix value;
  // |W(steps) - W(steps/2)|_max / 3, the Richardson estimate for a
  // second-order rule.
  double error_estimate = 0.0;
  int steps = 0;
};

// Path-ordered exponential P exp(i int A.dR) with later points to the left,
// using the midpoint rule on `steps` uniform segments in t.
HolonomyResult wilson_line(const GaugeConnection& conn, const ParamPath& path, int steps);

// Field strength F_{mu nu} = d_mu A_nu - d_nu A_mu - i[A_mu, A_nu].
class Curvature {
 public:
  explicit Curvature(int dimension, int channels);
  const CMatrix& operator()(int mu, int nu) const { return f_[mu * dim_ + nu]; }
  CMatrix& at(int mu, int nu) { return f_[mu * dim_ + nu]; }
  int dimension() const { return dim_; }
  double max_norm() const;

 private:
  int dim_;
  std::vector<CMatrix> f_;
};

Curvature curvature(const GaugeConnection& conn, const RVector& point, double h);

class UnitaryFamily {
 public:
  using Evaluator = std::function<CMatrix(const RVector&)>;

  UnitaryFamily(int dimension, int channels, Evaluator evaluator);
  int dimension() const { return dimension_; }
  int channels() const { return channels_; }
  // Throws InvariantError when the value is not unitary to 1e-10.
  CMatrix operator()(const RVector& point) const;

 private:
  int dimension_;
  int channels_;
  std::shared_ptr<const Evaluator> evaluator_;
};

struct ConnectionSample {
  std::vector<CMatrix> components;
  // Largest |A - A^dagger| before symmetrization.
  double hermiticity_defect = 0.0;
};

// i U^dagger d_mu U by central differences with step h, symmetrized.
ConnectionSample connection_from_unitary(const UnitaryFamily& family, const RVector& point,
                                         double h);

// Wraps connection_from_unitary as a GaugeConnection evaluator.
GaugeConnection connection_of(const UnitaryFamily& family, double h,
                              std::vector<SingularLocus> singular = {});

GaugeConnection projected_connection(const GaugeConnection& conn, const std::vector<int>& channels);

}  // namespace geomag::gauge
