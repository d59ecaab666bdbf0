#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "geomag/errors.hpp"
#include "geomag/gauge_core.hpp"

using namespace geomag;
using namespace geomag::gauge;

namespace {

RVector pt(double x, double y) {
  RVector p(2);
  p << x, y;
  return p;
}

GaugeConnection constant_1d(const CMatrix& a) {
  return GaugeConnection(1, static_cast<int>(a.rows()), [a](const RVector&) { return std::vector<CMatrix>{a}; });
}

}  // namespace

TEST_CASE("constant connection: Wilson line is exp(i A x)") {
  Eigen::Matrix2cd a = 0.4 * pauli(3) + 0.9 * pauli(1);
  const auto conn = constant_1d(a);
  RVector from = RVector::Zero(1), to = RVector::Constant(1, 2.5);
  const auto w = wilson_line(conn, ParamPath::segment(from, to), 64);
  CHECK(max_abs(w.value - CMatrix((I * 2.5 * CMatrix(a)).exp())) < 1e-13);
}

TEST_CASE("path ordering puts later points on the left") {
  // A = sigma_1 on the first half of the path, sigma_3 on the second.
  GaugeConnection conn(1, 2, [](const RVector& p) {
    return std::vector<CMatrix>{p[0] < 1.0 ? CMatrix(pauli(1)) : CMatrix(pauli(3))};
  });
  RVector a = RVector::Zero(1), b = RVector::Constant(1, 1.0), c = RVector::Constant(1, 2.0);
  const auto w1 = wilson_line(conn, ParamPath::segment(a, b), 10);
  const auto w2 = wilson_line(conn, ParamPath::segment(b, c), 10);
  const auto w = wilson_line(conn, ParamPath(1, [](double t) { return RVector::Constant(1, 2.0 * t); }), 20);
  const CMatrix expected = CMatrix((I * CMatrix(pauli(3))).exp()) * CMatrix((I * CMatrix(pauli(1))).exp());
  CHECK(max_abs(w2.value * w1.value - expected) < 1e-13);
  CHECK(max_abs(w.value - expected) < 1e-12);
}

TEST_CASE("second-order convergence and the error estimate") {
  // Non-commuting, position-dependent field on a circle.
  GaugeConnection conn(2, 2, [](const RVector& p) {
    return std::vector<CMatrix>{CMatrix(p[1] * pauli(1)), CMatrix(p[0] * p[0] * pauli(2) + 0.3 * pauli(3))};
  });
  const auto path = ParamPath::arc(pt(0, 0), 1.0, 0.0, 2.0);
  const auto ref = wilson_line(conn, path, 40000);
  const double e1 = max_abs(wilson_line(conn, path, 500).value - ref.value);
  const double e2 = max_abs(wilson_line(conn, path, 1000).value - ref.value);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
  const auto w = wilson_line(conn, path, 1000);
  CHECK(w.error_estimate == doctest::Approx(e2).epsilon(0.1));
}

TEST_CASE("closed paths and reversal") {
  CHECK_THROWS_AS(ParamPath(2, [](double t) { return pt(t, 0.0); }, true), ArgumentError);
  const auto circle = ParamPath::arc(pt(0, 0), 2.0, 0.0, 2.0 * std::numbers::pi);
  CHECK(circle.closed());
  CHECK(max_abs(CMatrix(circle(1.0) - circle(0.0))) == 0.0);
  GaugeConnection conn(2, 2, [](const RVector& p) {
    return std::vector<CMatrix>{CMatrix(p[1] * pauli(1)), CMatrix(p[0] * pauli(2))};
  });
  const auto arc = ParamPath::arc(pt(0, 0), 1.0, 0.2, 1.4);
  const auto fwd = wilson_line(conn, arc, 2000);
  const auto bwd = wilson_line(conn, arc.reversed(), 2000);
  CHECK(max_abs(bwd.value * fwd.value - CMatrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("singular loci, non-finite and non-Hermitian fields") {
  GaugeConnection singular(2, 1, [](const RVector& p) { return std::vector<CMatrix>{CMatrix::Constant(1, 1, 1.0 / p.norm()), CMatrix::Zero(1, 1)}; },
                           {SingularLocus{pt(0, 0), 0.1}});
  CHECK(singular.clearance(pt(1, 0)) == doctest::Approx(0.9));
  CHECK_THROWS_AS(singular(pt(0.05, 0)), DomainError);
  const auto through = ParamPath::segment(pt(-1, 0), pt(1, 0));
  CHECK_THROWS_AS(wilson_line(singular, through, 101), DomainError);

  GaugeConnection nan_field(1, 1, [](const RVector&) { return std::vector<CMatrix>{CMatrix::Constant(1, 1, std::nan(""))}; });
  CHECK_THROWS_AS(nan_field(RVector::Zero(1)), EvaluationError);

  GaugeConnection skew(1, 2, [](const RVector&) { return std::vector<CMatrix>{CMatrix(I * pauli(1))}; });
  CHECK_THROWS_AS(skew(RVector::Zero(1)), InvariantError);
}

TEST_CASE("curvature of a non-pure gauge") {
  // A_x = 0, A_y = x sigma_3 + y sigma_1: F_xy = sigma_3 - i[0, .] = sigma_3.
  GaugeConnection conn(2, 2, [](const RVector& p) {
    return std::vector<CMatrix>{CMatrix::Zero(2, 2), CMatrix(p[0] * pauli(3) + 0.0 * pauli(1))};
  });
  const auto f = curvature(conn, pt(0.3, -0.2), 1e-3);
  CHECK(max_abs(f(0, 1) - CMatrix(pauli(3))) < 1e-9);
  CHECK(max_abs(f(1, 0) + CMatrix(pauli(3))) < 1e-9);
  // Commutator term: constant A_x = sigma_1, A_y = sigma_2 gives -i[s1, s2] = 2 sigma_3.
  GaugeConnection c2(2, 2, [](const RVector&) { return std::vector<CMatrix>{CMatrix(pauli(1)), CMatrix(pauli(2))}; });
  CHECK(max_abs(curvature(c2, pt(0, 0), 1e-3)(0, 1) - 2.0 * CMatrix(pauli(3))) < 1e-12);
}

TEST_CASE("pure gauge from a unitary family is flat") {
  UnitaryFamily fam(2, 2, [](const RVector& p) -> CMatrix {
    return CMatrix((I * CMatrix(p[0] * pauli(1) + p[1] * p[0] * pauli(3))).exp());
  });
  const auto s = connection_from_unitary(fam, pt(0.4, 0.7), 1e-5);
  CHECK(s.hermiticity_defect < 1e-8);
  const auto conn = connection_of(fam, 1e-5);
  CHECK(curvature(conn, pt(0.4, 0.7), 1e-3).max_norm() < 1e-5);
  UnitaryFamily bad(1, 2, [](const RVector&) -> CMatrix { return 2.0 * CMatrix::Identity(2, 2); });
  CHECK_THROWS_AS(bad(RVector::Zero(1)), InvariantError);
}

TEST_CASE("projection keeps the selected block") {
  Eigen::Matrix2cd a;
  a << 1.0, 2.0, 2.0, -3.0;
  const auto conn = constant_1d(a);
  const auto p = projected_connection(conn, {1});
  CHECK(p.channels() == 1);
  CHECK(p(RVector::Zero(1))[0](0, 0) == cplx(-3.0));
  CHECK_THROWS_AS(projected_connection(conn, {}), ArgumentError);
  CHECK_THROWS_AS(projected_connection(conn, {2}), ArgumentError);
  CHECK_THROWS_AS(projected_connection(conn, {0, 0}), ArgumentError);
}
