#pragma once

#include <Eigen/Dense>
#include <complex>

namespace geomag {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr cplx I{0.0, 1.0};

// Pauli matrices (index 0 is the identity).
Eigen::Matrix2cd pauli(int i);

// exp(iH) for Hermitian H. 2x2 uses the Pauli decomposition, larger sizes use
// scaling and squaring of the Taylor series.
CMatrix expi_hermitian(const CMatrix& h);

double max_abs(const CMatrix& m);
double hermiticity_defect(const CMatrix& m);
double unitarity_defect(const CMatrix& m);
bool all_finite(const CMatrix& m);

// Spin-1/2 operators for two particles on |uu>,|ud>,|du>,|dd>.
Eigen::Matrix4cd spin_a(int i);
Eigen::Matrix4cd spin_b(int i);

}  // namespace geomag
