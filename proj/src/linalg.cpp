#include "geomag/linalg.hpp"

#include <cmath>

namespace geomag {

Eigen::Matrix2cd pauli(int i) {
  Eigen::Matrix2cd s;
  switch (i) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -I, I, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

namespace {

Eigen::Matrix2cd expi_2x2(const CMatrix& h) {
  // h = a0 + a.sigma with real a for Hermitian input.
  const double a0 = 0.5 * (h(0, 0) + h(1, 1)).real();
  const double a3 = 0.5 * (h(0, 0) - h(1, 1)).real();
  const cplx off = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
  const double a1 = off.real();
  const double a2 = -off.imag();
  const double n = std::sqrt(a1 * a1 + a2 * a2 + a3 * a3);
  const double c = std::cos(n);
  // sin(n)/n, with a series near zero.
  const double sn = n > 1e-4 ? std::sin(n) / n : 1.0 - n * n / 6.0 + n * n * n * n / 120.0;
  Eigen::Matrix2cd u;
  u(0, 0) = c + I * sn * a3;
  u(1, 1) = c - I * sn * a3;
  u(0, 1) = I * sn * cplx(a1, -a2);
  u(1, 0) = I * sn * cplx(a1, a2);
  return std::exp(I * a0) * u;
}

CMatrix expi_series(const CMatrix& h) {
  const double norm = h.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const CMatrix x = (I / std::ldexp(1.0, squarings)) * h;
  const Eigen::Index n = h.rows();
  CMatrix result = CMatrix::Identity(n, n);
  CMatrix term = CMatrix::Identity(n, n);
  for (int j = 1; j <= 18; ++j) {
    term = term * x / static_cast<double>(j);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace

CMatrix expi_hermitian(const CMatrix& h) {
  if (h.rows() == 2) return expi_2x2(h);
  return expi_series(h);
}

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double hermiticity_defect(const CMatrix& m) { return max_abs(m - m.adjoint()); }

double unitarity_defect(const CMatrix& m) {
  return max_abs(m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols()));
}

bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag())) return false;
  }
  return true;
}

namespace {

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

}  // namespace

Eigen::Matrix4cd spin_a(int i) { return kron(0.5 * pauli(i), pauli(0)); }

Eigen::Matrix4cd spin_b(int i) { return kron(pauli(0), 0.5 * pauli(i)); }

}  // namespace geomag
