// SPDX-License-Identifier: Apache-2.0
//
// Small dense linear-algebra helpers shared by every module. All matrices in
// this library are tiny (at most a few dozen rows), so everything is dense
// and dynamic-size.

#ifndef CMACWT_LINALG_HPP
#define CMACWT_LINALG_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cmacwt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest absolute deviation from Hermitian symmetry.
inline double hermitian_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double symmetric_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double max_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

/// Ascending eigenvalues of a Hermitian matrix.
inline Vector hermitian_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Real embedding [[Re, -Im], [Im, Re]] of a complex matrix. For Hermitian M
/// and x = a + ib this satisfies x^H M x = [a; b]^T embed(M) [a; b].
inline Matrix real_embedding(const CMatrix& m) {
  const Eigen::Index r = m.rows(), c = m.cols();
  Matrix out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = m.real();
  out.topRightCorner(r, c) = -m.imag();
  out.bottomLeftCorner(r, c) = m.imag();
  out.bottomRightCorner(r, c) = m.real();
  return out;
}

/// Kronecker product of two complex matrices.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Block-diagonal stacking of two complex matrices.
inline CMatrix block_diag(const CMatrix& a, const CMatrix& b) {
  CMatrix out = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

/// Hermitian PSD square root via eigendecomposition. Eigenvalues slightly
/// below zero are clamped; anything below -1e-6 (relative to the spectral
/// scale) is rejected as genuinely indefinite.
inline CMatrix matrix_sqrt(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error("matrix_sqrt: matrix is not square");
  if (m.size() == 0) return m;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermitian_defect(m) > 1e-9 * scale) throw Error("matrix_sqrt: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  const Vector& ev = es.eigenvalues();
  if (ev(0) < -1e-6 * scale)
    throw Error("matrix_sqrt: matrix is indefinite (min eigenvalue " + std::to_string(ev(0)) + ")");
  const Vector root = ev.cwiseMax(0.0).cwiseSqrt();
  CMatrix out = es.eigenvectors() * root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

inline Matrix matrix_sqrt(const Matrix& m) {
  return matrix_sqrt(CMatrix(m.cast<Complex>())).real();
}

}  // namespace cmacwt

#endif  // CMACWT_LINALG_HPP
