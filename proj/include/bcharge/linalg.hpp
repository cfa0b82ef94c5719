#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>

#include "bcharge/errors.hpp"

namespace bcharge {

using cplx = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns).
template <typename Scalar>
struct HermitianEigen {
  Eigen::VectorXd values;
  Matrix<Scalar> vectors;
};

HermitianEigen<double> hermitian_eigen(Eigen::MatrixXd a, bool want_vectors = true);
HermitianEigen<cplx> hermitian_eigen(Eigen::MatrixXcd a, bool want_vectors = true);

/// Which dense eigensolver is in use ("lapacke", "eigen", or a mix).
std::string eigensolver_backend();

/// Max-norm of (a - a^dagger) relative to max(1, max|a|).
template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& a, double tol = 1e-12) {
  if (a.rows() != a.cols()) throw DimensionMismatch("matrix is not square");
  if (hermiticity_defect(a) > tol) throw NotHermitian("matrix is not Hermitian");
}

/// exp(-i t H) from a precomputed eigendecomposition of H.
template <typename Scalar>
Eigen::MatrixXcd unitary_from_spectrum(const HermitianEigen<Scalar>& eig, double t) {
  const Eigen::VectorXcd phases =
      (eig.values.template cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
  const Eigen::MatrixXcd v = eig.vectors.template cast<cplx>();
  return v * phases.asDiagonal() * v.adjoint();
}

/// exp(-i t H) for Hermitian H, via unitary diagonalization.
template <typename Scalar>
Eigen::MatrixXcd expm_hermitian(const Matrix<Scalar>& h, double t) {
  require_hermitian(h);
  return unitary_from_spectrum(hermitian_eigen(h), t);
}

/// Integer power by repeated squaring.
Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& m, long long n);

}  // namespace bcharge
