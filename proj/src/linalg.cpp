#include "bcharge/linalg.hpp"

#ifdef BCHARGE_HAVE_LAPACKE
#include <lapacke.h>
#endif

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace bcharge {

namespace {

template <typename Scalar>
HermitianEigen<Scalar> eigen_backend(const Matrix<Scalar>& a, bool want_vectors) {
  HermitianEigen<Scalar> out;
  if (a.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(
      a, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  out.values = es.eigenvalues();
  if (want_vectors) out.vectors = es.eigenvectors();
  return out;
}

#ifdef BCHARGE_HAVE_LAPACKE

HermitianEigen<double> lapacke_backend(Eigen::MatrixXd a, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  HermitianEigen<double> out;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n,
                                         a.data(), n, out.values.data());
  if (info != 0) throw std::runtime_error("dsyevd failed, info=" + std::to_string(info));
  if (want_vectors) out.vectors = std::move(a);
  return out;
}

HermitianEigen<cplx> lapacke_backend(Eigen::MatrixXcd a, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  HermitianEigen<cplx> out;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n,
                     reinterpret_cast<lapack_complex_double*>(a.data()), n, out.values.data());
  if (info != 0) throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
  if (want_vectors) out.vectors = std::move(a);
  return out;
}

// Some OpenBLAS builds pick CPU kernels that return wrong eigenvectors on
// certain hosts without reporting an error. One probe per scalar type decides
// whether LAPACKE is trusted for the rest of the process.
template <typename Scalar>
bool probe_lapacke() {
  const Eigen::Index n = 256;
  Matrix<Scalar> a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = std::sin(0.37 * double(i * n + j)) + (i == j ? 0.01 * double(i) : 0.0);
      if constexpr (std::is_same_v<Scalar, double>) a(i, j) = re;
      else a(i, j) = cplx(re, std::cos(0.11 * double(i + 3 * j)));
    }
  const Matrix<Scalar> h = (a + a.adjoint()) / 2.0;
  try {
    const auto e = lapacke_backend(h, true);
    const double residual = (h * e.vectors - e.vectors * e.values.asDiagonal()).norm();
    const double orth = (e.vectors.adjoint() * e.vectors - Matrix<Scalar>::Identity(n, n)).norm();
    return residual < 1e-9 * n && orth < 1e-9 * n;
  } catch (const std::exception&) {
    return false;
  }
}

template <typename Scalar>
bool lapacke_trusted() {
  static const bool ok = [] {
    const bool good = probe_lapacke<Scalar>();
    if (!good)
      std::cerr << "warning: LAPACKE " << (std::is_same_v<Scalar, double> ? "dsyevd" : "zheevd")
                << " failed its accuracy probe, using Eigen instead (with OpenBLAS, setting "
                   "OPENBLAS_CORETYPE, e.g. to Haswell, usually fixes this)\n";
    return good;
  }();
  return ok;
}

#endif

}  // namespace

HermitianEigen<double> hermitian_eigen(Eigen::MatrixXd a, bool want_vectors) {
  if (a.rows() != a.cols()) throw DimensionMismatch("eigensolver needs a square matrix");
#ifdef BCHARGE_HAVE_LAPACKE
  if (lapacke_trusted<double>()) return lapacke_backend(std::move(a), want_vectors);
#endif
  return eigen_backend<double>(a, want_vectors);
}

HermitianEigen<cplx> hermitian_eigen(Eigen::MatrixXcd a, bool want_vectors) {
  if (a.rows() != a.cols()) throw DimensionMismatch("eigensolver needs a square matrix");
#ifdef BCHARGE_HAVE_LAPACKE
  if (lapacke_trusted<cplx>()) return lapacke_backend(std::move(a), want_vectors);
#endif
  return eigen_backend<cplx>(a, want_vectors);
}

std::string eigensolver_backend() {
#ifdef BCHARGE_HAVE_LAPACKE
  const bool real_ok = lapacke_trusted<double>();
  const bool cplx_ok = lapacke_trusted<cplx>();
  if (real_ok && cplx_ok) return "lapacke";
  if (real_ok || cplx_ok) return real_ok ? "lapacke (real), eigen (complex)" : "eigen (real), lapacke (complex)";
#endif
  return "eigen";
}

Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& m, long long n) {
  if (m.rows() != m.cols()) throw DimensionMismatch("matrix_power needs a square matrix");
  if (n < 0) throw std::invalid_argument("negative matrix power");
  Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  Eigen::MatrixXcd base = m;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace bcharge
