#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bcharge/linalg.hpp"
#include "bcharge/sector_basis.hpp"

namespace bcharge {

/// Amplitude vector on a sector basis.
struct DenseState {
  std::shared_ptr<const SectorBasis> basis;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
};

/// Computational basis vector |bits>.
DenseState basis_state(std::shared_ptr<const SectorBasis> basis, std::uint64_t bits);

/// Re-expresses a state in a larger basis that contains all of its strings.
DenseState embed(const DenseState& state, std::shared_ptr<const SectorBasis> target);

/// Random product state with a fixed charge (N for fermions, Sz for spins),
/// drawn uniformly over the sector's bit strings; reproducible per seed and
/// identical to random_occupation(modes, count, seed).
DenseState random_sector_product_state(SiteKind kind, int sites, double charge,
                                       std::uint64_t seed, std::size_t cap = kDefaultDimCap);

/// Occupation vector -> bit string (bit j = occupations[j]).
std::uint64_t to_bits(std::span<const std::uint8_t> occupations);

/// Exact propagator from one dense diagonalization of a Hermitian matrix.
template <typename Scalar>
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const Matrix<Scalar>& h) {
    require_hermitian(h);
    spectrum_ = hermitian_eigen(h);
  }

  const HermitianEigen<Scalar>& spectrum() const { return spectrum_; }
  Eigen::Index dim() const { return spectrum_.values.size(); }

  /// V^+ psi
  Eigen::VectorXcd to_eigenbasis(const Eigen::VectorXcd& psi) const {
    if (psi.size() != dim()) throw DimensionMismatch("state does not match Hamiltonian");
    if constexpr (std::is_same_v<Scalar, double>) {
      const Eigen::VectorXd re = spectrum_.vectors.transpose() * psi.real();
      const Eigen::VectorXd im = spectrum_.vectors.transpose() * psi.imag();
      return re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
    } else {
      return spectrum_.vectors.adjoint() * psi;
    }
  }

  /// V (exp(-i E t) * coeffs)
  Eigen::VectorXcd from_eigenbasis(const Eigen::VectorXcd& coeffs, double t) const {
    const Eigen::VectorXcd phased =
        coeffs.cwiseProduct((spectrum_.values.template cast<cplx>() * cplx(0.0, -t)).array().exp().matrix());
    if constexpr (std::is_same_v<Scalar, double>) {
      const Eigen::VectorXd re = spectrum_.vectors * phased.real();
      const Eigen::VectorXd im = spectrum_.vectors * phased.imag();
      return re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
    } else {
      return spectrum_.vectors * phased;
    }
  }

  Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi, double t) const {
    return from_eigenbasis(to_eigenbasis(psi), t);
  }

  Eigen::MatrixXcd unitary(double t) const { return unitary_from_spectrum(spectrum_, t); }

 private:
  HermitianEigen<Scalar> spectrum_;
};

/// |psi(t)> = V exp(-i E t) V^+ |psi0> for each requested time.
template <typename Scalar>
std::vector<DenseState> evolve_exact(const Matrix<Scalar>& h, const DenseState& psi0,
                                     std::span<const double> times) {
  const SpectralPropagator<Scalar> prop(h);
  const Eigen::VectorXcd coeffs = prop.to_eigenbasis(psi0.amplitudes);
  std::vector<DenseState> out;
  out.reserve(times.size());
  for (double t : times) out.push_back({psi0.basis, prop.from_eigenbasis(coeffs, t)});
  return out;
}

/// Conserved charge moments: N for fermions, Sz for spins.
double charge_mean_mb(const DenseState& psi);
double charge_variance_mb(const DenseState& psi);

/// Particle number restricted to a set of (0-based) modes.
double subsystem_charge_mean_mb(const DenseState& psi, std::span<const int> modes);
double subsystem_charge_variance_mb(const DenseState& psi, std::span<const int> modes);

/// <(-1)^N>
double fermion_parity_mb(const DenseState& psi);

/// <psi| H |psi>
template <typename Scalar>
double expectation(const Matrix<Scalar>& h, const DenseState& psi) {
  return psi.amplitudes.dot(h.template cast<cplx>() * psi.amplitudes).real();
}

/// One Floquet period exp(-i H_B) exp(-i H_0), each factor from its own
/// eigendecomposition.
template <typename Scalar>
Eigen::MatrixXcd floquet_unitary_mb(const Matrix<Scalar>& h_boundary, const Matrix<Scalar>& h_bulk) {
  return expm_hermitian(h_boundary, 1.0) * expm_hermitian(h_bulk, 1.0);
}

}  // namespace bcharge
