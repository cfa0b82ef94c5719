#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bcharge/linalg.hpp"
#include "bcharge/models.hpp"
#include "bcharge/sector_basis.hpp"

namespace bcharge {

/// Complete spectrum of H0 in one charge sector.
struct SectorSpectrum {
  double charge = 0.0;  // N for fermions, Sz for spins
  std::shared_ptr<const SectorBasis> basis;
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXd vectors;   // orthonormal columns on `basis`
};

/// Every admissible charge of the model: N = 0..modes, or Sz = -L/2..L/2.
std::vector<double> all_charges(const ModelSpec& spec);

/// Spectra of the bulk Hamiltonian (boundary off) in each requested sector.
std::vector<SectorSpectrum> sector_spectra(const ModelSpec& spec, std::span<const double> charges,
                                           std::size_t cap = kDefaultDimCap);

struct PairMember {
  std::size_t sector = 0;
  Eigen::Index level = 0;
  double charge = 0.0;
  double energy = 0.0;
};

/// Eigenstates a, b of H0 from different sectors with |E_a - E_b| < energy_tol.
struct DegeneratePair {
  PairMember a;
  PairMember b;
  double gap = 0.0;
};

struct PairQuery {
  /// Accepted values of charge(b) - charge(a).
  std::vector<double> charge_steps{2.0};
  double energy_tol = 0.1;
  double charge_tol = 1e-5;
  /// Upper bound on returned pairs; 0 returns all of them.
  std::size_t max_pairs = 1000;
  std::uint64_t seed = 0;
};

/// All qualifying pairs in (sector a, sector b, level a, level b) order, or a
/// seeded uniform subset of max_pairs of them, kept in that order.
std::vector<DegeneratePair> find_pairs(std::span<const SectorSpectrum> spectra,
                                       const PairQuery& query);

/// Number of qualifying pairs (ignores max_pairs).
std::size_t count_pairs(std::span<const SectorSpectrum> spectra, const PairQuery& query);

struct MatrixElements {
  double mean = 0.0;
  std::vector<double> values;
};

/// |<b| H_B |a>| for each pair and their mean. `common` must contain every
/// sector basis and `h_boundary` acts on it.
MatrixElements boundary_matrix_element(std::span<const SectorSpectrum> spectra,
                                       std::span<const DegeneratePair> pairs,
                                       const SectorBasis& common,
                                       const Eigen::SparseMatrix<double>& h_boundary);

/// Convenience overload on the unconstrained basis of `spec`.
MatrixElements boundary_matrix_element(std::span<const SectorSpectrum> spectra,
                                       std::span<const DegeneratePair> pairs,
                                       const ModelSpec& spec);

/// H_eff(E) = PHP + PHQ (E - QHQ)^{-1} QHP expressed on the columns of P.
template <typename Scalar>
struct EffectiveHamiltonian {
  Matrix<Scalar> subspace;
  double energy = 0.0;
  Matrix<Scalar> first_order;  // P^+ H P
  Matrix<Scalar> matrix;       // H_eff(E)
};

/// `subspace` columns must be orthonormal. Throws SingularResolvent when E is
/// within `resolvent_guard` of an eigenvalue of QHQ restricted to range(Q).
template <typename Scalar>
EffectiveHamiltonian<Scalar> effective_hamiltonian(const Matrix<Scalar>& h,
                                                   const Matrix<Scalar>& subspace, double energy,
                                                   double resolvent_guard = 1e-8);

extern template EffectiveHamiltonian<double> effective_hamiltonian(const Matrix<double>&,
                                                                   const Matrix<double>&, double,
                                                                   double);
extern template EffectiveHamiltonian<cplx> effective_hamiltonian(const Matrix<cplx>&,
                                                                 const Matrix<cplx>&, double,
                                                                 double);

struct PhpScalingRow {
  int L = 0;
  double mean_offdiag = 0.0;
  double max_offdiag = 0.0;
  std::size_t n_elements = 0;
};

/// Cross-charge elements <M+2| PHP |M> of the periodic free chain, computed
/// in the plane-wave Slater-determinant eigenbasis of H0: for every many-body
/// eigenstate |M> and every |M+2> within `energy_tol` of it that H_B
/// connects, the element magnitude. Reports mean and max per size.
std::vector<PhpScalingRow> php_offdiag_scaling(const ModelSpec& spec, std::span<const int> sizes,
                                               double energy_tol);

}  // namespace bcharge
