#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>

#include "bcharge/linalg.hpp"
#include "bcharge/models.hpp"

namespace bcharge {

/// Spinful modes are interleaved (1up, 1dn, 2up, ...).
enum class ModeLayout { Spinless, Spinful };

/// Fermionic Gaussian state stored as its Nambu correlation matrix
/// Gamma_ab = <alpha_a alpha_b^+>, alpha = (c_1..c_M, c_1^+..c_M^+).
///
/// Block form: Gamma = [[1 - G^T, F], [F^+, G]] with G_ij = <c_i^+ c_j> and
/// F_ij = <c_i c_j>.
class GaussianState {
 public:
  GaussianState() = default;
  explicit GaussianState(Eigen::MatrixXcd correlation, ModeLayout layout = ModeLayout::Spinless);

  Eigen::Index modes() const { return gamma_.rows() / 2; }
  ModeLayout layout() const { return layout_; }
  const Eigen::MatrixXcd& correlation() const { return gamma_; }

  /// G_ij = <c_i^+ c_j>
  Eigen::MatrixXcd normal() const { return gamma_.bottomRightCorner(modes(), modes()); }
  /// F_ij = <c_i c_j>
  Eigen::MatrixXcd anomalous() const { return gamma_.topRightCorner(modes(), modes()); }

  /// Gamma is diagonal (a Fock product state).
  bool is_diagonal() const;

 private:
  Eigen::MatrixXcd gamma_;
  ModeLayout layout_ = ModeLayout::Spinless;
};

/// Deviations of a correlation matrix from the Gaussian-state invariants.
struct StateDefects {
  double hermiticity = 0.0;     // max |Gamma - Gamma^+|
  double particle_hole = 0.0;   // max |Gamma + X Gamma^T X - 1|
  double purity = 0.0;          // max |Gamma^2 - Gamma|
  double antisymmetry = 0.0;    // max |F + F^T|
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};
StateDefects check_state(const GaussianState& state);

/// Fock product state: G = diag(occupations), F = 0.
GaussianState product_state(std::span<const std::uint8_t> occupations,
                            ModeLayout layout = ModeLayout::Spinless);

/// exp(-i h t) on the Nambu space, from one diagonalization of h. When h
/// conserves particle number only the M x M normal block is diagonalized and
/// the propagator is exactly block diagonal.
class NambuPropagator {
 public:
  explicit NambuPropagator(const NambuMatrix& h);

  Eigen::Index modes() const { return modes_; }
  Eigen::MatrixXcd unitary(double t) const;

 private:
  Eigen::Index modes_ = 0;
  bool number_conserving_ = false;
  HermitianEigen<cplx> spectrum_;
};

/// Gamma -> U Gamma U^+.
GaussianState apply_unitary(const GaussianState& state, const Eigen::MatrixXcd& u);

/// Evolution by exp(-i H t). Throws NotHermitian / DimensionMismatch.
GaussianState evolve(const GaussianState& state, const NambuMatrix& h, double t);

/// One drive period: Gamma -> (uB u0) Gamma (uB u0)^+.
GaussianState floquet_step(const GaussianState& state, const Eigen::MatrixXcd& u_boundary,
                           const Eigen::MatrixXcd& u_bulk);

double particle_number(const GaussianState& state);
/// Sz = sum_j (n_j,up - n_j,dn) / 2; requires the spinful layout.
double spin_z(const GaussianState& state);

/// Variance of N by Wick's theorem:
///   Var N = sum_ij [ G_ij (delta_ij - G_ji) + |F_ij|^2 ],
/// clamped at zero.
double charge_variance(const GaussianState& state);

/// Same contraction restricted to a set of (0-based) mode indices.
double subsystem_charge_variance(const GaussianState& state, std::span<const int> modes);
double subsystem_particle_number(const GaussianState& state, std::span<const int> modes);

/// <H> = -tr(h Gamma)/2 + offset.
double energy(const GaussianState& state, const NambuMatrix& h);

}  // namespace bcharge
