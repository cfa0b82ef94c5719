#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

#include "bcharge/linalg.hpp"

namespace bcharge {

enum class ModelVariant { FreeFermion, InteractingFermion, XXZSpin, SpinfulFermion, Transport };

std::string_view to_string(ModelVariant v);
/// Accepts the enum names and the short CLI names (free, interacting, xxz, spinful, transport).
ModelVariant parse_variant(std::string_view name);

/// One of the five chain models plus its boundary term.
///
/// Sites are numbered 1..L in the physics notation and 0..L-1 in code. The
/// boundary term is the pair term Delta (c1+ c2+ + h.c.) for spinless fermions,
/// Delta (c1up+ c2dn+ + h.c.) for the spinful chain, Delta sigma^x_1 for the
/// spin chain, and the hopping Delta between sites L/2 and L/2+1 for the
/// transport chain. Transport chains are always open; the others honor
/// `periodic`.
struct ModelSpec {
  ModelVariant variant = ModelVariant::FreeFermion;
  int L = 8;
  double t0 = 1.0;
  double mu0 = 0.0;
  double Delta = 1.0;
  double U = 0.0;
  double Jperp = 1.0;
  double Jz = 1.0;
  double h = 0.0;
  double tl = 1.0;
  double tr = 1.0;
  double mul = 0.0;
  double mur = 0.0;
  bool boundary_on = true;
  bool periodic = true;

  /// Throws ConfigError on L < 4, odd L for Transport, or non-finite couplings.
  void validate() const;

  /// Single-particle mode count: L, or 2L for the spinful chain.
  int modes() const { return variant == ModelVariant::SpinfulFermion ? 2 * L : L; }

  bool is_spin() const { return variant == ModelVariant::XXZSpin; }
  /// True when the Hamiltonian is quadratic in fermion operators.
  bool is_quadratic() const;

  /// Numeric coupling by its config key (t0, mu0, Delta, U, Jperp, Jz, h, tl, tr, mul, mur, L).
  double get(std::string_view key) const;
  void set(std::string_view key, double value);
  static const std::vector<std::string>& keys();
};

/// Quadratic fermion Hamiltonian in the Nambu basis alpha = (c_1..c_M, c_1+..c_M+):
///
///   H = 1/2 alpha^+ h alpha + offset,   h = [[A, B], [-B*, -A*]],
///
/// with A Hermitian and B antisymmetric. The many-body operator is
/// sum_ij A_ij c_i+ c_j + 1/2 sum_ij (B_ij c_i+ c_j+ + h.c.), so offset = tr(A)/2.
struct NambuMatrix {
  Eigen::MatrixXcd h;
  double offset = 0.0;

  Eigen::Index modes() const { return h.rows() / 2; }
  auto normal_block() const { return h.topLeftCorner(modes(), modes()); }
  auto pairing_block() const { return h.topRightCorner(modes(), modes()); }
  bool conserves_number() const { return pairing_block().cwiseAbs().maxCoeff() == 0.0; }

  static NambuMatrix from_blocks(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
};

/// Swaps the particle and hole halves of a 2M-vector space.
Eigen::MatrixXd nambu_swap(Eigen::Index modes);

/// Largest entry of X h* X + h (zero for a valid Nambu matrix).
double particle_hole_defect(const Eigen::MatrixXcd& h);

/// Single-particle Hamiltonian of a quadratic model. The boundary term is
/// included when both `include_boundary` and `spec.boundary_on` are set.
/// Throws ConfigError for interacting specs.
NambuMatrix build_nambu(const ModelSpec& spec, bool include_boundary);

/// The boundary term alone, as a Nambu matrix (used for Floquet driving).
NambuMatrix build_boundary_nambu(const ModelSpec& spec);

/// Free-chain single-particle dispersion 2 t0 cos k - mu0.
double dispersion(double k, double t0, double mu0);

/// Quasiparticle gap min_k |2 t0 cos k - mu0| of the infinite chain.
double quasiparticle_gap(double t0, double mu0);

}  // namespace bcharge
