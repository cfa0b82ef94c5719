#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <functional>

#include "bcharge/linalg.hpp"
#include "bcharge/models.hpp"
#include "bcharge/sector_basis.hpp"

namespace bcharge {

enum class Terms { Bulk, Boundary, Full };

/// Basis kind that carries a given model.
SiteKind site_kind(ModelVariant v);

/// Sector in which the Hamiltonian (with or without boundary term) acts,
/// starting from a basis string with `charge_bits` set bits:
/// fixed charge if the terms conserve it, else fixed fermion parity (pair
/// boundary) or no constraint (sigma^x boundary).
SectorConstraint natural_sector(const ModelSpec& spec, bool include_boundary, int charge_bits);

using ElementSink = std::function<void(std::size_t row, std::size_t col, double value)>;

/// Calls `sink` for every matrix element <row|T|col> of the selected terms,
/// with fermionic signs from the Jordan-Wigner string in mode order.
/// Elements of the same (row, col) may be emitted more than once and must be
/// summed. Throws SectorMismatch when the terms leave the sector.
void for_each_element(const ModelSpec& spec, const SectorBasis& basis, Terms terms,
                      const ElementSink& sink);

namespace detail {
// Same as for_each_element but without the L >= 4 check (tests use L = 2).
void for_each_element_unchecked(const ModelSpec& spec, const SectorBasis& basis, Terms terms,
                                const ElementSink& sink);
}  // namespace detail

template <typename Scalar = double>
Matrix<Scalar> build_terms(const ModelSpec& spec, const SectorBasis& basis, Terms terms,
                           std::size_t cap = kDefaultDimCap) {
  if (basis.dim() > cap)
    throw CapExceeded("sector dimension " + std::to_string(basis.dim()) + " exceeds cap " +
                      std::to_string(cap));
  const auto n = static_cast<Eigen::Index>(basis.dim());
  Matrix<Scalar> out = Matrix<Scalar>::Zero(n, n);
  for_each_element(spec, basis, terms, [&](std::size_t r, std::size_t c, double v) {
    out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) += v;
  });
  return out;
}

/// Dense many-body Hamiltonian H0 (+ boundary) on a sector.
template <typename Scalar = double>
Matrix<Scalar> build_many_body(const ModelSpec& spec, const SectorBasis& basis,
                               bool include_boundary, std::size_t cap = kDefaultDimCap) {
  return build_terms<Scalar>(
      spec, basis, include_boundary && spec.boundary_on ? Terms::Full : Terms::Bulk, cap);
}

/// Boundary term as a sparse matrix on a sector that it preserves.
Eigen::SparseMatrix<double> build_boundary_operator(const ModelSpec& spec,
                                                    const SectorBasis& basis);

}  // namespace bcharge
