#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <random>
#include <vector>

#include "bcharge/models.hpp"
#include "bcharge/sector_basis.hpp"
#include "oracle.hpp"

namespace testing {

inline oracle::Chain chain_of(const bcharge::ModelSpec& s) {
  oracle::Chain c;
  c.L = s.L;
  c.t0 = s.t0;
  c.mu0 = s.mu0;
  c.Delta = s.Delta;
  c.U = s.variant == bcharge::ModelVariant::InteractingFermion ? s.U : 0.0;
  c.Jperp = s.Jperp;
  c.Jz = s.Jz;
  c.h = s.h;
  c.tl = s.tl;
  c.tr = s.tr;
  c.mul = s.mul;
  c.mur = s.mur;
  c.periodic = s.periodic;
  return c;
}

/// Reference Hamiltonian of a spec on the full Fock / spin space.
inline Eigen::MatrixXd reference_hamiltonian(const bcharge::ModelSpec& s, bool boundary) {
  const auto c = chain_of(s);
  const bool b = boundary && s.boundary_on;
  switch (s.variant) {
    case bcharge::ModelVariant::FreeFermion:
    case bcharge::ModelVariant::InteractingFermion: return oracle::fermion_chain(c, b);
    case bcharge::ModelVariant::SpinfulFermion: return oracle::spinful_chain(c, b);
    case bcharge::ModelVariant::Transport: return oracle::transport_chain(c, b);
    case bcharge::ModelVariant::XXZSpin: return oracle::xxz_chain(c, b);
  }
  return {};
}

/// Rows/columns of a full-space matrix restricted to the strings of a sector.
inline Eigen::MatrixXd restrict_to(const Eigen::MatrixXd& full, const bcharge::SectorBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = full(static_cast<Eigen::Index>(basis.state(i)), static_cast<Eigen::Index>(basis.state(j)));
  return out;
}

inline Eigen::VectorXd sorted(Eigen::VectorXd v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

inline bcharge::ModelSpec random_spec(bcharge::ModelVariant v, int L, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  bcharge::ModelSpec s;
  s.variant = v;
  s.L = L;
  s.t0 = u(rng);
  s.mu0 = u(rng);
  s.Delta = u(rng);
  s.U = u(rng);
  s.Jperp = u(rng);
  s.Jz = u(rng);
  s.h = u(rng);
  s.tl = u(rng);
  s.tr = u(rng);
  s.mul = u(rng);
  s.mur = u(rng);
  s.periodic = v != bcharge::ModelVariant::Transport && (rng() & 1U);
  return s;
}

}  // namespace testing
