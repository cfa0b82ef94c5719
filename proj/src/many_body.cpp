#include "bcharge/many_body.hpp"

#include <string>
#include <vector>

namespace bcharge {

SiteKind site_kind(ModelVariant v) {
  switch (v) {
    case ModelVariant::XXZSpin: return SiteKind::Spin;
    case ModelVariant::SpinfulFermion: return SiteKind::SpinfulFermion;
    default: return SiteKind::Fermion;
  }
}

namespace {

// Parity of the occupied modes strictly below `mode`.
inline bool string_odd(std::uint64_t s, int mode) {
  return popcount(s & ((std::uint64_t{1} << mode) - 1)) & 1;
}

inline bool annihilate(std::uint64_t& s, int mode, int& sign) {
  if (!((s >> mode) & 1)) return false;
  if (string_odd(s, mode)) sign = -sign;
  s ^= std::uint64_t{1} << mode;
  return true;
}

inline bool create(std::uint64_t& s, int mode, int& sign) {
  if ((s >> mode) & 1) return false;
  if (string_odd(s, mode)) sign = -sign;
  s |= std::uint64_t{1} << mode;
  return true;
}

struct Bond {
  int i;
  int j;
  double t;
};

bool pair_boundary(ModelVariant v) {
  return v == ModelVariant::FreeFermion || v == ModelVariant::InteractingFermion ||
         v == ModelVariant::SpinfulFermion;
}

// Nearest-neighbour site bonds; a periodic chain of two sites gets the bond twice.
std::vector<Bond> chain_bonds(int sites, bool periodic, double t) {
  std::vector<Bond> out;
  for (int j = 0; j + 1 < sites; ++j) out.push_back({j, j + 1, t});
  if (periodic && sites >= 2) out.push_back({sites - 1, 0, t});
  return out;
}

class ElementEmitter {
 public:
  ElementEmitter(const SectorBasis& basis, const ElementSink& sink) : basis_(basis), sink_(sink) {}

  void emit(std::uint64_t target, std::size_t col, double value) const {
    const auto row = basis_.index(target);
    if (!row)
      throw SectorMismatch("operator leaves sector (" + basis_.constraint().describe() + ")");
    sink_(*row, col, value);
  }

  // t (c_i^+ c_j + c_j^+ c_i)
  void hopping(std::uint64_t s, std::size_t col, int i, int j, double t) const {
    for (auto [to, from] : {std::pair{i, j}, std::pair{j, i}}) {
      std::uint64_t x = s;
      int sign = 1;
      if (annihilate(x, from, sign) && create(x, to, sign)) emit(x, col, sign * t);
    }
  }

  // d (c_a^+ c_b^+ + c_b c_a)
  void pairing(std::uint64_t s, std::size_t col, int a, int b, double d) const {
    {
      std::uint64_t x = s;
      int sign = 1;
      if (create(x, b, sign) && create(x, a, sign)) emit(x, col, sign * d);
    }
    {
      std::uint64_t x = s;
      int sign = 1;
      if (annihilate(x, a, sign) && annihilate(x, b, sign)) emit(x, col, sign * d);
    }
  }

 private:
  const SectorBasis& basis_;
  const ElementSink& sink_;
};

void check_compatible(const ModelSpec& spec, const SectorBasis& basis, Terms terms) {
  if (basis.kind() != site_kind(spec.variant))
    throw SectorMismatch("basis kind does not match model '" +
                         std::string(to_string(spec.variant)) + "'");
  if (basis.sites() != spec.L) throw SectorMismatch("basis has a different number of sites");
  const bool boundary = terms != Terms::Bulk && spec.boundary_on;
  if (!boundary) return;
  const auto type = basis.constraint().type;
  if (pair_boundary(spec.variant) && type == SectorConstraint::Type::FixedCharge)
    throw SectorMismatch("pair boundary term does not conserve particle number; use a parity sector");
  if (spec.variant == ModelVariant::XXZSpin && type != SectorConstraint::Type::None)
    throw SectorMismatch("sigma^x boundary term needs the unconstrained spin basis");
}

}  // namespace

SectorConstraint natural_sector(const ModelSpec& spec, bool include_boundary, int charge_bits) {
  const bool boundary = include_boundary && spec.boundary_on;
  if (!boundary || spec.variant == ModelVariant::Transport)
    return SectorConstraint::fixed_count(charge_bits);
  if (spec.variant == ModelVariant::XXZSpin) return SectorConstraint::none();
  return SectorConstraint::fixed_parity(charge_bits % 2 == 0 ? Parity::Even : Parity::Odd);
}

namespace detail {

void for_each_element_unchecked(const ModelSpec& spec, const SectorBasis& basis, Terms terms,
                                const ElementSink& sink) {
  check_compatible(spec, basis, terms);
  const bool bulk = terms != Terms::Boundary;
  const bool boundary = terms != Terms::Bulk && spec.boundary_on;
  const ElementEmitter em(basis, sink);
  const int L = spec.L;

  std::vector<Bond> hops;
  double mu = 0.0;
  double nn = 0.0;
  switch (spec.variant) {
    case ModelVariant::FreeFermion:
    case ModelVariant::InteractingFermion:
    case ModelVariant::XXZSpin:
      hops = chain_bonds(L, spec.periodic, spec.t0);
      mu = spec.mu0;
      nn = spec.variant == ModelVariant::InteractingFermion ? spec.U : 0.0;
      break;
    case ModelVariant::SpinfulFermion:
      for (const Bond& b : chain_bonds(L, spec.periodic, spec.t0))
        for (int s = 0; s < 2; ++s) hops.push_back({2 * b.i + s, 2 * b.j + s, b.t});
      mu = spec.mu0;
      break;
    case ModelVariant::Transport: {
      const int half = L / 2;
      for (int j = 0; j + 1 < half; ++j) hops.push_back({j, j + 1, spec.tl});
      for (int j = half; j + 1 < L; ++j) hops.push_back({j, j + 1, spec.tr});
      break;
    }
  }

  for (std::size_t col = 0; col < basis.dim(); ++col) {
    const std::uint64_t s = basis.state(col);
    if (spec.variant == ModelVariant::XXZSpin) {
      if (bulk) {
        double diag = 0.0;
        for (const Bond& b : hops) {
          const bool ui = (s >> b.i) & 1;
          const bool uj = (s >> b.j) & 1;
          diag += spec.Jz * (ui == uj ? 1.0 : -1.0);
          // J (sx sx + sy sy) = 2 J (s+ s- + s- s+)
          if (ui != uj)
            em.emit(s ^ (std::uint64_t{1} << b.i) ^ (std::uint64_t{1} << b.j), col, 2.0 * spec.Jperp);
        }
        diag += spec.h * (2.0 * popcount(s) - L);
        if (diag != 0.0) sink(col, col, diag);
      }
      if (boundary) em.emit(s ^ std::uint64_t{1}, col, spec.Delta);
      continue;
    }

    if (bulk) {
      double diag = 0.0;
      if (spec.variant == ModelVariant::Transport) {
        const int half = L / 2;
        for (int j = 0; j < L; ++j)
          if ((s >> j) & 1) diag -= j < half ? spec.mul : spec.mur;
      } else {
        diag -= mu * popcount(s);
      }
      if (nn != 0.0)
        for (const Bond& b : chain_bonds(L, spec.periodic, 1.0))
          if (((s >> b.i) & 1) && ((s >> b.j) & 1)) diag += nn;
      if (diag != 0.0) sink(col, col, diag);
      for (const Bond& b : hops) em.hopping(s, col, b.i, b.j, b.t);
    }
    if (boundary) {
      switch (spec.variant) {
        case ModelVariant::FreeFermion:
        case ModelVariant::InteractingFermion: em.pairing(s, col, 0, 1, spec.Delta); break;
        case ModelVariant::SpinfulFermion: em.pairing(s, col, 0, 3, spec.Delta); break;
        case ModelVariant::Transport: em.hopping(s, col, L / 2 - 1, L / 2, spec.Delta); break;
        case ModelVariant::XXZSpin: break;
      }
    }
  }
}

}  // namespace detail

void for_each_element(const ModelSpec& spec, const SectorBasis& basis, Terms terms,
                      const ElementSink& sink) {
  spec.validate();
  detail::for_each_element_unchecked(spec, basis, terms, sink);
}

Eigen::SparseMatrix<double> build_boundary_operator(const ModelSpec& spec,
                                                    const SectorBasis& basis) {
  std::vector<Eigen::Triplet<double>> triplets;
  for_each_element(spec, basis, Terms::Boundary, [&](std::size_t r, std::size_t c, double v) {
    triplets.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
  });
  const auto n = static_cast<Eigen::Index>(basis.dim());
  Eigen::SparseMatrix<double> out(n, n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace bcharge
