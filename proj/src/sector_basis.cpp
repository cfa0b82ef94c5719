#include "bcharge/sector_basis.hpp"

#include <algorithm>
#include <cmath>

#include "bcharge/errors.hpp"

namespace bcharge {

bool SectorConstraint::admits(std::uint64_t bits) const {
  switch (type) {
    case Type::None: return true;
    case Type::FixedCharge: return popcount(bits) == count;
    case Type::FixedParity: return (popcount(bits) % 2 == 0) == (parity == Parity::Even);
  }
  return false;
}

std::string SectorConstraint::describe() const {
  switch (type) {
    case Type::None: return "none";
    case Type::FixedCharge: return "count=" + std::to_string(count);
    case Type::FixedParity: return parity == Parity::Even ? "even" : "odd";
  }
  return "?";
}

namespace {

int modes_for(SiteKind kind, int sites) {
  return kind == SiteKind::SpinfulFermion ? 2 * sites : sites;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

}  // namespace

std::size_t SectorBasis::predicted_dim(SiteKind kind, int sites, const SectorConstraint& c) {
  const int m = modes_for(kind, sites);
  double d = 0.0;
  switch (c.type) {
    case SectorConstraint::Type::None: d = std::ldexp(1.0, m); break;
    case SectorConstraint::Type::FixedCharge: d = binomial(m, c.count); break;
    case SectorConstraint::Type::FixedParity: d = m == 0 ? 1.0 : std::ldexp(1.0, m - 1); break;
  }
  return d > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(d);
}

SectorBasis::SectorBasis(SiteKind kind, int sites, SectorConstraint constraint, std::size_t cap)
    : kind_(kind), sites_(sites), modes_(modes_for(kind, sites)), constraint_(constraint) {
  if (sites < 1) throw ConfigError("sector needs at least one site");
  const std::size_t dim = predicted_dim(kind, sites, constraint);
  if (dim > cap)
    throw CapExceeded("sector dimension " + std::to_string(dim) + " exceeds cap " +
                      std::to_string(cap));
  if (modes_ > 62) throw CapExceeded("more than 62 modes cannot be enumerated");
  states_.reserve(dim);
  if (constraint.type == SectorConstraint::Type::FixedCharge) {
    const int k = constraint.count;
    if (k == 0) {
      states_.push_back(0);
    } else if (k > 0 && k <= modes_) {
      // Gosper's hack walks k-subsets in increasing integer order
      std::uint64_t v = (std::uint64_t{1} << k) - 1;
      const std::uint64_t end = std::uint64_t{1} << modes_;
      while (v < end) {
        states_.push_back(v);
        const std::uint64_t t = v | (v - 1);
        v = (t + 1) | (((~t & -~t) - 1) >> (__builtin_ctzll(v) + 1));
      }
    }
  } else {
    const std::uint64_t end = std::uint64_t{1} << modes_;
    for (std::uint64_t v = 0; v < end; ++v)
      if (constraint.admits(v)) states_.push_back(v);
  }
}

std::optional<std::size_t> SectorBasis::index(std::uint64_t bits) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), bits);
  if (it == states_.end() || *it != bits) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

double SectorBasis::charge(std::uint64_t bits) const {
  if (kind_ == SiteKind::Spin) return popcount(bits) - 0.5 * sites_;
  return popcount(bits);
}

SectorBasis enumerate_sector(SiteKind kind, int sites, SectorConstraint constraint,
                             std::size_t cap) {
  return SectorBasis(kind, sites, constraint, cap);
}

}  // namespace bcharge
