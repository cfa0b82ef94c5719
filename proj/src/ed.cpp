#include "bcharge/ed.hpp"

#include <cmath>
#include <string>

#include "bcharge/random.hpp"

namespace bcharge {

DenseState basis_state(std::shared_ptr<const SectorBasis> basis, std::uint64_t bits) {
  const auto idx = basis->index(bits);
  if (!idx) throw SectorMismatch("bit string is not in the basis");
  DenseState out{std::move(basis), {}};
  out.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(out.basis->dim()));
  out.amplitudes(static_cast<Eigen::Index>(*idx)) = 1.0;
  return out;
}

DenseState embed(const DenseState& state, std::shared_ptr<const SectorBasis> target) {
  if (target->kind() != state.basis->kind() || target->sites() != state.basis->sites())
    throw SectorMismatch("bases describe different systems");
  DenseState out{std::move(target), {}};
  out.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(out.basis->dim()));
  for (std::size_t i = 0; i < state.basis->dim(); ++i) {
    const cplx a = state.amplitudes(static_cast<Eigen::Index>(i));
    const auto j = out.basis->index(state.basis->state(i));
    if (!j) {
      if (a != cplx(0.0)) throw SectorMismatch("state has weight outside the target basis");
      continue;
    }
    out.amplitudes(static_cast<Eigen::Index>(*j)) = a;
  }
  return out;
}

std::uint64_t to_bits(std::span<const std::uint8_t> occupations) {
  if (occupations.size() > 62) throw CapExceeded("more than 62 modes");
  std::uint64_t bits = 0;
  for (std::size_t j = 0; j < occupations.size(); ++j)
    if (occupations[j]) bits |= std::uint64_t{1} << j;
  return bits;
}

DenseState random_sector_product_state(SiteKind kind, int sites, double charge,
                                       std::uint64_t seed, std::size_t cap) {
  const int modes = kind == SiteKind::SpinfulFermion ? 2 * sites : sites;
  const double count = kind == SiteKind::Spin ? charge + 0.5 * sites : charge;
  if (count != std::round(count) || count < 0 || count > modes)
    throw ConfigError("charge " + std::to_string(charge) + " is not realizable on " +
                      std::to_string(sites) + " sites");
  const int k = static_cast<int>(count);
  auto basis = std::make_shared<const SectorBasis>(kind, sites, SectorConstraint::fixed_count(k), cap);
  const auto occ = random_occupation(modes, k, seed);
  return basis_state(std::move(basis), to_bits(occ));
}

namespace {

template <typename ChargeOf>
double mean_charge(const DenseState& psi, ChargeOf&& charge_of) {
  double m1 = 0.0;
  for (std::size_t i = 0; i < psi.basis->dim(); ++i)
    m1 += std::norm(psi.amplitudes(static_cast<Eigen::Index>(i))) * charge_of(psi.basis->state(i));
  return m1;
}

// two-pass so that charge eigenstates give exactly zero up to rounding of the mean
template <typename ChargeOf>
double charge_spread(const DenseState& psi, ChargeOf&& charge_of) {
  const double m1 = mean_charge(psi, charge_of);
  double var = 0.0;
  for (std::size_t i = 0; i < psi.basis->dim(); ++i) {
    const double d = charge_of(psi.basis->state(i)) - m1;
    var += std::norm(psi.amplitudes(static_cast<Eigen::Index>(i))) * d * d;
  }
  return var;
}

std::uint64_t mode_mask(const DenseState& psi, std::span<const int> modes) {
  std::uint64_t mask = 0;
  for (int j : modes) {
    if (j < 0 || j >= psi.basis->modes())
      throw std::out_of_range("mode index " + std::to_string(j) + " out of range");
    mask |= std::uint64_t{1} << j;
  }
  return mask;
}

}  // namespace

double charge_mean_mb(const DenseState& psi) {
  return mean_charge(psi, [&](std::uint64_t s) { return psi.basis->charge(s); });
}

double charge_variance_mb(const DenseState& psi) {
  return charge_spread(psi, [&](std::uint64_t s) { return psi.basis->charge(s); });
}

double subsystem_charge_mean_mb(const DenseState& psi, std::span<const int> modes) {
  const std::uint64_t mask = mode_mask(psi, modes);
  return mean_charge(psi, [&](std::uint64_t s) { return double(popcount(s & mask)); });
}

double subsystem_charge_variance_mb(const DenseState& psi, std::span<const int> modes) {
  const std::uint64_t mask = mode_mask(psi, modes);
  return charge_spread(psi, [&](std::uint64_t s) { return double(popcount(s & mask)); });
}

double fermion_parity_mb(const DenseState& psi) {
  return mean_charge(psi, [](std::uint64_t s) { return popcount(s) % 2 == 0 ? 1.0 : -1.0; });
}

}  // namespace bcharge
