#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bcharge {

inline constexpr std::size_t kDefaultDimCap = std::size_t{1} << 20;

enum class SiteKind { Fermion, Spin, SpinfulFermion };
enum class Parity { Even, Odd };

/// Which occupation bit strings belong to a sector. For spins a set bit is
/// an up spin; `count` is then the number of up spins (Sz = count - L/2).
struct SectorConstraint {
  enum class Type { None, FixedCharge, FixedParity };
  Type type = Type::None;
  int count = 0;
  Parity parity = Parity::Even;

  static SectorConstraint none() { return {}; }
  static SectorConstraint fixed_count(int n) { return {Type::FixedCharge, n, Parity::Even}; }
  static SectorConstraint fixed_parity(Parity p) { return {Type::FixedParity, 0, p}; }

  bool admits(std::uint64_t bits) const;
  std::string describe() const;
};

/// Occupation basis of one symmetry sector, sorted ascending as integers.
/// Bit j is the occupation of mode j (site j, or site j/2 with spin j%2 for
/// the spinful chain).
class SectorBasis {
 public:
  SectorBasis(SiteKind kind, int sites, SectorConstraint constraint,
              std::size_t cap = kDefaultDimCap);

  SiteKind kind() const { return kind_; }
  int sites() const { return sites_; }
  /// Number of occupation bits: L, or 2L for spinful fermions.
  int modes() const { return modes_; }
  const SectorConstraint& constraint() const { return constraint_; }
  std::size_t dim() const { return states_.size(); }
  std::uint64_t state(std::size_t i) const { return states_[i]; }
  std::span<const std::uint64_t> states() const { return states_; }
  std::optional<std::size_t> index(std::uint64_t bits) const;

  /// Conserved charge of a basis string: N for fermions, Sz for spins.
  double charge(std::uint64_t bits) const;

  /// Dimension a sector would have, without enumerating it.
  static std::size_t predicted_dim(SiteKind kind, int sites, const SectorConstraint& c);

 private:
  SiteKind kind_;
  int sites_;
  int modes_;
  SectorConstraint constraint_;
  std::vector<std::uint64_t> states_;
};

SectorBasis enumerate_sector(SiteKind kind, int sites, SectorConstraint constraint,
                             std::size_t cap = kDefaultDimCap);

inline int popcount(std::uint64_t x) { return __builtin_popcountll(x); }

}  // namespace bcharge
