#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace bcharge {

/// One family of oracle comparisons: the worst deviation seen over all cases.
struct SelftestCheck {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  int cases = 0;
  bool pass = false;
};

/// Cross-checks between independent code paths on small systems:
///   gaussian_vs_ed      Nambu evolution against many-body evolution
///   wick_vs_fock        Wick variance against <N^2> - <N>^2 on the Fock space
///   heff_residual       H_eff(E) P psi = E P psi for exact eigenpairs
///   energy_conservation drift of <H> along Gaussian and many-body trajectories
///   zero_boundary       Delta = 0 keeps product states at zero variance
std::vector<SelftestCheck> run_selftest(std::uint64_t seed = 20240611, int cases = 20);

/// Prints one line per check; returns true iff all passed.
bool report_selftest(const std::vector<SelftestCheck>& checks, std::ostream& os);

}  // namespace bcharge
