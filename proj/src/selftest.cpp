#include "bcharge/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>

#include "bcharge/ed.hpp"
#include "bcharge/errors.hpp"
#include "bcharge/gaussian.hpp"
#include "bcharge/many_body.hpp"
#include "bcharge/perturbation.hpp"
#include "bcharge/random.hpp"

namespace bcharge {

namespace {

struct Tracker {
  SelftestCheck check;
  void see(double deviation) {
    check.worst = std::max(check.worst, std::isfinite(deviation) ? deviation : INFINITY);
  }
  SelftestCheck done() {
    check.pass = check.worst < check.tolerance;
    return check;
  }
};

// A random quadratic model small enough for the full parity sector.
ModelSpec random_quadratic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> pick(0, 2);
  ModelSpec s;
  switch (pick(rng)) {
    case 0:
      s.variant = ModelVariant::FreeFermion;
      s.L = std::uniform_int_distribution<int>(4, 8)(rng);
      break;
    case 1:
      s.variant = ModelVariant::SpinfulFermion;
      s.L = 4;
      break;
    default:
      s.variant = ModelVariant::Transport;
      s.L = 8;
      s.tl = u(rng);
      s.tr = u(rng);
      s.mul = u(rng);
      s.mur = u(rng);
      break;
  }
  s.t0 = 1.0 + 0.3 * u(rng) / 3.0;
  s.mu0 = u(rng);
  s.Delta = 0.5 + std::abs(u(rng)) / 3.0;
  s.periodic = s.variant != ModelVariant::Transport && (rng() & 1U);
  return s;
}

ModeLayout layout_of(const ModelSpec& s) {
  return s.variant == ModelVariant::SpinfulFermion ? ModeLayout::Spinful : ModeLayout::Spinless;
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed, int cases) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> time(0.0, 10.0);

  Tracker versus{{"gaussian_vs_ed", 0.0, 1e-8, 0, false}};
  Tracker wick{{"wick_vs_fock", 0.0, 1e-8, 0, false}};
  Tracker heff{{"heff_residual", 0.0, 1e-8, 0, false}};
  Tracker drift{{"energy_conservation", 0.0, 1e-8, 0, false}};
  Tracker zero{{"zero_boundary", 0.0, 1e-12, 0, false}};

  // Gaussian against many-body evolution, with Wick against the full Fock space.
  for (int c = 0; c < cases; ++c) {
    const ModelSpec spec = random_quadratic(rng);
    const int modes = spec.modes();
    const int count = std::uniform_int_distribution<int>(0, modes)(rng);
    const auto occ = random_occupation(modes, count, rng());
    const double t = time(rng);

    const NambuMatrix h = build_nambu(spec, true);
    const GaussianState g0 = product_state(occ, layout_of(spec));
    const GaussianState g = evolve(g0, h, t);

    const SiteKind kind = site_kind(spec.variant);
    auto fock = std::make_shared<const SectorBasis>(kind, spec.L, SectorConstraint::none());
    const Eigen::MatrixXd hm = build_many_body<double>(spec, *fock, true);
    const DenseState psi0 = basis_state(fock, to_bits(occ));
    const SpectralPropagator<double> prop(hm);
    const DenseState psi{fock, prop.evolve(psi0.amplitudes, t)};

    std::vector<int> left;
    for (int m = 0; m < modes / 2; ++m) left.push_back(m);
    versus.see(std::abs(particle_number(g) - charge_mean_mb(psi)));
    versus.see(std::abs(charge_variance(g) - charge_variance_mb(psi)));
    versus.see(std::abs(energy(g, h) - expectation(hm, psi)));
    versus.see(std::abs(subsystem_charge_variance(g, left) - subsystem_charge_variance_mb(psi, left)));
    ++versus.check.cases;

    // Raw moments on the Fock space, no two-pass centering.
    double n1 = 0.0;
    double n2 = 0.0;
    for (std::size_t i = 0; i < fock->dim(); ++i) {
      const double p = std::norm(psi.amplitudes[static_cast<Eigen::Index>(i)]);
      const double n = popcount(fock->state(i));
      n1 += p * n;
      n2 += p * n * n;
    }
    wick.see(std::abs(charge_variance(g) - (n2 - n1 * n1)));
    ++wick.check.cases;

    drift.see(std::abs(energy(g, h) - energy(g0, h)));
    drift.see(std::abs(expectation(hm, psi) - expectation(hm, psi0)));
    ++drift.check.cases;

    ModelSpec off = spec;
    off.Delta = 0.0;
    const GaussianState gz = evolve(g0, build_nambu(off, true), t);
    zero.see(charge_variance(gz));
    ++zero.check.cases;
  }

  // Interacting models with Delta = 0: exact sector evolution stays at zero variance.
  for (ModelVariant v : {ModelVariant::InteractingFermion, ModelVariant::XXZSpin}) {
    ModelSpec spec;
    spec.variant = v;
    spec.L = 8;
    spec.U = 2.0;
    spec.mu0 = 1.0;
    spec.h = 0.5;
    spec.Delta = 0.0;
    auto full = std::make_shared<const SectorBasis>(site_kind(v), spec.L, SectorConstraint::none());
    const SpectralPropagator<double> prop(build_many_body<double>(spec, *full, true));
    for (int c = 0; c < 4; ++c) {
      const DenseState psi0 = basis_state(full, to_bits(random_occupation(8, 4, rng())));
      const DenseState psi{full, prop.evolve(psi0.amplitudes, time(rng))};
      zero.see(charge_variance_mb(psi));
      ++zero.check.cases;
    }
  }

  // H_eff(E) on a fixed-N subspace of the interacting fermion and spin models.
  for (ModelVariant v : {ModelVariant::InteractingFermion, ModelVariant::XXZSpin}) {
    ModelSpec spec;
    spec.variant = v;
    spec.L = 8;
    spec.U = 1.5;
    spec.mu0 = 0.7;
    spec.h = 0.4;
    spec.Jz = 0.8;
    spec.Delta = 0.6;
    const SectorConstraint sector = v == ModelVariant::XXZSpin ? SectorConstraint::none()
                                                               : SectorConstraint::fixed_parity(Parity::Even);
    const SectorBasis basis(site_kind(v), spec.L, sector);
    const Eigen::MatrixXd hm = build_many_body<double>(spec, basis, true);
    const auto eig = hermitian_eigen(hm);

    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < basis.dim(); ++i)
      if (popcount(basis.state(i)) == 4) rows.push_back(static_cast<Eigen::Index>(i));
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(hm.rows(), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) p(rows[k], static_cast<Eigen::Index>(k)) = 1.0;

    int used = 0;
    for (Eigen::Index n = 0; n < eig.values.size() && used < cases; n += 3) {
      const Eigen::VectorXd x = p.transpose() * eig.vectors.col(n);
      if (x.norm() < 1e-3) continue;
      try {
        const auto he = effective_hamiltonian<double>(hm, p, eig.values[n]);
        heff.see((he.matrix * x - eig.values[n] * x).norm() / x.norm());
        ++heff.check.cases;
        ++used;
      } catch (const SingularResolvent&) {
      }
    }
  }

  return {versus.done(), wick.done(), heff.done(), drift.done(), zero.done()};
}

bool report_selftest(const std::vector<SelftestCheck>& checks, std::ostream& os) {
  bool ok = true;
  for (const auto& c : checks) {
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %-20s worst=%.3e tol=%.0e cases=%d\n",
                  c.pass ? "PASS" : "FAIL", c.name.c_str(), c.worst, c.tolerance, c.cases);
    os << line;
    ok = ok && c.pass && c.cases > 0;
  }
  return ok;
}

}  // namespace bcharge
