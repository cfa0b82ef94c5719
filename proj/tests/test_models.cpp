#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bcharge/config.hpp"
#include "bcharge/errors.hpp"
#include "bcharge/many_body.hpp"
#include "bcharge/models.hpp"
#include "helpers.hpp"

using namespace bcharge;
using testing::reference_hamiltonian;
using testing::restrict_to;
using testing::sorted;

namespace {

ModelSpec free_chain(int L, double mu0, double delta) {
  ModelSpec s;
  s.variant = ModelVariant::FreeFermion;
  s.L = L;
  s.mu0 = mu0;
  s.Delta = delta;
  return s;
}

// Dense matrix of the bulk/boundary terms on a basis, bypassing the L >= 4 check.
Eigen::MatrixXd unchecked_matrix(const ModelSpec& spec, const SectorBasis& basis, Terms terms) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  detail::for_each_element_unchecked(spec, basis, terms,
                                     [&](std::size_t r, std::size_t c, double v) { m(r, c) += v; });
  return m;
}

}  // namespace

TEST_CASE("dispersion values and gap closing") {
  CHECK(dispersion(0.0, 1.0, 0.0) == doctest::Approx(2.0));
  CHECK(dispersion(std::numbers::pi, 1.0, 2.0) == doctest::Approx(-4.0));
  for (double mu : {0.0, 1.0, 1.99, 2.0, 2.01, 3.0, -2.5}) {
    double smallest = INFINITY;
    for (int n = 0; n <= 20000; ++n)
      smallest = std::min(smallest, std::abs(dispersion(2.0 * std::numbers::pi * n / 20000, 1.0, mu)));
    const bool closes = std::abs(mu) <= 2.0;
    CHECK((smallest < 1e-3) == closes);
    CHECK(quasiparticle_gap(1.0, mu) == doctest::Approx(closes ? 0.0 : std::abs(mu) - 2.0));
  }
}

TEST_CASE("build_nambu: periodic hopping block without pairing") {
  const NambuMatrix h = build_nambu(free_chain(4, 0.0, 0.0), true);
  CHECK(h.modes() == 4);
  CHECK(h.pairing_block().norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.normal_block());
  const Eigen::Vector4d expected(-2.0, 0.0, 0.0, 2.0);
  CHECK((es.eigenvalues() - expected).norm() < 1e-12);
}

TEST_CASE("build_nambu: pair term couples only the first two sites") {
  const NambuMatrix h = build_nambu(free_chain(4, 0.0, 1.0), true);
  const Eigen::MatrixXcd b = h.pairing_block();
  int nonzero = 0;
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) nonzero += std::abs(b(i, j)) > 0.0;
  CHECK(nonzero == 2);
  CHECK(std::abs(b(0, 1)) == doctest::Approx(1.0));
  CHECK(std::abs(b(0, 1) + b(1, 0)) == 0.0);
  CHECK_FALSE(h.conserves_number());
}

TEST_CASE("build_nambu: transport chain matches a scalar assembly") {
  ModelSpec s;
  s.variant = ModelVariant::Transport;
  s.L = 8;
  s.tl = s.tr = 1.0;
  s.mul = -2.0;
  s.mur = 0.0;
  s.Delta = 1.0;
  const NambuMatrix h = build_nambu(s, true);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(8, 8);
  for (int j = 0; j < 7; ++j) a(j, j + 1) = a(j + 1, j) = 1.0;  // tl, coupling and tr are all 1
  for (int j = 0; j < 4; ++j) a(j, j) = 2.0;
  CHECK((h.normal_block() - a).norm() == 0.0);
  CHECK(h.pairing_block().norm() == 0.0);

  // Without the coupling the two halves separate.
  const NambuMatrix bulk = build_nambu(s, false);
  CHECK(bulk.normal_block()(3, 4) == 0.0);
  CHECK((build_boundary_nambu(s).h - (h.h - bulk.h)).norm() == 0.0);
}

TEST_CASE("build_nambu rejects interacting models") {
  ModelSpec s;
  s.variant = ModelVariant::XXZSpin;
  CHECK_THROWS_AS(build_nambu(s, true), ConfigError);
  s.variant = ModelVariant::InteractingFermion;
  s.U = 1.0;
  CHECK_THROWS_AS(build_nambu(s, true), ConfigError);
  s.U = 0.0;
  CHECK_NOTHROW(build_nambu(s, true));
}

TEST_CASE("spec validation") {
  ModelSpec s;
  s.L = 3;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.L = 6;
  s.variant = ModelVariant::Transport;
  CHECK_NOTHROW(s.validate());
  s.L = 7;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.L = 8;
  s.mur = NAN;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.mur = INFINITY;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("Nambu matrices are Hermitian and particle-hole symmetric") {
  std::mt19937_64 rng(3);
  for (auto v : {ModelVariant::FreeFermion, ModelVariant::SpinfulFermion, ModelVariant::Transport})
    for (int rep = 0; rep < 10; ++rep) {
      const ModelSpec s = testing::random_spec(v, 4 + 2 * (rep % 3), rng);
      for (bool boundary : {false, true}) {
        const NambuMatrix h = build_nambu(s, boundary);
        CHECK(h.h.rows() == 2 * s.modes());
        CHECK(hermiticity_defect(h.h) == 0.0);
        CHECK(particle_hole_defect(h.h) == 0.0);
        CHECK(h.offset == doctest::Approx(0.5 * h.normal_block().trace().real()));
      }
    }
}

TEST_CASE("quadratic many-body spectrum is the set of quasiparticle occupation sums") {
  std::mt19937_64 rng(5);
  for (auto v : {ModelVariant::FreeFermion, ModelVariant::Transport, ModelVariant::SpinfulFermion}) {
    const int L = v == ModelVariant::SpinfulFermion ? 3 : (v == ModelVariant::Transport ? 6 : 5);
    for (int rep = 0; rep < 3; ++rep) {
      ModelSpec s = testing::random_spec(v, std::max(L, 4), rng);
      if (v == ModelVariant::SpinfulFermion) s.L = 4;
      const NambuMatrix h = build_nambu(s, true);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.h);
      // Positive half of the BdG spectrum (eigenvalues come in +/- pairs).
      const int M = s.modes();
      Eigen::VectorXd eps = es.eigenvalues().tail(M);
      const double ground = h.offset - 0.5 * eps.sum();
      Eigen::VectorXd sums(Eigen::Index{1} << M);
      for (Eigen::Index mask = 0; mask < sums.size(); ++mask) {
        double e = ground;
        for (int k = 0; k < M; ++k)
          if ((mask >> k) & 1) e += eps[k];
        sums[mask] = e;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(reference_hamiltonian(s, true));
      CHECK((sorted(sums) - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("many-body matrices equal the Kronecker-product reference on every sector") {
  std::mt19937_64 rng(7);
  for (auto v : {ModelVariant::FreeFermion, ModelVariant::InteractingFermion, ModelVariant::XXZSpin,
                 ModelVariant::SpinfulFermion, ModelVariant::Transport}) {
    for (int rep = 0; rep < 3; ++rep) {
      const ModelSpec s = testing::random_spec(v, v == ModelVariant::SpinfulFermion ? 4 : 6, rng);
      const SiteKind kind = site_kind(v);
      for (bool boundary : {false, true}) {
        const Eigen::MatrixXd ref = reference_hamiltonian(s, boundary);
        std::vector<SectorConstraint> sectors{SectorConstraint::none()};
        if (v != ModelVariant::XXZSpin || !boundary) {
          sectors.push_back(SectorConstraint::fixed_parity(Parity::Even));
          sectors.push_back(SectorConstraint::fixed_parity(Parity::Odd));
        }
        const bool conserves = !boundary || v == ModelVariant::Transport;
        if (conserves)
          for (int n = 0; n <= s.modes(); ++n) sectors.push_back(SectorConstraint::fixed_count(n));
        for (const auto& c : sectors) {
          if (v == ModelVariant::XXZSpin && c.type == SectorConstraint::Type::FixedParity) continue;
          const SectorBasis basis(kind, s.L, c);
          const Eigen::MatrixXd m = build_many_body<double>(s, basis, boundary);
          CHECK((m - restrict_to(ref, basis)).cwiseAbs().maxCoeff() < 1e-14);
          CHECK(hermiticity_defect(m) == 0.0);
        }
      }
    }
  }
}

TEST_CASE("two-site XXZ with the doubled periodic bond") {
  ModelSpec s;
  s.variant = ModelVariant::XXZSpin;
  s.L = 2;
  s.Jperp = s.Jz = 1.0;
  s.h = 0.0;
  s.Delta = 0.0;
  const SectorBasis full(SiteKind::Spin, 2, SectorConstraint::none());
  const Eigen::MatrixXd m = unchecked_matrix(s, full, Terms::Full);
  // 2 x (sigma . sigma): triplet 2 x 1, singlet 2 x (-3)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  CHECK((es.eigenvalues() - Eigen::Vector4d(-6, 2, 2, 2)).norm() < 1e-12);
}

TEST_CASE("U = 0 fixed-N spectra are sums of single-particle energies") {
  ModelSpec s;
  s.variant = ModelVariant::InteractingFermion;
  s.L = 4;
  s.U = 0.0;
  s.mu0 = 0.37;
  s.t0 = 1.0;
  const Eigen::MatrixXcd a = build_nambu(s, false).normal_block();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sp(a);
  for (int n = 0; n <= 4; ++n) {
    const SectorBasis basis(SiteKind::Fermion, 4, SectorConstraint::fixed_count(n));
    std::vector<double> sums;
    for (unsigned mask = 0; mask < 16; ++mask)
      if (popcount(mask) == n) {
        double e = 0.0;
        for (int k = 0; k < 4; ++k)
          if ((mask >> k) & 1) e += sp.eigenvalues()[k];
        sums.push_back(e);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_many_body<double>(s, basis, false));
    const Eigen::VectorXd expected = sorted(Eigen::Map<Eigen::VectorXd>(sums.data(), sums.size()));
    CHECK((es.eigenvalues() - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("charge and parity symmetries of the many-body matrices") {
  std::mt19937_64 rng(11);
  for (auto v : {ModelVariant::FreeFermion, ModelVariant::InteractingFermion, ModelVariant::XXZSpin,
                 ModelVariant::SpinfulFermion, ModelVariant::Transport}) {
    const ModelSpec s = testing::random_spec(v, v == ModelVariant::SpinfulFermion ? 4 : 6, rng);
    const SectorBasis full(site_kind(v), s.L, SectorConstraint::none());
    bool keeps_charge_bulk = true;
    bool keeps_charge_full = true;
    bool keeps_parity_full = true;
    const Eigen::MatrixXd bulk = build_many_body<double>(s, full, false);
    const Eigen::MatrixXd all = build_many_body<double>(s, full, true);
    for (Eigen::Index i = 0; i < bulk.rows(); ++i)
      for (Eigen::Index j = 0; j < bulk.cols(); ++j) {
        const int dn = popcount(full.state(i)) - popcount(full.state(j));
        if (bulk(i, j) != 0.0 && dn != 0) keeps_charge_bulk = false;
        if (all(i, j) != 0.0 && dn != 0) keeps_charge_full = false;
        if (all(i, j) != 0.0 && (dn & 1)) keeps_parity_full = false;
      }
    CHECK(keeps_charge_bulk);
    if (v == ModelVariant::Transport) {
      CHECK(keeps_charge_full);
    } else {
      CHECK_FALSE(keeps_charge_full);
      CHECK(keeps_parity_full == (v != ModelVariant::XXZSpin));
    }
  }
}

TEST_CASE("sector compatibility and the dimension cap") {
  ModelSpec s = free_chain(6, 0.0, 1.0);
  const SectorBasis fixed(SiteKind::Fermion, 6, SectorConstraint::fixed_count(3));
  CHECK_THROWS_AS(build_many_body<double>(s, fixed, true), SectorMismatch);
  CHECK_NOTHROW(build_many_body<double>(s, fixed, false));
  const SectorBasis spins(SiteKind::Spin, 6, SectorConstraint::fixed_count(3));
  s.variant = ModelVariant::XXZSpin;
  CHECK_THROWS_AS(build_many_body<double>(s, spins, true), SectorMismatch);
  CHECK_THROWS_AS(build_many_body<double>(s, fixed, false), SectorMismatch);  // wrong site kind
  CHECK_THROWS_AS(SectorBasis(SiteKind::Spin, 12, SectorConstraint::none(), 1000), CapExceeded);
  const SectorBasis big(SiteKind::Spin, 6, SectorConstraint::none());
  CHECK_THROWS_AS(build_many_body<double>(s, big, true, 10), CapExceeded);
  CHECK(natural_sector(s, true, 3).type == SectorConstraint::Type::None);
  s.variant = ModelVariant::FreeFermion;
  CHECK(natural_sector(s, true, 3).type == SectorConstraint::Type::FixedParity);
  CHECK(natural_sector(s, false, 3).type == SectorConstraint::Type::FixedCharge);
}

TEST_CASE("model config round trips through JSON and INI") {
  ModelSpec s;
  s.variant = ModelVariant::Transport;
  s.L = 10;
  s.tl = 0.5;
  s.mur = -1.25;
  s.boundary_on = false;
  s.periodic = false;
  nlohmann::json j = s;
  const ModelSpec back = j.get<ModelSpec>();
  CHECK(back.variant == s.variant);
  CHECK(back.L == 10);
  CHECK(back.tl == 0.5);
  CHECK(back.mur == -1.25);
  CHECK_FALSE(back.boundary_on);
  const ModelSpec ini = model_from_ini("[model]\n# comment\n" + to_ini(s));
  CHECK(ini.mur == -1.25);
  CHECK(ini.variant == ModelVariant::Transport);
  CHECK_FALSE(ini.periodic);
  nlohmann::json bad = {{"mu1", 3}};
  CHECK_THROWS_AS(bad.get<ModelSpec>(), ConfigError);
  CHECK_THROWS_AS(parse_variant("ising"), ConfigError);
}
