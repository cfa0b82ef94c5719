#include "bcharge/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "bcharge/many_body.hpp"

namespace bcharge {

std::vector<double> all_charges(const ModelSpec& spec) {
  std::vector<double> out;
  if (spec.is_spin()) {
    for (int up = 0; up <= spec.L; ++up) out.push_back(up - 0.5 * spec.L);
  } else {
    for (int n = 0; n <= spec.modes(); ++n) out.push_back(n);
  }
  return out;
}

std::vector<SectorSpectrum> sector_spectra(const ModelSpec& spec, std::span<const double> charges,
                                           std::size_t cap) {
  spec.validate();
  std::vector<SectorSpectrum> out;
  out.reserve(charges.size());
  const SiteKind kind = site_kind(spec.variant);
  for (double q : charges) {
    const double count = spec.is_spin() ? q + 0.5 * spec.L : q;
    if (count != std::round(count) || count < 0 || count > spec.modes())
      throw ConfigError("charge " + std::to_string(q) + " is not admissible");
    SectorSpectrum s;
    s.charge = q;
    s.basis = std::make_shared<const SectorBasis>(
        kind, spec.L, SectorConstraint::fixed_count(static_cast<int>(count)), cap);
    auto eig = hermitian_eigen(build_many_body<double>(spec, *s.basis, false, cap));
    s.energies = std::move(eig.values);
    s.vectors = std::move(eig.vectors);
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

template <typename Visit>
void visit_pairs(std::span<const SectorSpectrum> spectra, const PairQuery& q, Visit&& visit) {
  if (!(q.energy_tol > 0.0)) return;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    for (std::size_t j = 0; j < spectra.size(); ++j) {
      if (i == j) continue;
      const double dq = spectra[j].charge - spectra[i].charge;
      const bool step_ok = std::any_of(q.charge_steps.begin(), q.charge_steps.end(),
                                       [&](double s) { return std::abs(dq - s) < q.charge_tol; });
      if (!step_ok) continue;
      const Eigen::VectorXd& ea = spectra[i].energies;
      const Eigen::VectorXd& eb = spectra[j].energies;
      const double* b_begin = eb.data();
      const double* b_end = eb.data() + eb.size();
      for (Eigen::Index a = 0; a < ea.size(); ++a) {
        const double* it = std::lower_bound(b_begin, b_end, ea(a) - q.energy_tol);
        for (; it != b_end && *it < ea(a) + q.energy_tol; ++it) {
          const double gap = std::abs(*it - ea(a));
          if (gap < q.energy_tol) visit(i, a, j, static_cast<Eigen::Index>(it - b_begin), gap);
        }
      }
    }
  }
}

}  // namespace

std::size_t count_pairs(std::span<const SectorSpectrum> spectra, const PairQuery& query) {
  std::size_t n = 0;
  visit_pairs(spectra, query, [&](auto...) { ++n; });
  return n;
}

std::vector<DegeneratePair> find_pairs(std::span<const SectorSpectrum> spectra,
                                       const PairQuery& query) {
  if (spectra.size() < 2) throw ConfigError("find_pairs needs at least two sectors");
  std::vector<DegeneratePair> all;
  visit_pairs(spectra, query,
              [&](std::size_t i, Eigen::Index a, std::size_t j, Eigen::Index b, double gap) {
                all.push_back({{i, a, spectra[i].charge, spectra[i].energies(a)},
                               {j, b, spectra[j].charge, spectra[j].energies(b)},
                               gap});
              });
  if (query.max_pairs == 0 || all.size() <= query.max_pairs) return all;

  std::vector<std::size_t> idx(all.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(query.seed);
  for (std::size_t k = 0; k < query.max_pairs; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  idx.resize(query.max_pairs);
  std::sort(idx.begin(), idx.end());
  std::vector<DegeneratePair> out;
  out.reserve(idx.size());
  for (std::size_t k : idx) out.push_back(all[k]);
  return out;
}

namespace {

Eigen::VectorXd embed_vector(const SectorSpectrum& s, Eigen::Index level, const SectorBasis& common) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(common.dim()));
  for (std::size_t r = 0; r < s.basis->dim(); ++r) {
    const auto idx = common.index(s.basis->state(r));
    if (!idx) throw SectorMismatch("sector state is missing from the common basis");
    v(static_cast<Eigen::Index>(*idx)) = s.vectors(static_cast<Eigen::Index>(r), level);
  }
  return v;
}

}  // namespace

MatrixElements boundary_matrix_element(std::span<const SectorSpectrum> spectra,
                                       std::span<const DegeneratePair> pairs,
                                       const SectorBasis& common,
                                       const Eigen::SparseMatrix<double>& h_boundary) {
  if (h_boundary.rows() != static_cast<Eigen::Index>(common.dim()) ||
      h_boundary.cols() != h_boundary.rows())
    throw DimensionMismatch("boundary operator does not act on the common basis");
  for (const auto& s : spectra)
    if (s.basis->kind() != common.kind() || s.basis->sites() != common.sites())
      throw SectorMismatch("sector basis cannot be embedded in the common basis");

  MatrixElements out;
  out.values.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.a.sector >= spectra.size() || p.b.sector >= spectra.size())
      throw std::out_of_range("pair refers to a missing sector");
    const Eigen::VectorXd va = embed_vector(spectra[p.a.sector], p.a.level, common);
    const Eigen::VectorXd vb = embed_vector(spectra[p.b.sector], p.b.level, common);
    const Eigen::VectorXd hva = h_boundary * va;
    out.values.push_back(std::abs(vb.dot(hva)));
  }
  double sum = 0.0;
  for (double v : out.values) sum += v;  // fixed order
  out.mean = out.values.empty() ? 0.0 : sum / static_cast<double>(out.values.size());
  return out;
}

MatrixElements boundary_matrix_element(std::span<const SectorSpectrum> spectra,
                                       std::span<const DegeneratePair> pairs,
                                       const ModelSpec& spec) {
  ModelSpec with_boundary = spec;
  with_boundary.boundary_on = true;
  const SectorBasis common(site_kind(spec.variant), spec.L, SectorConstraint::none());
  return boundary_matrix_element(spectra, pairs, common,
                                 build_boundary_operator(with_boundary, common));
}

template <typename Scalar>
EffectiveHamiltonian<Scalar> effective_hamiltonian(const Matrix<Scalar>& h,
                                                   const Matrix<Scalar>& subspace, double energy,
                                                   double resolvent_guard) {
  require_hermitian(h, 1e-10);
  const Eigen::Index n = h.rows();
  const Eigen::Index k = subspace.cols();
  if (subspace.rows() != n) throw DimensionMismatch("subspace vectors do not match H");
  if (k > n) throw DimensionMismatch("more subspace vectors than dimensions");
  const Matrix<Scalar> gram = subspace.adjoint() * subspace;
  if (k > 0 && (gram - Matrix<Scalar>::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-8)
    throw ConfigError("subspace columns are not orthonormal");

  EffectiveHamiltonian<Scalar> out;
  out.subspace = subspace;
  out.energy = energy;
  out.first_order = subspace.adjoint() * h * subspace;
  if (k == n) {
    out.matrix = out.first_order;
    return out;
  }

  // orthonormal basis of range(Q) from a full QR of P
  const Eigen::HouseholderQR<Matrix<Scalar>> qr(subspace);
  const Matrix<Scalar> full_q = qr.householderQ() * Matrix<Scalar>::Identity(n, n);
  const Matrix<Scalar> complement = full_q.rightCols(n - k);
  const Matrix<Scalar> h_qq = complement.adjoint() * h * complement;
  const Matrix<Scalar> h_qp = complement.adjoint() * h * subspace;

  const Eigen::VectorXd q_levels = hermitian_eigen(Matrix<Scalar>(0.5 * (h_qq + h_qq.adjoint())), false).values;
  const double distance = (q_levels.array() - energy).abs().minCoeff();
  if (distance < resolvent_guard)
    throw SingularResolvent("E is within " + std::to_string(distance) + " of the QHQ spectrum");

  const Matrix<Scalar> shifted = Matrix<Scalar>::Identity(n - k, n - k) * Scalar(energy) - h_qq;
  const Matrix<Scalar> x = shifted.partialPivLu().solve(h_qp);
  out.matrix = out.first_order + h_qp.adjoint() * x;
  return out;
}

template EffectiveHamiltonian<double> effective_hamiltonian(const Matrix<double>&,
                                                            const Matrix<double>&, double, double);
template EffectiveHamiltonian<cplx> effective_hamiltonian(const Matrix<cplx>&, const Matrix<cplx>&,
                                                          double, double);

std::vector<PhpScalingRow> php_offdiag_scaling(const ModelSpec& spec, std::span<const int> sizes,
                                               double energy_tol) {
  if (!(spec.variant == ModelVariant::FreeFermion ||
        (spec.variant == ModelVariant::InteractingFermion && spec.U == 0.0)) ||
      !spec.periodic)
    throw ConfigError("php_offdiag_scaling needs the periodic free chain");
  std::vector<PhpScalingRow> rows;
  for (int L : sizes) {
    ModelSpec s = spec;
    s.L = L;
    s.validate();
    if (L > 20) throw CapExceeded("php_offdiag_scaling enumerates 2^L states; L <= 20");

    // c_j = L^{-1/2} sum_k e^{ikj} d_k with sites j = 1, 2 carrying the pair term
    std::vector<double> k(L), eps(L);
    for (int n = 0; n < L; ++n) {
      k[n] = 2.0 * std::numbers::pi * n / L;
      eps[n] = dispersion(k[n], s.t0, s.mu0);
    }
    const double delta = s.boundary_on ? s.Delta : 0.0;
    auto string_odd = [](std::uint64_t x, int mode) {
      return popcount(x & ((std::uint64_t{1} << mode) - 1)) & 1;
    };

    PhpScalingRow row;
    row.L = L;
    double sum = 0.0;
    const std::uint64_t end = std::uint64_t{1} << L;
    for (std::uint64_t occ = 0; occ < end; ++occ) {
      for (int p = 0; p < L; ++p) {
        if ((occ >> p) & 1) continue;
        for (int q = p + 1; q < L; ++q) {
          if ((occ >> q) & 1) continue;
          if (!(std::abs(eps[p] + eps[q]) < energy_tol)) continue;
          // <occ + p + q| d_p^+ d_q^+ |occ>
          int sign = string_odd(occ, q) ? -1 : 1;
          if (string_odd(occ | (std::uint64_t{1} << q), p)) sign = -sign;
          const cplx coeff = std::exp(cplx(0.0, -(k[p] + 2.0 * k[q]))) -
                             std::exp(cplx(0.0, -(k[q] + 2.0 * k[p])));
          const double element = std::abs(delta / L * double(sign) * coeff);
          sum += element;
          row.max_offdiag = std::max(row.max_offdiag, element);
          ++row.n_elements;
        }
      }
    }
    row.mean_offdiag = row.n_elements ? sum / static_cast<double>(row.n_elements) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bcharge
