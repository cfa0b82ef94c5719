#include "bcharge/gaussian.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace bcharge {

GaussianState::GaussianState(Eigen::MatrixXcd correlation, ModeLayout layout)
    : gamma_(std::move(correlation)), layout_(layout) {
  if (gamma_.rows() != gamma_.cols() || gamma_.rows() % 2 != 0)
    throw DimensionMismatch("correlation matrix must be 2M x 2M");
  if (layout_ == ModeLayout::Spinful && modes() % 2 != 0)
    throw DimensionMismatch("spinful layout needs an even mode count");
}

bool GaussianState::is_diagonal() const {
  const Eigen::Index n = gamma_.rows();
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r)
      if (r != c && gamma_(r, c) != cplx(0.0)) return false;
  return true;
}

StateDefects check_state(const GaussianState& state) {
  const Eigen::MatrixXcd& g = state.correlation();
  const Eigen::Index n = g.rows();
  StateDefects d;
  if (n == 0) return d;
  const Eigen::MatrixXd x = nambu_swap(state.modes());
  d.hermiticity = (g - g.adjoint()).cwiseAbs().maxCoeff();
  d.particle_hole =
      (g + x * g.transpose() * x - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  d.purity = (g * g - g).cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd f = state.anomalous();
  d.antisymmetry = (f + f.transpose()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd herm = 0.5 * (g + g.adjoint());
  const Eigen::VectorXd ev = hermitian_eigen(herm, false).values;
  d.min_eigenvalue = ev.minCoeff();
  d.max_eigenvalue = ev.maxCoeff();
  return d;
}

GaussianState product_state(std::span<const std::uint8_t> occupations, ModeLayout layout) {
  const auto m = static_cast<Eigen::Index>(occupations.size());
  Eigen::MatrixXcd gamma = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double n = occupations[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    gamma(i, i) = 1.0 - n;
    gamma(m + i, m + i) = n;
  }
  return GaussianState(std::move(gamma), layout);
}

NambuPropagator::NambuPropagator(const NambuMatrix& h) : modes_(h.modes()) {
  require_hermitian(h.h);
  number_conserving_ = modes_ == 0 || h.conserves_number();
  if (number_conserving_)
    spectrum_ = hermitian_eigen(Eigen::MatrixXcd(h.normal_block()));
  else
    spectrum_ = hermitian_eigen(h.h);
}

Eigen::MatrixXcd NambuPropagator::unitary(double t) const {
  if (!number_conserving_) return unitary_from_spectrum(spectrum_, t);
  const Eigen::MatrixXcd ua = unitary_from_spectrum(spectrum_, t);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * modes_, 2 * modes_);
  u.topLeftCorner(modes_, modes_) = ua;
  u.bottomRightCorner(modes_, modes_) = ua.conjugate();
  return u;
}

GaussianState apply_unitary(const GaussianState& state, const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd& g = state.correlation();
  if (u.rows() != g.rows() || u.cols() != g.cols())
    throw DimensionMismatch("unitary does not match the Nambu dimension");
  if (state.is_diagonal()) {
    // U D U^+ = (U sqrt(D)) (U sqrt(D))^+ over the nonzero diagonal entries
    std::vector<Eigen::Index> cols;
    for (Eigen::Index a = 0; a < g.rows(); ++a)
      if (g(a, a).real() > 0.0) cols.push_back(a);
    Eigen::MatrixXcd w(g.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
      w.col(static_cast<Eigen::Index>(k)) = u.col(cols[k]) * std::sqrt(g(cols[k], cols[k]).real());
    return GaussianState(w * w.adjoint(), state.layout());
  }
  return GaussianState(u * g * u.adjoint(), state.layout());
}

GaussianState evolve(const GaussianState& state, const NambuMatrix& h, double t) {
  if (h.modes() != state.modes())
    throw DimensionMismatch("Hamiltonian and state have different mode counts");
  if (t == 0.0) return state;
  return apply_unitary(state, NambuPropagator(h).unitary(t));
}

GaussianState floquet_step(const GaussianState& state, const Eigen::MatrixXcd& u_boundary,
                           const Eigen::MatrixXcd& u_bulk) {
  if (u_boundary.rows() != u_bulk.rows() || u_boundary.cols() != u_bulk.cols())
    throw DimensionMismatch("Floquet unitaries have different sizes");
  return apply_unitary(state, u_boundary * u_bulk);
}

double particle_number(const GaussianState& state) {
  return state.correlation().bottomRightCorner(state.modes(), state.modes()).trace().real();
}

double spin_z(const GaussianState& state) {
  if (state.layout() != ModeLayout::Spinful)
    throw DimensionMismatch("spin_z needs the spinful mode layout");
  const Eigen::Index m = state.modes();
  const Eigen::MatrixXcd& g = state.correlation();
  double sz = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) sz += (i % 2 == 0 ? 0.5 : -0.5) * g(m + i, m + i).real();
  return sz;
}

namespace {

void check_modes(const GaussianState& state, std::span<const int> modes) {
  for (int i : modes)
    if (i < 0 || i >= state.modes())
      throw std::out_of_range("mode index " + std::to_string(i) + " out of range");
}

}  // namespace

double subsystem_particle_number(const GaussianState& state, std::span<const int> modes) {
  check_modes(state, modes);
  const Eigen::Index m = state.modes();
  double n = 0.0;
  for (int i : modes) n += state.correlation()(m + i, m + i).real();
  return n;
}

double subsystem_charge_variance(const GaussianState& state, std::span<const int> modes) {
  check_modes(state, modes);
  const Eigen::Index m = state.modes();
  const Eigen::MatrixXcd& g = state.correlation();
  double var = 0.0;
  for (int i : modes) {
    var += g(m + i, m + i).real();
    for (int j : modes) {
      // G_ij G_ji with G Hermitian is |G_ij|^2
      var -= std::norm(g(m + i, m + j));
      var += std::norm(g(i, m + j));
    }
  }
  return std::max(var, 0.0);
}

double charge_variance(const GaussianState& state) {
  const Eigen::Index m = state.modes();
  const Eigen::MatrixXcd& g = state.correlation();
  const double var = g.bottomRightCorner(m, m).trace().real() -
                     g.bottomRightCorner(m, m).squaredNorm() + g.topRightCorner(m, m).squaredNorm();
  return std::max(var, 0.0);
}

double energy(const GaussianState& state, const NambuMatrix& h) {
  if (h.modes() != state.modes())
    throw DimensionMismatch("Hamiltonian and state have different mode counts");
  const cplx tr = h.h.cwiseProduct(state.correlation().transpose()).sum();
  return -0.5 * tr.real() + h.offset;
}

}  // namespace bcharge
