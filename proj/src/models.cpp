#include "bcharge/models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bcharge/errors.hpp"

namespace bcharge {

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::FreeFermion: return "free";
    case ModelVariant::InteractingFermion: return "interacting";
    case ModelVariant::XXZSpin: return "xxz";
    case ModelVariant::SpinfulFermion: return "spinful";
    case ModelVariant::Transport: return "transport";
  }
  return "unknown";
}

ModelVariant parse_variant(std::string_view name) {
  if (name == "free" || name == "FreeFermion") return ModelVariant::FreeFermion;
  if (name == "interacting" || name == "InteractingFermion") return ModelVariant::InteractingFermion;
  if (name == "xxz" || name == "spin" || name == "XXZSpin") return ModelVariant::XXZSpin;
  if (name == "spinful" || name == "SpinfulFermion") return ModelVariant::SpinfulFermion;
  if (name == "transport" || name == "Transport") return ModelVariant::Transport;
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

const std::vector<std::string>& ModelSpec::keys() {
  static const std::vector<std::string> k{"L",  "t0", "mu0", "Delta", "U",   "Jperp",
                                          "Jz", "h",  "tl",  "tr",    "mul", "mur"};
  return k;
}

double ModelSpec::get(std::string_view key) const {
  if (key == "L") return L;
  if (key == "t0") return t0;
  if (key == "mu0") return mu0;
  if (key == "Delta") return Delta;
  if (key == "U") return U;
  if (key == "Jperp") return Jperp;
  if (key == "Jz") return Jz;
  if (key == "h") return h;
  if (key == "tl") return tl;
  if (key == "tr") return tr;
  if (key == "mul") return mul;
  if (key == "mur") return mur;
  throw ConfigError("unknown model key '" + std::string(key) + "'");
}

void ModelSpec::set(std::string_view key, double value) {
  if (key == "L") {
    if (value != std::floor(value)) throw ConfigError("L must be an integer");
    L = static_cast<int>(value);
  } else if (key == "t0") t0 = value;
  else if (key == "mu0") mu0 = value;
  else if (key == "Delta") Delta = value;
  else if (key == "U") U = value;
  else if (key == "Jperp") Jperp = value;
  else if (key == "Jz") Jz = value;
  else if (key == "h") h = value;
  else if (key == "tl") tl = value;
  else if (key == "tr") tr = value;
  else if (key == "mul") mul = value;
  else if (key == "mur") mur = value;
  else throw ConfigError("unknown model key '" + std::string(key) + "'");
}

void ModelSpec::validate() const {
  if (L < 4) throw ConfigError("L must be at least 4, got " + std::to_string(L));
  if (variant == ModelVariant::Transport && L % 2 != 0)
    throw ConfigError("transport chain needs even L");
  for (const auto& k : keys())
    if (!std::isfinite(get(k))) throw ConfigError("coupling " + k + " is not finite");
}

bool ModelSpec::is_quadratic() const {
  switch (variant) {
    case ModelVariant::FreeFermion:
    case ModelVariant::SpinfulFermion:
    case ModelVariant::Transport: return true;
    case ModelVariant::InteractingFermion: return U == 0.0;
    case ModelVariant::XXZSpin: return false;
  }
  return false;
}

NambuMatrix NambuMatrix::from_blocks(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || b.cols() != a.cols())
    throw DimensionMismatch("Nambu blocks must be square and of equal size");
  const Eigen::Index m = a.rows();
  NambuMatrix out;
  out.h.resize(2 * m, 2 * m);
  out.h.topLeftCorner(m, m) = a;
  out.h.topRightCorner(m, m) = b;
  out.h.bottomLeftCorner(m, m) = -b.conjugate();
  out.h.bottomRightCorner(m, m) = -a.conjugate();
  out.offset = 0.5 * a.trace().real();
  return out;
}

Eigen::MatrixXd nambu_swap(Eigen::Index modes) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  x.topRightCorner(modes, modes).setIdentity();
  x.bottomLeftCorner(modes, modes).setIdentity();
  return x;
}

double particle_hole_defect(const Eigen::MatrixXcd& h) {
  if (h.rows() % 2 != 0 || h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  if (h.size() == 0) return 0.0;
  const Eigen::MatrixXd x = nambu_swap(h.rows() / 2);
  return (x * h.conjugate() * x + h).cwiseAbs().maxCoeff();
}

namespace {

void add_hopping(Eigen::MatrixXcd& a, int i, int j, double t) {
  a(i, j) += t;
  a(j, i) += t;
}

// Nearest-neighbour bonds of a chain of n sites starting at `first`.
template <typename F>
void for_each_bond(int first, int n, bool periodic, F&& f) {
  for (int j = 0; j + 1 < n; ++j) f(first + j, first + j + 1);
  if (periodic && n >= 2) f(first + n - 1, first);
}

}  // namespace

NambuMatrix build_nambu(const ModelSpec& spec, bool include_boundary) {
  spec.validate();
  if (!spec.is_quadratic())
    throw ConfigError("build_nambu: model '" + std::string(to_string(spec.variant)) +
                      "' is not quadratic");
  const bool boundary = include_boundary && spec.boundary_on;
  const int m = spec.modes();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m, m);
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(m, m);

  switch (spec.variant) {
    case ModelVariant::FreeFermion:
    case ModelVariant::InteractingFermion:
      for_each_bond(0, spec.L, spec.periodic, [&](int i, int j) { add_hopping(a, i, j, spec.t0); });
      a.diagonal().array() -= spec.mu0;
      if (boundary) {
        b(0, 1) = spec.Delta;
        b(1, 0) = -spec.Delta;
      }
      break;
    case ModelVariant::SpinfulFermion:
      for (int s = 0; s < 2; ++s)
        for_each_bond(0, spec.L, spec.periodic,
                      [&](int i, int j) { add_hopping(a, 2 * i + s, 2 * j + s, spec.t0); });
      a.diagonal().array() -= spec.mu0;
      if (boundary) {
        // c_{1,up}^+ c_{2,down}^+ : modes 0 and 3
        b(0, 3) = spec.Delta;
        b(3, 0) = -spec.Delta;
      }
      break;
    case ModelVariant::Transport: {
      const int half = spec.L / 2;
      for_each_bond(0, half, false, [&](int i, int j) { add_hopping(a, i, j, spec.tl); });
      for_each_bond(half, half, false, [&](int i, int j) { add_hopping(a, i, j, spec.tr); });
      a.diagonal().head(half).array() -= spec.mul;
      a.diagonal().tail(half).array() -= spec.mur;
      if (boundary) add_hopping(a, half - 1, half, spec.Delta);
      break;
    }
    case ModelVariant::XXZSpin: break;
  }
  return NambuMatrix::from_blocks(a, b);
}

NambuMatrix build_boundary_nambu(const ModelSpec& spec) {
  ModelSpec only_boundary = spec;
  only_boundary.boundary_on = true;
  const NambuMatrix full = build_nambu(only_boundary, true);
  const NambuMatrix bulk = build_nambu(only_boundary, false);
  NambuMatrix out;
  out.h = full.h - bulk.h;
  out.offset = full.offset - bulk.offset;
  return out;
}

double dispersion(double k, double t0, double mu0) { return 2.0 * t0 * std::cos(k) - mu0; }

double quasiparticle_gap(double t0, double mu0) {
  return std::max(0.0, std::abs(mu0) - 2.0 * std::abs(t0));
}

}  // namespace bcharge
