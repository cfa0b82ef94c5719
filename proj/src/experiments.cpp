#include "bcharge/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>

#include "bcharge/ed.hpp"
#include "bcharge/errors.hpp"
#include "bcharge/gaussian.hpp"
#include "bcharge/many_body.hpp"
#include "bcharge/perturbation.hpp"
#include "bcharge/random.hpp"

namespace bcharge {

std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::Auto: return "auto";
    case Engine::Gaussian: return "gaussian";
    case Engine::ED: return "ed";
  }
  return "?";
}

Engine parse_engine(std::string_view name) {
  if (name == "auto") return Engine::Auto;
  if (name == "gaussian") return Engine::Gaussian;
  if (name == "ed") return Engine::ED;
  throw ConfigError("unknown engine '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// protocol

namespace {

bool is_filling_key(std::string_view name) { return name == "nu" || name == "nul" || name == "nur"; }

}  // namespace

void Protocol::validate() const {
  if (samples < 1) throw ConfigError("need at least one sample");
  if (threads < 1) throw ConfigError("need at least one thread");
  for (const auto& a : axes) {
    if (a.values.empty()) throw ConfigError("axis '" + a.name + "' has an empty grid");
    if (a.name == "L") throw ConfigError("sweep L through the size list, not an axis");
    if (!is_filling_key(a.name)) (void)model.get(a.name);  // throws on unknown keys
  }
  for (int L : effective_sizes()) {
    ModelSpec s = model;
    s.L = L;
    s.validate();
  }
  if (measure_time && !(*measure_time >= 0.0)) throw ConfigError("measure time must be >= 0");
  if (periods && *periods < 0) throw ConfigError("period count must be >= 0");
  if (!(time_step > 0.0)) throw ConfigError("time step must be positive");
}

std::vector<int> Protocol::effective_sizes() const {
  return sizes.empty() ? std::vector<int>{model.L} : sizes;
}

std::size_t Protocol::grid_size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

std::vector<double> Protocol::grid_point(std::size_t g) const {
  std::vector<double> out(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    const std::size_t n = axes[k].values.size();
    out[k] = axes[k].values[g % n];
    g /= n;
  }
  return out;
}

Protocol with_axis_values(const Protocol& p, const std::vector<double>& values) {
  Protocol out = p;
  for (std::size_t k = 0; k < p.axes.size(); ++k) {
    const std::string& name = p.axes[k].name;
    if (name == "nu") out.nu = values[k];
    else if (name == "nul") out.nu_left = values[k];
    else if (name == "nur") out.nu_right = values[k];
    else out.model.set(name, values[k]);
  }
  return out;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<std::uint8_t> spinful_balanced_occupation(int sites, int per_species, std::uint64_t seed) {
  const auto up = random_occupation(sites, per_species, seed);
  const auto down = random_occupation(sites, per_species, splitmix64(seed ^ 0x2545f4914f6cdd1dULL));
  std::vector<std::uint8_t> occ(2 * static_cast<std::size_t>(sites), 0);
  for (int j = 0; j < sites; ++j) {
    occ[2 * j] = up[j];
    occ[2 * j + 1] = down[j];
  }
  return occ;
}

// ---------------------------------------------------------------------------
// shared scan machinery

namespace {

struct SampleOutcome {
  double var = 0.0;
  double dN = 0.0;
  double drift = 0.0;
};

using SampleFn = std::function<SampleOutcome(std::uint64_t seed)>;

Engine resolve_engine(Engine requested, const ModelSpec& spec) {
  if (requested == Engine::Auto) return spec.is_quadratic() ? Engine::Gaussian : Engine::ED;
  if (requested == Engine::Gaussian && !spec.is_quadratic())
    throw ConfigError("the Gaussian engine needs a quadratic model");
  return requested;
}

ScanRow run_samples(const Protocol& p, std::size_t grid_index, const std::vector<double>& params,
                    int L, const SampleFn& sample) {
  std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(p.samples));
  parallel_for(outcomes.size(), p.threads, [&](std::size_t i) {
    outcomes[i] = sample(sample_seed(p.seed, grid_index, static_cast<std::uint64_t>(L), i));
  });
  ScanRow row;
  row.params = params;
  row.L = L;
  row.n_samples = p.samples;
  row.seed = p.seed;
  const double n = static_cast<double>(outcomes.size());
  double sum_var = 0.0;
  double sum_dn = 0.0;
  for (const auto& o : outcomes) {
    sum_var += o.var;
    sum_dn += o.dN;
    row.sample_vars.push_back(o.var);
  }
  row.mean_var = sum_var / n;
  row.mean_dN = sum_dn / n;
  row.mean_var_density = row.mean_var / L;
  double ss = 0.0;
  for (const auto& o : outcomes) ss += (o.var - row.mean_var) * (o.var - row.mean_var);
  row.stderr_var = outcomes.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  double drift = 0.0;
  for (const auto& o : outcomes) drift = std::max(drift, o.drift);
  row.extra.push_back(drift);  // callers pop or keep
  return row;
}

std::vector<std::string> axis_names(const Protocol& p) {
  std::vector<std::string> out;
  for (const auto& a : p.axes) out.push_back(a.name);
  return out;
}

template <typename PointFn>
ScanResult scan_grid(const Protocol& p, PointFn&& point) {
  p.validate();
  ScanResult result;
  result.param_names = axis_names(p);
  const auto sizes = p.effective_sizes();
  for (std::size_t g = 0; g < p.grid_size(); ++g) {
    const auto params = p.grid_point(g);
    const Protocol local = with_axis_values(p, params);
    for (int L : sizes) {
      ModelSpec spec = local.model;
      spec.L = L;
      spec.validate();
      result.rows.push_back(point(local, spec, g, params));
    }
  }
  return result;
}

// Hamiltonian quench from a random product state with fixed charge.
ScanRow steady_point(const Protocol& p, const ModelSpec& spec, std::size_t g,
                     const std::vector<double>& params) {
  const int L = spec.L;
  const double T = p.measure_time.value_or(2.0 * L);
  const Engine engine = resolve_engine(p.engine, spec);
  const int modes = spec.modes();
  const bool spinful = spec.variant == ModelVariant::SpinfulFermion;
  const int count = spinful ? 2 * filling_count(L, p.nu) : filling_count(L, p.nu);
  const double charge0 = spec.is_spin() ? count - 0.5 * L : count;
  auto initial = [&](std::uint64_t seed) {
    return spinful ? spinful_balanced_occupation(L, count / 2, seed)
                   : random_occupation(modes, count, seed);
  };

  ScanRow row;
  if (engine == Engine::Gaussian) {
    const NambuMatrix h = build_nambu(spec, true);
    const Eigen::MatrixXcd u = NambuPropagator(h).unitary(T);
    const ModeLayout layout = spinful ? ModeLayout::Spinful : ModeLayout::Spinless;
    row = run_samples(p, g, params, L, [&](std::uint64_t seed) {
      const GaussianState s = apply_unitary(product_state(initial(seed), layout), u);
      return SampleOutcome{charge_variance(s), particle_number(s) - count, 0.0};
    });
  } else {
    auto basis = std::make_shared<const SectorBasis>(site_kind(spec.variant), L,
                                                     natural_sector(spec, true, count), p.dim_cap);
    const SpectralPropagator<double> prop(build_many_body<double>(spec, *basis, true, p.dim_cap));
    row = run_samples(p, g, params, L, [&](std::uint64_t seed) {
      const DenseState psi0 = basis_state(basis, to_bits(initial(seed)));
      const DenseState psi{basis, prop.evolve(psi0.amplitudes, T)};
      return SampleOutcome{charge_variance_mb(psi), charge_mean_mb(psi) - charge0, 0.0};
    });
  }
  row.extra = {charge0};
  return row;
}

ScanRow floquet_point(const Protocol& p, const ModelSpec& spec, std::size_t g,
                      const std::vector<double>& params) {
  if (!spec.is_quadratic()) throw ConfigError("Floquet scans need a quadratic model");
  const int L = spec.L;
  const int n_periods = p.periods.value_or(L);
  const Engine engine = resolve_engine(p.engine, spec);
  const bool spinful = spec.variant == ModelVariant::SpinfulFermion;
  const int modes = spec.modes();
  const int per_species = filling_count(L, p.nu);
  const int count = spinful ? 2 * per_species : per_species;

  auto initial = [&](std::uint64_t seed) {
    return spinful ? spinful_balanced_occupation(L, per_species, seed)
                   : random_occupation(modes, count, seed);
  };

  ScanRow row;
  if (engine == Engine::Gaussian) {
    const Eigen::MatrixXcd u0 = NambuPropagator(build_nambu(spec, false)).unitary(1.0);
    const Eigen::MatrixXcd ub = spec.boundary_on
                                    ? NambuPropagator(build_boundary_nambu(spec)).unitary(1.0)
                                    : Eigen::MatrixXcd::Identity(2 * modes, 2 * modes);
    const Eigen::MatrixXcd w = matrix_power(ub * u0, n_periods);
    const ModeLayout layout = spinful ? ModeLayout::Spinful : ModeLayout::Spinless;
    row = run_samples(p, g, params, L, [&](std::uint64_t seed) {
      const GaussianState s0 = product_state(initial(seed), layout);
      const GaussianState s = apply_unitary(s0, w);
      const double drift = spinful ? std::abs(spin_z(s) - spin_z(s0)) : 0.0;
      return SampleOutcome{charge_variance(s), particle_number(s) - count, drift};
    });
  } else {
    auto basis = std::make_shared<const SectorBasis>(site_kind(spec.variant), L,
                                                     natural_sector(spec, true, count), p.dim_cap);
    const Eigen::MatrixXd h0 = build_terms<double>(spec, *basis, Terms::Bulk, p.dim_cap);
    const Eigen::MatrixXd hb =
        spec.boundary_on ? build_terms<double>(spec, *basis, Terms::Boundary, p.dim_cap)
                         : Eigen::MatrixXd::Zero(h0.rows(), h0.cols());
    const Eigen::MatrixXcd w = matrix_power(floquet_unitary_mb(hb, h0), n_periods);
    std::vector<int> up_modes;
    for (int j = 0; j < L; ++j) up_modes.push_back(2 * j);
    std::vector<int> down_modes;
    for (int j = 0; j < L; ++j) down_modes.push_back(2 * j + 1);
    auto sz = [&](const DenseState& psi) {
      return 0.5 * (subsystem_charge_mean_mb(psi, up_modes) - subsystem_charge_mean_mb(psi, down_modes));
    };
    row = run_samples(p, g, params, L, [&](std::uint64_t seed) {
      const DenseState psi0 = basis_state(basis, to_bits(initial(seed)));
      const DenseState psi{basis, w * psi0.amplitudes};
      const double drift = spinful ? std::abs(sz(psi) - sz(psi0)) : 0.0;
      return SampleOutcome{charge_variance_mb(psi), charge_mean_mb(psi) - count, drift};
    });
  }
  const double drift = row.extra.front();
  row.extra = {double(count)};
  if (spinful) row.extra.push_back(drift);
  return row;
}

std::vector<std::uint8_t> transport_occupation(int L, int left, int right, std::uint64_t seed) {
  const int half = L / 2;
  const auto occ_l = random_occupation(half, left, seed);
  const auto occ_r = random_occupation(half, right, splitmix64(seed ^ 0x5bd1e995ULL));
  std::vector<std::uint8_t> occ(occ_l);
  occ.insert(occ.end(), occ_r.begin(), occ_r.end());
  return occ;
}

ScanRow transport_point(const Protocol& p, const ModelSpec& spec, std::size_t g,
                        const std::vector<double>& params) {
  if (spec.variant != ModelVariant::Transport) throw ConfigError("transport scans need the transport model");
  const int L = spec.L;
  const int half = L / 2;
  const double T = p.measure_time.value_or(2.0 * L);
  const Engine engine = resolve_engine(p.engine, spec);
  const int n_left = filling_count(half, p.nu_left);
  const int n_right = filling_count(half, p.nu_right);
  std::vector<int> right(static_cast<std::size_t>(half));
  for (int j = 0; j < half; ++j) right[j] = half + j;

  ScanRow row;
  if (engine == Engine::Gaussian) {
    const Eigen::MatrixXcd u = NambuPropagator(build_nambu(spec, true)).unitary(T);
    row = run_samples(p, g, params, L, [&](std::uint64_t seed) {
      const GaussianState s =
          apply_unitary(product_state(transport_occupation(L, n_left, n_right, seed)), u);
      return SampleOutcome{subsystem_charge_variance(s, right),
                           subsystem_particle_number(s, right) - n_right, 0.0};
    });
  } else {
    auto basis = std::make_shared<const SectorBasis>(
        SiteKind::Fermion, L, SectorConstraint::fixed_count(n_left + n_right), p.dim_cap);
    const SpectralPropagator<double> prop(build_many_body<double>(spec, *basis, true, p.dim_cap));
    row = run_samples(p, g, params, L, [&](std::uint64_t seed) {
      const DenseState psi0 =
          basis_state(basis, to_bits(transport_occupation(L, n_left, n_right, seed)));
      const DenseState psi{basis, prop.evolve(psi0.amplitudes, T)};
      return SampleOutcome{subsystem_charge_variance_mb(psi, right),
                           subsystem_charge_mean_mb(psi, right) - n_right, 0.0};
    });
  }
  const double band = 2.0 * (std::abs(spec.tl) + std::abs(spec.tr));
  row.extra = {double(n_right), spec.mul - band, spec.mul + band};
  return row;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// scans

ScanResult run_steady_scan(const Protocol& p) {
  ScanResult r = scan_grid(p, steady_point);
  r.extra_names = {"charge0"};
  return r;
}

ScanResult run_floquet_scan(const Protocol& p) {
  ScanResult r = scan_grid(p, floquet_point);
  r.extra_names = {"charge0"};
  if (p.model.variant == ModelVariant::SpinfulFermion) r.extra_names.push_back("max_sz_drift");
  return r;
}

ScanResult run_transport_scan(const Protocol& p) {
  ScanResult r = scan_grid(p, transport_point);
  r.extra_names = {"charge0", "window_lo", "window_hi"};
  return r;
}

void ScanResult::write_csv(std::ostream& os) const {
  for (const auto& n : param_names) os << n << ',';
  os << "L,mean_var_density,mean_var,mean_dN,stderr,n_samples,seed";
  for (const auto& n : extra_names) os << ',' << n;
  os << '\n';
  for (const auto& r : rows) {
    for (double v : r.params) os << num(v) << ',';
    os << r.L << ',' << num(r.mean_var_density) << ',' << num(r.mean_var) << ',' << num(r.mean_dN)
       << ',' << num(r.stderr_var) << ',' << r.n_samples << ',' << r.seed;
    for (double v : r.extra) os << ',' << num(v);
    os << '\n';
  }
}

const ScanRow& ScanResult::at(const std::vector<double>& params, int L) const {
  for (const auto& r : rows) {
    if (r.L != L || r.params.size() != params.size()) continue;
    bool same = true;
    for (std::size_t k = 0; k < params.size(); ++k)
      same = same && std::abs(r.params[k] - params[k]) < 1e-12;
    if (same) return r;
  }
  throw std::out_of_range("no scan row for the requested point");
}

// ---------------------------------------------------------------------------
// quench with energy tracking

QuenchSeries run_quench_energy(const Protocol& p) {
  p.validate();
  if (p.grid_size() != 1) throw ConfigError("quench protocol takes a single parameter point");
  const auto sizes = p.effective_sizes();
  if (sizes.size() != 1) throw ConfigError("quench protocol takes a single system size");
  const Protocol local = with_axis_values(p, p.grid_point(0));
  ModelSpec spec = local.model;
  spec.L = sizes.front();
  spec.validate();
  if (!spec.is_quadratic()) throw ConfigError("quench protocol needs a quadratic model");

  const int L = spec.L;
  const int modes = spec.modes();
  const int count = filling_count(modes, local.nu);
  const NambuMatrix h0 = build_nambu(spec, false);
  const NambuMatrix h = build_nambu(spec, true);
  const double switch_time = L;
  const double end_time = 2.0 * L;
  const Eigen::MatrixXcd step0 = NambuPropagator(h0).unitary(p.time_step);
  const Eigen::MatrixXcd step1 = NambuPropagator(h).unitary(p.time_step);

  std::vector<double> times;
  for (long k = 0;; ++k) {
    const double t = k * p.time_step;
    if (t > end_time + 1e-9) break;
    times.push_back(t);
  }

  QuenchSeries out;
  out.L = L;
  out.charge0 = count;
  out.switch_time = switch_time;
  out.points.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) out.points[k].t = times[k];

  std::vector<std::vector<QuenchPoint>> per_sample(static_cast<std::size_t>(p.samples));
  parallel_for(per_sample.size(), p.threads, [&](std::size_t i) {
    GaussianState s = product_state(random_occupation(modes, count, sample_seed(p.seed, 0, L, i)));
    auto& series = per_sample[i];
    series.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (k > 0) s = apply_unitary(s, times[k] <= switch_time + 1e-9 ? step0 : step1);
      const bool after = times[k] > switch_time + 1e-9;
      series[k] = {times[k], particle_number(s), charge_variance(s), energy(s, after ? h : h0)};
    }
  });
  for (const auto& series : per_sample)
    for (std::size_t k = 0; k < times.size(); ++k) {
      out.points[k].particle_number += series[k].particle_number / p.samples;
      out.points[k].charge_variance += series[k].charge_variance / p.samples;
      out.points[k].energy += series[k].energy / p.samples;
    }
  return out;
}

void QuenchSeries::write_csv(std::ostream& os) const {
  os << "t,N,var,E\n";
  for (const auto& q : points)
    os << num(q.t) << ',' << num(q.particle_number) << ',' << num(q.charge_variance) << ',' << num(q.energy)
       << '\n';
}

// ---------------------------------------------------------------------------
// phase diagram

PhaseDiagram run_phase_diagram(const Protocol& p) {
  if (p.axes.size() != 2) throw ConfigError("phase diagram needs exactly two swept parameters");
  PhaseDiagram out;
  out.x_name = p.axes[0].name;
  out.y_name = p.axes[1].name;
  out.threshold = p.threshold;
  out.raw = run_steady_scan(p);
  auto sizes = p.effective_sizes();
  std::sort(sizes.begin(), sizes.end());
  out.L_max = sizes.back();
  for (std::size_t g = 0; g < p.grid_size(); ++g) {
    const auto params = p.grid_point(g);
    const ScanRow& top = out.raw.at(params, out.L_max);
    PhaseCell cell;
    cell.x = params[0];
    cell.y = params[1];
    cell.density = top.mean_var_density;
    if (sizes.size() >= 2) {
      const ScanRow& prev = out.raw.at(params, sizes[sizes.size() - 2]);
      cell.growth_ratio = prev.mean_var > 0.0 ? top.mean_var / prev.mean_var : 0.0;
    }
    cell.frozen = cell.density < p.threshold;
    out.cells.push_back(cell);
  }
  return out;
}

nlohmann::json PhaseDiagram::to_json() const {
  nlohmann::json j;
  j["x"] = x_name;
  j["y"] = y_name;
  j["L_max"] = L_max;
  j["threshold"] = threshold;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) {
    j["cells"].push_back({{x_name, c.x},
                          {y_name, c.y},
                          {"var_density", c.density},
                          {"growth_ratio", c.growth_ratio},
                          {"label", c.frozen ? "frozen" : "fluctuating"}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// matrix-element criterion

CriterionResult run_criterion_scan(const Protocol& p) {
  p.validate();
  CriterionResult out;
  out.param_names = axis_names(p);
  const auto sizes = p.effective_sizes();
  for (std::size_t g = 0; g < p.grid_size(); ++g) {
    const auto params = p.grid_point(g);
    const Protocol local = with_axis_values(p, params);
    for (int L : sizes) {
      ModelSpec spec = local.model;
      spec.L = L;
      spec.validate();
      if (spec.variant == ModelVariant::Transport)
        throw ConfigError("criterion scan is defined for models with a pair or sigma^x boundary");
      const auto charges = all_charges(spec);
      const auto spectra = sector_spectra(spec, charges, p.dim_cap);
      PairQuery q;
      q.charge_steps = spec.is_spin() ? std::vector<double>{1.0, -1.0} : std::vector<double>{2.0};
      q.charge_tol = spec.is_spin() ? 0.005 : 1e-5;
      q.energy_tol = p.energy_tol.value_or(spec.is_spin() ? 0.3 : 0.1);
      q.max_pairs = p.max_pairs;
      q.seed = sample_seed(p.seed, g, static_cast<std::uint64_t>(L), 0);
      const auto pairs = find_pairs(spectra, q);
      const MatrixElements m = boundary_matrix_element(spectra, pairs, spec);
      CriterionRow row;
      row.params = params;
      row.L = L;
      row.mean_element = m.mean;
      row.n_pairs = pairs.size();
      row.n_candidates = count_pairs(spectra, q);
      row.energy_tol = q.energy_tol;
      out.rows.push_back(row);
    }
  }
  return out;
}

void CriterionResult::write_csv(std::ostream& os) const {
  for (const auto& n : param_names) os << n << ',';
  os << "L,mean_element,n_pairs,energy_tol\n";
  for (const auto& r : rows) {
    for (double v : r.params) os << num(v) << ',';
    os << r.L << ',' << num(r.mean_element) << ',' << r.n_pairs << ',' << num(r.energy_tol) << '\n';
  }
}

}  // namespace bcharge
