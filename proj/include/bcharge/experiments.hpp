#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bcharge/models.hpp"
#include "bcharge/sector_basis.hpp"

namespace bcharge {

enum class ProtocolKind { SteadyScan, QuenchEnergy, FloquetScan, TransportScan, PhaseDiagram, CriterionScan };
enum class Engine { Auto, Gaussian, ED };

std::string_view to_string(Engine e);
Engine parse_engine(std::string_view name);

/// One swept parameter: a model key (mu0, U, h, Jz, mur, ...) or a filling
/// (nu, nul, nur).
struct Axis {
  std::string name;
  std::vector<double> values;
};

struct Protocol {
  ProtocolKind kind = ProtocolKind::SteadyScan;
  ModelSpec model;
  /// Cartesian product, first axis varies slowest.
  std::vector<Axis> axes;
  /// System sizes; empty means {model.L}.
  std::vector<int> sizes;
  double nu = 0.5;
  double nu_left = 0.5;
  double nu_right = 0.25;
  int samples = 200;
  std::uint64_t seed = 0;
  Engine engine = Engine::Auto;
  int threads = 1;
  /// Hamiltonian protocols measure at t = 2L unless overridden.
  std::optional<double> measure_time;
  /// Floquet protocols apply L periods unless overridden.
  std::optional<int> periods;
  /// Sampling interval of the quench time series.
  double time_step = 1.0;
  /// Phase diagram: frozen iff var/L < threshold at the largest L.
  double threshold = 0.01;
  /// Criterion scan: defaults to 0.1 (fermions) / 0.3 (spins).
  std::optional<double> energy_tol;
  std::size_t max_pairs = 1000;
  std::size_t dim_cap = kDefaultDimCap;

  void validate() const;
  std::vector<int> effective_sizes() const;
  std::size_t grid_size() const;
  /// Axis values of flattened grid point g.
  std::vector<double> grid_point(std::size_t g) const;
};

/// Applies axis values to a copy of the protocol (model couplings or fillings).
Protocol with_axis_values(const Protocol& p, const std::vector<double>& values);

struct ScanRow {
  std::vector<double> params;
  int L = 0;
  double mean_var_density = 0.0;
  double mean_var = 0.0;
  double mean_dN = 0.0;
  double stderr_var = 0.0;
  int n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> extra;
  /// Per-sample variances, in sample order.
  std::vector<double> sample_vars;
};

struct ScanResult {
  std::vector<std::string> param_names;
  std::vector<std::string> extra_names;
  std::vector<ScanRow> rows;

  /// Header: params..., L, mean_var_density, mean_var, mean_dN, stderr,
  /// n_samples, seed, extras...
  void write_csv(std::ostream& os) const;
  const ScanRow& at(const std::vector<double>& params, int L) const;
};

ScanResult run_steady_scan(const Protocol& p);
ScanResult run_floquet_scan(const Protocol& p);
ScanResult run_transport_scan(const Protocol& p);

struct QuenchPoint {
  double t = 0.0;
  double particle_number = 0.0;
  double charge_variance = 0.0;
  double energy = 0.0;
};

struct QuenchSeries {
  int L = 0;
  int charge0 = 0;
  double switch_time = 0.0;
  std::vector<QuenchPoint> points;

  void write_csv(std::ostream& os) const;
};

/// Evolve with H0 on [0, L], then with H0 + H_B on [L, 2L]; E(t) uses the
/// generator of the current segment. <N>, var N and E are sample averages.
QuenchSeries run_quench_energy(const Protocol& p);

struct PhaseCell {
  double x = 0.0;
  double y = 0.0;
  double density = 0.0;       // var / L at the largest L
  double growth_ratio = 0.0;  // var(L_max) / var(next smaller L), 0 if unavailable
  bool frozen = false;
};

struct PhaseDiagram {
  std::string x_name;
  std::string y_name;
  int L_max = 0;
  double threshold = 0.0;
  std::vector<PhaseCell> cells;
  ScanResult raw;

  nlohmann::json to_json() const;
};

PhaseDiagram run_phase_diagram(const Protocol& p);

struct CriterionRow {
  std::vector<double> params;
  int L = 0;
  double mean_element = 0.0;
  std::size_t n_pairs = 0;
  std::size_t n_candidates = 0;
  double energy_tol = 0.0;
};

struct CriterionResult {
  std::vector<std::string> param_names;
  std::vector<CriterionRow> rows;

  /// Header: params..., L, mean_element, n_pairs, energy_tol
  void write_csv(std::ostream& os) const;
};

CriterionResult run_criterion_scan(const Protocol& p);

/// Initial product state of the spinful chain with Sz = 0: `per_species`
/// up electrons and as many down electrons, each species placed uniformly at
/// random and independently of the other.
std::vector<std::uint8_t> spinful_balanced_occupation(int sites, int per_species, std::uint64_t seed);

/// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first
/// exception. Result placement is the caller's job (index by i).
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace bcharge
