#include "bcharge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "bcharge/config.hpp"
#include "bcharge/errors.hpp"
#include "bcharge/experiments.hpp"
#include "bcharge/selftest.hpp"

namespace bcharge {

namespace {

double to_double(std::string_view s) {
  const std::string str(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + str + "'");
  }
  if (used != str.size() || !std::isfinite(v)) throw ConfigError("not a number: '" + str + "'");
  return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  if (text.empty()) throw ConfigError("empty grid");
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("range must be start:stop:step");
    const double start = to_double(parts[0]);
    const double stop = to_double(parts[1]);
    const double step = to_double(parts[2]);
    if (step == 0.0 || (stop - start) * step < 0.0) throw ConfigError("range step has the wrong sign");
    const double span = (stop - start) / step;
    const auto n = static_cast<long>(std::floor(span + 0.5 + 1e-9)) + 1;
    if (n > 1000000) throw ConfigError("range has too many points");
    std::vector<double> out;
    for (long k = 0; k < n; ++k) out.push_back(start + static_cast<double>(k) * step);
    return out;
  }
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(to_double(p));
  return out;
}

namespace {

// Swept or fixed parameters, in the order they become grid axes.
const std::vector<std::string>& parameter_keys() {
  static const std::vector<std::string> k{"mu0", "U",  "h",  "Jz",  "Jperp", "t0", "Delta",
                                          "tl",  "tr", "mul", "mur", "nu",   "nul", "nur"};
  return k;
}

struct Options {
  std::map<std::string, std::string> params;  // key -> grid text
  std::string model;
  std::string sizes;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::string engine;
  std::optional<int> threads;
  std::string out_path;
  std::string raw_path;
  std::string config_path;
  std::optional<double> energy_tol;
  std::optional<std::size_t> pairs;
  std::optional<double> theta;
  std::optional<double> time;
  std::optional<int> periods;
  std::optional<double> dt;
  std::optional<std::size_t> cap;
  std::optional<bool> open;
  std::optional<bool> no_boundary;
  bool verbose = false;
};

void add_common(CLI::App& sub, Options& o) {
  sub.add_option("--model", o.model, "free|interacting|xxz|spinful|transport");
  sub.add_option("--L", o.sizes, "system size(s): value, list or start:stop:step");
  for (const auto& k : parameter_keys()) {
    auto* opt = sub.add_option_function<std::string>(
        "--" + k, [&o, k](const std::string& v) { o.params[k] = v; }, k + " value, list or range");
    opt->type_name("GRID");
  }
  sub.add_option("--samples", o.samples, "random initial states per point")->check(CLI::PositiveNumber);
  sub.add_option("--seed", o.seed, "master seed");
  sub.add_option("--engine", o.engine, "auto|gaussian|ed");
  sub.add_option("--threads", o.threads, "worker threads (default: $BOUNDARY_CHARGE_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  sub.add_option("--out", o.out_path, "output file (default: stdout)");
  sub.add_option("--config", o.config_path, "JSON config; command-line flags take precedence");
  sub.add_option("--time", o.time, "measurement time (default 2L)");
  sub.add_option("--cap", o.cap, "largest allowed sector dimension");
  sub.add_flag("--open", o.open, "open instead of periodic boundary conditions");
  sub.add_flag("--no-boundary", o.no_boundary, "switch the boundary term off");
  sub.add_flag("--verbose,-v", o.verbose, "progress on stderr");
}

std::string json_to_grid_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError("grid lists must hold numbers");
      s += (s.empty() ? "" : ",") + e.dump();
    }
    return s;
  }
  throw ConfigError("unsupported config value " + v.dump());
}

// Fills unset options from the config file; flags already given win.
void merge_config(Options& o) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in) throw std::ios_base::failure("cannot read config " + o.config_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const auto& keys = parameter_keys();
  for (const auto& [key, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) != keys.end()) {
      o.params.try_emplace(key, json_to_grid_text(v));
    } else if (key == "model") {
      if (o.model.empty()) o.model = v.get<std::string>();
    } else if (key == "L") {
      if (o.sizes.empty()) o.sizes = json_to_grid_text(v);
    } else if (key == "samples") {
      if (!o.samples) o.samples = v.get<int>();
    } else if (key == "seed") {
      if (!o.seed) o.seed = v.get<std::uint64_t>();
    } else if (key == "engine") {
      if (o.engine.empty()) o.engine = v.get<std::string>();
    } else if (key == "threads") {
      if (!o.threads) o.threads = v.get<int>();
    } else if (key == "time") {
      if (!o.time) o.time = v.get<double>();
    } else if (key == "periods") {
      if (!o.periods) o.periods = v.get<int>();
    } else if (key == "dt") {
      if (!o.dt) o.dt = v.get<double>();
    } else if (key == "energy_tol") {
      if (!o.energy_tol) o.energy_tol = v.get<double>();
    } else if (key == "pairs") {
      if (!o.pairs) o.pairs = v.get<std::size_t>();
    } else if (key == "theta") {
      if (!o.theta) o.theta = v.get<double>();
    } else if (key == "cap") {
      if (!o.cap) o.cap = v.get<std::size_t>();
    } else if (key == "periodic") {
      if (!o.open) o.open = !v.get<bool>();
    } else if (key == "boundary_on") {
      if (!o.no_boundary) o.no_boundary = !v.get<bool>();
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

Protocol build_protocol(ProtocolKind kind, Options& o, std::string_view default_model) {
  merge_config(o);
  Protocol p;
  p.kind = kind;
  apply_model_key(p.model, "model", o.model.empty() ? default_model : std::string_view(o.model));
  if (!o.sizes.empty()) {
    for (double v : parse_grid(o.sizes)) {
      if (v != std::round(v)) throw ConfigError("L must be an integer");
      p.sizes.push_back(static_cast<int>(v));
    }
    p.model.L = p.sizes.front();
  }
  if (o.open) p.model.periodic = !*o.open;
  if (o.no_boundary) p.model.boundary_on = !*o.no_boundary;

  for (const auto& key : parameter_keys()) {
    const auto it = o.params.find(key);
    if (it == o.params.end()) continue;
    const auto values = parse_grid(it->second);
    // Explicit single values still become one-point axes so that output rows
    // name them, except in the phase diagram, whose two axes are the swept ones.
    if (values.size() > 1 || kind != ProtocolKind::PhaseDiagram) p.axes.push_back({key, values});
    if (values.size() > 1) {
      continue;
    } else if (key == "nu") {
      p.nu = values.front();
    } else if (key == "nul") {
      p.nu_left = values.front();
    } else if (key == "nur") {
      p.nu_right = values.front();
    } else {
      p.model.set(key, values.front());
    }
  }
  if (!o.engine.empty()) p.engine = parse_engine(o.engine);
  p.seed = o.seed.value_or(0);
  if (o.threads) {
    p.threads = *o.threads;
  } else if (const char* env = std::getenv("BOUNDARY_CHARGE_THREADS")) {
    p.threads = static_cast<int>(to_double(env));
  }
  const bool exact = p.engine == Engine::ED || (p.engine == Engine::Auto && !p.model.is_quadratic());
  p.samples = o.samples.value_or(exact ? 50 : 200);
  p.measure_time = o.time;
  p.periods = o.periods;
  if (o.dt) p.time_step = *o.dt;
  if (o.theta) p.threshold = *o.theta;
  p.energy_tol = o.energy_tol;
  if (o.pairs) p.max_pairs = *o.pairs;
  if (o.cap) p.dim_cap = *o.cap;
  p.validate();
  return p;
}

// Writes to the --out file or to `out`; a file is written whole or not at all.
template <typename Writer>
void emit(const Options& o, std::ostream& out, Writer&& write) {
  if (o.out_path.empty()) {
    write(out);
    return;
  }
  std::ostringstream buffer;
  write(buffer);
  std::ofstream file(o.out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::ios_base::failure("cannot write " + o.out_path);
  file << buffer.str();
  if (!file) throw std::ios_base::failure("cannot write " + o.out_path);
}

void describe(const Options& o, const Protocol& p, std::ostream& err) {
  if (!o.verbose) return;
  err << "model=" << to_string(p.model.variant) << " engine=" << to_string(p.engine)
      << " grid=" << p.grid_size() << " sizes=" << p.effective_sizes().size()
      << " samples=" << p.samples << " threads=" << p.threads << " seed=" << p.seed << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boundary-induced charge fluctuations in 1D chains"};
  app.require_subcommand(1);
  // "-h" would collide with the field option --h.
  app.set_help_flag("--help", "print this help message and exit");
  app.set_help_all_flag("--help-all");

  Options o;
  struct Command {
    CLI::App* app;
    ProtocolKind kind;
    std::string_view default_model;
  };
  std::vector<Command> commands = {
      {app.add_subcommand("scan", "steady-state charge variance after t = 2L"), ProtocolKind::SteadyScan, "free"},
      {app.add_subcommand("quench", "energy and particle number across a boundary switch-on"),
       ProtocolKind::QuenchEnergy, "free"},
      {app.add_subcommand("floquet", "stroboscopic drive, L periods"), ProtocolKind::FloquetScan, "free"},
      {app.add_subcommand("transport", "right-half charge variance of two coupled half-chains"),
       ProtocolKind::TransportScan, "transport"},
      {app.add_subcommand("phase-diagram", "frozen/fluctuating labels on a 2D grid (JSON)"),
       ProtocolKind::PhaseDiagram, "interacting"},
      {app.add_subcommand("criterion", "mean boundary matrix element between near-degenerate sectors"),
       ProtocolKind::CriterionScan, "interacting"},
  };
  for (auto& c : commands) add_common(*c.app, o);
  commands[1].app->add_option("--dt", o.dt, "sampling interval of the time series");
  commands[2].app->add_option("--periods", o.periods, "number of drive periods (default L)");
  commands[4].app->add_option("--theta", o.theta, "frozen iff var/L < theta at the largest L");
  commands[4].app->add_option("--raw", o.raw_path, "also write the raw scan as CSV");
  commands[5].app->add_option("--energy-tol", o.energy_tol, "degeneracy window");
  commands[5].app->add_option("--pairs", o.pairs, "pairs to average over (0 = all)");
  std::uint64_t selftest_seed = 20240611;
  auto* selftest = app.add_subcommand("selftest", "oracle cross-checks on small systems");
  selftest->add_option("--seed", selftest_seed, "seed of the random cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (selftest->parsed()) {
      return report_selftest(run_selftest(selftest_seed), out) ? kExitOk : kExitSelftestFailed;
    }
    for (auto& c : commands) {
      if (!c.app->parsed()) continue;
      Protocol p = build_protocol(c.kind, o, c.default_model);
      describe(o, p, err);
      switch (c.kind) {
        case ProtocolKind::SteadyScan: {
          const auto r = run_steady_scan(p);
          emit(o, out, [&](std::ostream& os) { r.write_csv(os); });
          break;
        }
        case ProtocolKind::FloquetScan: {
          const auto r = run_floquet_scan(p);
          emit(o, out, [&](std::ostream& os) { r.write_csv(os); });
          break;
        }
        case ProtocolKind::TransportScan: {
          const auto r = run_transport_scan(p);
          emit(o, out, [&](std::ostream& os) { r.write_csv(os); });
          break;
        }
        case ProtocolKind::QuenchEnergy: {
          const auto r = run_quench_energy(p);
          emit(o, out, [&](std::ostream& os) { r.write_csv(os); });
          break;
        }
        case ProtocolKind::PhaseDiagram: {
          const auto r = run_phase_diagram(p);
          emit(o, out, [&](std::ostream& os) { os << r.to_json().dump(2) << '\n'; });
          if (!o.raw_path.empty()) {
            Options raw = o;
            raw.out_path = o.raw_path;
            emit(raw, out, [&](std::ostream& os) { r.raw.write_csv(os); });
          }
          break;
        }
        case ProtocolKind::CriterionScan: {
          const auto r = run_criterion_scan(p);
          emit(o, out, [&](std::ostream& os) { r.write_csv(os); });
          break;
        }
      }
      return kExitOk;
    }
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitCapExceeded;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace bcharge
