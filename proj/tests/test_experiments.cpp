#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bcharge/errors.hpp"
#include "bcharge/experiments.hpp"

using namespace bcharge;

namespace {

Protocol small(ModelVariant v, int L, int samples = 8) {
  Protocol p;
  p.model.variant = v;
  p.model.L = L;
  p.sizes = {L};
  p.samples = samples;
  p.seed = 5;
  return p;
}

bool identical(const ScanResult& a, const ScanResult& b) {
  std::ostringstream x;
  std::ostringstream y;
  a.write_csv(x);
  b.write_csv(y);
  if (x.str() != y.str()) return false;
  for (std::size_t r = 0; r < a.rows.size(); ++r)
    if (a.rows[r].sample_vars != b.rows[r].sample_vars) return false;
  return true;
}

}  // namespace

TEST_CASE("protocol grids") {
  Protocol p;
  p.axes = {{"mu0", {0.0, 1.0, 2.0}}, {"U", {4.0, 5.0}}};
  CHECK(p.grid_size() == 6);
  CHECK(p.grid_point(0) == std::vector<double>{0.0, 4.0});
  CHECK(p.grid_point(1) == std::vector<double>{0.0, 5.0});
  CHECK(p.grid_point(5) == std::vector<double>{2.0, 5.0});
  const Protocol q = with_axis_values(p, {1.0, 5.0});
  CHECK(q.model.mu0 == 1.0);
  CHECK(q.model.U == 5.0);
  p.axes.push_back({"nu", {0.25}});
  CHECK(with_axis_values(p, {0.0, 4.0, 0.25}).nu == 0.25);

  Protocol bad;
  bad.samples = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.samples = 1;
  bad.axes = {{"mu0", {}}};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.axes = {{"bogus", {1.0}}};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.axes.clear();
  bad.sizes = {3};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("CSV layout") {
  Protocol p = small(ModelVariant::FreeFermion, 8, 3);
  p.axes = {{"mu0", {0.0, 3.0}}};
  const auto r = run_steady_scan(p);
  std::ostringstream os;
  r.write_csv(os);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "mu0,L,mean_var_density,mean_var,mean_dN,stderr,n_samples,seed,charge0");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 2);
}

TEST_CASE("reruns and thread counts give identical results") {
  Protocol p = small(ModelVariant::FreeFermion, 12, 16);
  p.axes = {{"mu0", {0.0, 2.5}}};
  const auto a = run_steady_scan(p);
  const auto b = run_steady_scan(p);
  p.threads = 3;
  const auto c = run_steady_scan(p);
  CHECK(identical(a, b));
  CHECK(identical(a, c));

  Protocol e = small(ModelVariant::InteractingFermion, 6, 6);
  e.model.U = 1.0;
  const auto x = run_steady_scan(e);
  e.threads = 4;
  CHECK(identical(x, run_steady_scan(e)));
  p.seed = 6;
  p.threads = 1;
  CHECK_FALSE(identical(a, run_steady_scan(p)));
}

TEST_CASE("Delta = 0 gives exactly zero variance for every model") {
  for (auto v : {ModelVariant::FreeFermion, ModelVariant::InteractingFermion, ModelVariant::XXZSpin,
                 ModelVariant::SpinfulFermion, ModelVariant::Transport}) {
    Protocol p = small(v, v == ModelVariant::SpinfulFermion ? 4 : 8, 5);
    p.model.Delta = 0.0;
    p.model.U = 1.0;
    const ScanResult r = v == ModelVariant::Transport ? run_transport_scan(p) : run_steady_scan(p);
    CHECK(r.rows.front().mean_var < 1e-12);
    if (p.model.is_quadratic()) {
      CHECK(run_floquet_scan(p).rows.front().mean_var < 1e-12);
    }
  }
}

TEST_CASE("standard error is the sample standard deviation over sqrt(n)") {
  Protocol p = small(ModelVariant::FreeFermion, 16, 40);
  p.model.mu0 = 1.0;
  const auto row = run_steady_scan(p).rows.front();
  REQUIRE(row.sample_vars.size() == 40);
  double mean = 0.0;
  for (double v : row.sample_vars) mean += v / 40.0;
  double ss = 0.0;
  for (double v : row.sample_vars) ss += (v - mean) * (v - mean);
  CHECK(row.mean_var == doctest::Approx(mean));
  CHECK(row.stderr_var == doctest::Approx(std::sqrt(ss / 39.0) / std::sqrt(40.0)));
  CHECK(row.mean_var_density == doctest::Approx(mean / 16.0));
}

TEST_CASE("standard error shrinks like 1/sqrt(n)") {
  Protocol p = small(ModelVariant::FreeFermion, 24, 200);
  p.model.mu0 = 1.0;
  const double se1 = run_steady_scan(p).rows.front().stderr_var;
  p.samples = 800;
  const double se4 = run_steady_scan(p).rows.front().stderr_var;
  // Expect 1/2 for four times the samples; sample noise allows some slack.
  CHECK(se4 / se1 > 0.35);
  CHECK(se4 / se1 < 0.7);
}

TEST_CASE("Gaussian and exact engines agree sample by sample") {
  for (auto v : {ModelVariant::FreeFermion, ModelVariant::Transport}) {
    Protocol p = small(v, 8, 10);
    p.model.mu0 = 0.6;
    p.model.mur = 0.5;
    p.axes = {{v == ModelVariant::Transport ? "mur" : "mu0", {0.0, 1.1}}};
    p.engine = Engine::Gaussian;
    const auto g = v == ModelVariant::Transport ? run_transport_scan(p) : run_steady_scan(p);
    p.engine = Engine::ED;
    const auto e = v == ModelVariant::Transport ? run_transport_scan(p) : run_steady_scan(p);
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(g.rows[r].sample_vars[i] - e.rows[r].sample_vars[i]) < 1e-8);
      CHECK(std::abs(g.rows[r].mean_dN - e.rows[r].mean_dN) < 1e-8);
    }
  }
  Protocol f = small(ModelVariant::FreeFermion, 8, 6);
  f.model.mu0 = 1.5;
  f.engine = Engine::Gaussian;
  const auto gf = run_floquet_scan(f);
  f.engine = Engine::ED;
  const auto ef = run_floquet_scan(f);
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(gf.rows[0].sample_vars[i] - ef.rows[0].sample_vars[i]) < 1e-8);

  Protocol s = small(ModelVariant::SpinfulFermion, 4, 6);
  s.engine = Engine::Gaussian;
  const auto gs = run_floquet_scan(s);
  s.engine = Engine::ED;
  const auto es = run_floquet_scan(s);
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(gs.rows[0].sample_vars[i] - es.rows[0].sample_vars[i]) < 1e-8);
  CHECK(gs.rows[0].extra.at(1) < 1e-9);
  CHECK(es.rows[0].extra.at(1) < 1e-9);

  Protocol bad = small(ModelVariant::XXZSpin, 8);
  bad.engine = Engine::Gaussian;
  CHECK_THROWS_AS(run_steady_scan(bad), ConfigError);
}

TEST_CASE("Floquet details") {
  Protocol p = small(ModelVariant::FreeFermion, 10, 4);
  p.periods = 0;
  CHECK(run_floquet_scan(p).rows.front().mean_var == 0.0);
  p.periods.reset();
  p.model.variant = ModelVariant::XXZSpin;
  CHECK_THROWS_AS(run_floquet_scan(p), ConfigError);

  const auto occ = spinful_balanced_occupation(10, 5, 77);
  int up = 0;
  int down = 0;
  for (int j = 0; j < 10; ++j) {
    up += occ[2 * j];
    down += occ[2 * j + 1];
  }
  CHECK(up == 5);
  CHECK(down == 5);
}

TEST_CASE("transport window and frozen side") {
  Protocol p = small(ModelVariant::Transport, 32, 20);
  p.model.tl = p.model.tr = 1.0;
  p.model.mul = -2.0;
  p.nu_left = 0.5;
  p.nu_right = 0.25;
  p.axes = {{"mur", {-7.0, 0.0, 3.0}}};
  const auto r = run_transport_scan(p);
  CHECK(r.extra_names == std::vector<std::string>{"charge0", "window_lo", "window_hi"});
  CHECK(r.rows[0].extra[1] == -6.0);
  CHECK(r.rows[0].extra[2] == 2.0);
  CHECK(r.rows[0].extra[0] == 4.0);
  CHECK(r.rows[1].mean_var > 5.0 * r.rows[0].mean_var);
  CHECK(r.rows[1].mean_var > 5.0 * r.rows[2].mean_var);
  p.model.Delta = 0.0;
  CHECK(run_transport_scan(p).rows[1].mean_var < 1e-12);
  p.model.variant = ModelVariant::FreeFermion;
  CHECK_THROWS_AS(run_transport_scan(p), ConfigError);
}

TEST_CASE("quench with energy tracking") {
  for (double mu : {-0.96, -2.2}) {
    Protocol p = small(ModelVariant::FreeFermion, 100, 4);
    p.model.mu0 = mu;
    p.time_step = 5.0;
    const QuenchSeries q = run_quench_energy(p);
    CHECK(q.points.size() == 41);
    CHECK(q.switch_time == 100.0);
    const double e0 = q.points.front().energy;
    double drift = 0.0;
    for (const auto& pt : q.points) drift = std::max(drift, std::abs(pt.energy - e0));
    // <H_B> vanishes on number-conserving states, so E does not jump at the switch.
    CHECK(drift < 1e-8);
    const auto& last = q.points.back();
    CHECK(std::abs(last.particle_number - 50.0) < 1.0);
    if (mu == -2.2) {
      CHECK(last.charge_variance < 1.0);
    } else {
      CHECK(last.charge_variance > 0.05 * 100);
    }
    for (const auto& pt : q.points)
      if (pt.t <= 100.0) CHECK(pt.charge_variance < 1e-12);
  }
  // Away from half filling the mean charge itself moves by an O(L) amount.
  Protocol p = small(ModelVariant::FreeFermion, 100, 2);
  p.model.mu0 = -0.96;
  p.nu = 0.25;
  p.time_step = 50.0;
  const QuenchSeries q = run_quench_energy(p);
  CHECK(q.points.back().particle_number - q.charge0 > 0.05 * 100);
  Protocol two = p;
  two.sizes = {50, 100};
  CHECK_THROWS_AS(run_quench_energy(two), ConfigError);
  std::ostringstream os;
  q.write_csv(os);
  CHECK(os.str().rfind("t,N,var,E\n", 0) == 0);
}

TEST_CASE("phase diagram labels") {
  Protocol p = small(ModelVariant::InteractingFermion, 10, 12);
  p.sizes = {8, 10};
  p.axes = {{"mu0", {2.0, 8.0}}, {"U", {2.0}}};
  const PhaseDiagram d = run_phase_diagram(p);
  REQUIRE(d.cells.size() == 2);
  CHECK(d.L_max == 10);
  CHECK_FALSE(d.cells[0].frozen);
  CHECK(d.cells[1].frozen);
  CHECK(d.cells[0].density == doctest::Approx(d.raw.at({2.0, 2.0}, 10).mean_var_density));
  CHECK(d.cells[0].growth_ratio > 0.0);
  const auto j = d.to_json();
  CHECK(j["cells"][0]["label"] == "fluctuating");
  CHECK(j["cells"][1]["label"] == "frozen");
  CHECK(j["x"] == "mu0");

  Protocol s = small(ModelVariant::XXZSpin, 10, 12);
  s.axes = {{"h", {0.0, 7.0}}, {"Jz", {1.0}}};
  const PhaseDiagram ds = run_phase_diagram(s);
  CHECK_FALSE(ds.cells[0].frozen);
  CHECK(ds.cells[1].frozen);

  s.axes.pop_back();
  CHECK_THROWS_AS(run_phase_diagram(s), ConfigError);
}

TEST_CASE("criterion scan") {
  Protocol p = small(ModelVariant::InteractingFermion, 8, 1);
  p.model.U = 2.0;
  p.axes = {{"mu0", {2.0, 8.0}}};
  p.max_pairs = 200;
  const auto r = run_criterion_scan(p);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].energy_tol == 0.1);
  CHECK(r.rows[0].n_pairs <= 200);
  CHECK(r.rows[0].n_pairs == std::min<std::size_t>(200, r.rows[0].n_candidates));
  CHECK(r.rows[0].mean_element > 10 * r.rows[1].mean_element);
  std::ostringstream os;
  r.write_csv(os);
  CHECK(os.str().rfind("mu0,L,mean_element,n_pairs,energy_tol\n", 0) == 0);
}

TEST_CASE("dimension cap surfaces as CapExceeded") {
  Protocol p = small(ModelVariant::XXZSpin, 10, 1);
  p.dim_cap = 100;
  CHECK_THROWS_AS(run_steady_scan(p), CapExceeded);
}

TEST_CASE("parallel_for covers every index and propagates errors") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
  CHECK_THROWS_AS(parallel_for(50, 3,
                               [](std::size_t i) {
                                 if (i == 17) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
