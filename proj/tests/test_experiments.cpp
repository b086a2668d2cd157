// Copyright 2026 The readout-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "readout/experiments.hpp"

using namespace readout;

namespace {

// fast scenario for unit-level runs
Scenario small_scenario() {
  Scenario sc;
  sc.n_fock = 4;
  sc.integrator.grid.n_points = 60;
  sc.integrator.grid.t_max = 60.0;
  return sc;
}

}  // namespace

TEST_CASE("parallel_for runs every index exactly once and rethrows") {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);

  CHECK_THROWS_AS(parallel_for(8, 3,
                               [&](std::size_t i) {
                                 if (i == 5) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("analytic curves: ordering in cooperativity and asymptote") {
  const auto rows = run_fig2({0.4, 4.0, 40.0}, 400.0, 200);
  REQUIRE(rows.size() == 600);

  // group by c
  auto ps_at = [&](double c, std::size_t i) { return rows[static_cast<std::size_t>(
      (c == 0.4 ? 0 : c == 4.0 ? 1 : 2) * 200) + i].ps; };

  for (std::size_t i = 0; i < 200; ++i) {
    CHECK(ps_at(40.0, i) >= ps_at(4.0, i) - 1e-12);
    CHECK(ps_at(4.0, i) >= ps_at(0.4, i) - 1e-12);
  }
  // non-decreasing up to ripple plateaus
  for (double c : {0.4, 4.0, 40.0}) {
    for (std::size_t i = 1; i < 200; ++i)
      CHECK(ps_at(c, i) >= ps_at(c, i - 1) - 1e-3);
    CHECK(ps_at(c, 199) > 0.999);
  }
  // spot value: strong coupling, 20 expected photons
  const auto strong = run_fig2({40.0}, 20.0, 2);
  CHECK(strong.back().ps >= 0.99);
}

TEST_CASE("eta sweep reuses trajectories without changing the answer") {
  Scenario sc = small_scenario();
  sc.model = ModelKind::four_level;
  const std::vector<double> etas = {0.0, 0.01, 0.025, 0.05};
  const SweepResult fast = run_fig4(etas, sc);

  // brute force: full pair run per eta
  for (std::size_t i = 0; i < etas.size(); ++i) {
    Scenario per = sc;
    per.params.eta = etas[i];
    const PairResult pr = run_model_pair(per);
    CHECK(fast.rows[i].ps_opt == pr.curve.ps_opt);
    CHECK(fast.rows[i].t_opt == pr.curve.t_opt);
    CHECK(fast.rows[i].m_opt == pr.curve.m_opt);
  }
  CHECK(fast.rows[0].ps_opt == 0.5);  // eta = 0 collects nothing
}

TEST_CASE("pipeline is deterministic across repeated runs and thread counts") {
  Scenario sc = small_scenario();
  sc.threads = 1;
  const PairResult a = run_model_pair(sc);
  sc.threads = 2;
  const PairResult b = run_model_pair(sc);
  CHECK(a.curve.ps_opt == b.curve.ps_opt);  // bit identical
  CHECK(a.curve.t_opt == b.curve.t_opt);
  for (std::size_t i = 0; i < a.curve.ps.size(); ++i)
    CHECK(a.curve.ps[i] == b.curve.ps[i]);
}

TEST_CASE("csv output round-trips the success probability") {
  Scenario sc = small_scenario();
  const PairResult pr = run_model_pair(sc);

  const std::string path = "test_experiments_roundtrip.csv";
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < pr.curve.times.size(); ++i)
    rows.push_back({pr.curve.times[i], sc.params.eta * pr.traj0.accumulated[i],
                    sc.params.eta * pr.traj1.accumulated[i],
                    static_cast<double>(pr.curve.thresholds[i]), pr.curve.ps[i]});
  write_csv(path, {"roundtrip fixture"}, {"t_ns", "n0", "n1", "m", "ps"}, rows);

  std::ifstream f(path);
  REQUIRE(f.good());
  std::string line;
  std::getline(f, line);
  CHECK(line == "# roundtrip fixture");
  std::getline(f, line);
  CHECK(line == "t_ns,n0,n1,m,ps");
  std::size_t i = 0;
  double worst = 0.0;
  while (std::getline(f, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double t, n0, n1, m, ps;
    is >> t >> n0 >> n1 >> m >> ps;
    // recompute from the emitted counts alone
    const double ps_re = success_probability({n0, n1});
    worst = std::max(worst, std::fabs(ps_re - ps));
    if (n1 > n0 && n0 > 0.0)
      CHECK(optimal_threshold({n0, n1}) == static_cast<int>(m));
    ++i;
  }
  CHECK(i == pr.curve.times.size());
  // limited by the 12-significant-digit column format
  CHECK(worst <= 1e-10);
  std::remove(path.c_str());
}

TEST_CASE("in-memory success probabilities recompute exactly from the counts") {
  Scenario sc = small_scenario();
  const PairResult pr = run_model_pair(sc);
  for (std::size_t i = 0; i < pr.curve.times.size(); ++i) {
    const double ps = success_probability({sc.params.eta * pr.traj0.accumulated[i],
                                           sc.params.eta * pr.traj1.accumulated[i]});
    CHECK(std::fabs(ps - pr.curve.ps[i]) <= 1e-15);
  }
}

TEST_CASE("diffusion preset: delta limit equals the baseline exactly") {
  Scenario sc = small_scenario();
  sc.params.eta = 0.025;
  const SweepResult sr = run_fig5_diffusion({0.0}, sc);
  Scenario base = sc;
  base.params.gamma_d_ghz = 0.0;
  const PairResult pr = run_model_pair(base);
  CHECK(sr.rows[0].ps_opt == pr.curve.ps_opt);
  CHECK(sr.rows[0].t_opt == pr.curve.t_opt);
}

TEST_CASE("diffusion sign flip is NOT a symmetry of the split model") {
  // the excited detunings (d, d - dz) reflect onto (-d, -d - dz), a
  // different system; the diffusion preset must therefore run every node
  // rather than folding +-d pairs. The asymmetry is small (of order d/dz)
  // but resolvable.
  Scenario plus = small_scenario();
  plus.params.delta_omega_ghz = 2.2;
  Scenario minus = plus;
  minus.params.delta_omega_ghz = -2.2;
  const PairResult a = run_model_pair(plus);
  const PairResult b = run_model_pair(minus);
  const double rel = std::fabs(a.traj1.accumulated.back() -
                               b.traj1.accumulated.back()) /
                     b.traj1.accumulated.back();
  CHECK(rel > 1e-6);  // a genuine, resolvable difference
  CHECK(rel < 0.2);

  // and the executed node set covers both signs
  Scenario sc = small_scenario();
  sc.diffusion.n_nodes = 5;
  std::vector<DiffusionNodeRow> detail;
  std::vector<PairResult> curves;
  run_fig5_diffusion({1.0}, sc, &detail, &curves);
  REQUIRE(detail.size() == 5);
  double min_dw = 0.0, max_dw = 0.0, wsum = 0.0;
  for (const auto& d : detail) {
    min_dw = std::min(min_dw, d.delta_omega);
    max_dw = std::max(max_dw, d.delta_omega);
    wsum += d.weight;
  }
  CHECK(min_dw < -0.1);
  CHECK(max_dw > 0.1);
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("diffusion averaging happens before maximizing") {
  // two nodes with optima at different T: the average of the maxima is an
  // upper bound that the (correct) max-of-average must not exceed
  Scenario sc = small_scenario();
  sc.params.eta = 0.025;
  sc.diffusion.n_nodes = 5;
  std::vector<DiffusionNodeRow> detail;
  std::vector<PairResult> curves;
  const SweepResult sr = run_fig5_diffusion({2.0}, sc, &detail, &curves);
  REQUIRE(!detail.empty());
  REQUIRE(detail.size() == curves.size());

  double avg_of_max = 0.0;
  std::vector<double> ps_bar(curves.front().curve.ps.size(), 0.0);
  double wsum = 0.0;
  for (std::size_t n = 0; n < detail.size(); ++n) {
    avg_of_max += detail[n].weight * curves[n].curve.ps_opt;
    wsum += detail[n].weight;
    for (std::size_t i = 0; i < ps_bar.size(); ++i)
      ps_bar[i] += detail[n].weight * curves[n].curve.ps[i];
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));
  const double max_of_avg = *std::max_element(ps_bar.begin(), ps_bar.end());
  CHECK(sr.rows[0].ps_opt == doctest::Approx(max_of_avg).epsilon(1e-12));
  CHECK(sr.rows[0].ps_opt <= avg_of_max + 1e-12);
}

TEST_CASE("generic sweep dispatch and whitelist") {
  Scenario sc = small_scenario();
  sc.sweep = SweepSpec{"gamma_d", {0.0, 1.0}};
  const SweepResult sr = run_sweep(sc);
  CHECK(sr.parameter == "gamma_d");
  REQUIRE(sr.rows.size() == 2);
  CHECK(sr.rows[0].ps_opt >= sr.rows[1].ps_opt);  // dephasing hurts

  sc.sweep = SweepSpec{"bogus", {1.0}};
  CHECK_THROWS_AS(run_sweep(sc), std::invalid_argument);

  Scenario an;
  an.model = ModelKind::analytic;
  an.sweep = SweepSpec{"cooperativity", {0.4, 4.0, 40.0}};
  an.eta_T_nin_max = 20.0;
  const SweepResult ar = run_sweep(an);
  CHECK(ar.rows[2].ps_opt > ar.rows[0].ps_opt);

  an.sweep = SweepSpec{"eta", {0.01}};
  CHECK_THROWS_AS(run_sweep(an), std::invalid_argument);
}

TEST_CASE("spectral auto-selection kicks in for strongly detuned systems") {
  Scenario sc;
  sc.model = ModelKind::four_level;
  sc.params.delta_z_ghz = 100.0;
  CHECK_FALSE(prefer_spectral(sc));
  sc.params.delta_z_ghz = 500.0;
  CHECK(prefer_spectral(sc));
  sc.engine = EngineKind::rk45;
  CHECK_FALSE(prefer_spectral(sc));
  sc.engine = EngineKind::spectral;
  CHECK(prefer_spectral(sc));
  Scenario three;
  three.model = ModelKind::three_level;
  three.params.delta_z_ghz = 1e4;  // unused by the three-level model
  CHECK_FALSE(prefer_spectral(three));
}
