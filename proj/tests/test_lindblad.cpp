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

#include <cmath>
#include <random>

#include "readout/models.hpp"
#include "readout/spectral.hpp"

using namespace readout;

namespace {

Operator random_density(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> nd;
  Operator g(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) g(i, j) = cplx(nd(rng), nd(rng));
  Operator rho = g * g.adjoint();
  rho *= cplx(1.0, 0.0) / rho.trace();
  return rho;
}

// drive through one mirror of the two-sided cavity; the probe amplitude is
// the full-system default (the auto formula would vanish at g = 0)
LindbladSystem empty_cavity(std::size_t nf, double kappa_ghz = 6.0) {
  PhysicalParams p;
  p.epsilon = default_epsilon(PhysicalParams{});
  p.g_ghz = 0.0;  // atom decoupled: pure driven cavity
  p.kappa_ghz = kappa_ghz;
  p.gamma_ghz = {0.0, 0.0};
  return build_three_level(p, SpaceLayout{3, nf});
}

}  // namespace

TEST_CASE("dissipator on simple cavity states") {
  const std::size_t nf = 3;
  const Operator a = annihilation(nf);

  Operator vac(nf);
  vac(0, 0) = 1.0;
  Operator d = dissipator(a, vac);
  CHECK(d.max_abs_diff(Operator(nf)) <= 1e-15);

  Operator one(nf);
  one(1, 1) = 1.0;
  d = dissipator(a, one);
  Operator want(nf);
  want(0, 0) = 1.0;
  want(1, 1) = -1.0;
  CHECK(d.max_abs_diff(want) <= 1e-14);
}

TEST_CASE("dissipators are trace-free on random pairs") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 2 + rep % 7;
    Operator op(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) op(i, j) = cplx(nd(rng), nd(rng));
    const Operator rho = random_density(rng, d);
    CHECK(std::abs(dissipator(op, rho).trace()) <= 1e-12 * d * d);
  }
}

TEST_CASE("rhs: zero generator, free rotation, hermiticity") {
  const SpaceLayout lay{3, 2};
  LindbladSystem sys;
  sys.dim = lay.dim();
  sys.layout = lay;
  sys.kappa = 1.0;
  sys.a_cavity = cavity_annihilation(lay);
  sys.hamiltonian = Operator(sys.dim);

  std::mt19937_64 rng(3);
  const Operator rho = random_density(rng, sys.dim);
  CHECK(rhs(sys, rho).max_abs_diff(Operator(sys.dim)) <= 1e-15);

  // free cavity rotation: coherence picks up -i omega rho_{10}
  const double omega = 2.7;
  sys.hamiltonian = cplx(omega, 0.0) * (sys.a_cavity.adjoint() * sys.a_cavity);
  Operator coh(sys.dim);
  coh(lay.index(0, 1), lay.index(0, 0)) = 1.0;  // |1><0| cavity coherence
  const Operator d = rhs(sys, coh);
  CHECK(std::abs(d(lay.index(0, 1), lay.index(0, 0)) - cplx(0.0, -omega)) <= 1e-13);

  // Hermitian input -> Hermitian, trace-free output
  PhysicalParams p;
  const LindbladSystem full = build_three_level(p, SpaceLayout{3, 4});
  const Operator r2 = random_density(rng, full.dim);
  const Operator out = rhs(full, r2);
  CHECK(out.hermiticity_defect() <= 1e-12 * angular(20.0));
  CHECK(std::abs(out.trace()) <= 1e-11 * angular(20.0));
}

TEST_CASE("driven empty cavity approaches the input-output steady state") {
  // d<a>/dt = -i sqrt(kappa/2) eps - (kappa/2) <a>  =>  flux -> 2 eps^2
  const LindbladSystem sys = empty_cavity(10);
  PhysicalParams p;
  const double eps = default_epsilon(p);

  IntegratorConfig cfg;
  cfg.output_grid = {0.0, 0.5, 1.0, 2.0};
  const Trajectory tr = evolve(sys, vacuum_state(sys.layout, kG1), cfg);

  CHECK(tr.flux.back() == doctest::Approx(2.0 * eps * eps).epsilon(1e-6));
  // amplitude phase/magnitude: |<a>|^2 = 2 eps^2 / kappa
  const cplx amp = expectation(sys.a_cavity, tr.final_rho);
  CHECK(std::abs(amp) ==
        doctest::Approx(std::sqrt(2.0) * eps / std::sqrt(sys.kappa)).epsilon(1e-6));
  CHECK(amp.real() == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(amp.imag() < 0.0);
}

TEST_CASE("dark initial state produces no flux") {
  PhysicalParams p;
  p.epsilon = 1e-300;  // no drive
  const SpaceLayout lay{3, 3};
  const LindbladSystem sys = build_three_level(p, lay);
  IntegratorConfig cfg;
  cfg.output_grid = {0.0, 1.0, 5.0};
  const Trajectory tr = evolve(sys, vacuum_state(lay, kG0), cfg);
  for (double f : tr.flux) CHECK(f <= 1e-200);
  CHECK(tr.accumulated.back() <= 1e-200);
}

TEST_CASE("fock truncation ladder reproduces the independent eigendecomposition") {
  // accumulated counts at T = 100 ns for the driven cavity, per truncation;
  // reference values from an independent dense-eigendecomposition oracle
  struct Ref {
    std::size_t nf;
    double acc100;
  };
  const Ref refs[] = {
      {3, 1207.19492217}, {4, 1569.94704909}, {8, 1674.17184093},
      {10, 1674.18271063},
  };
  for (const auto& r : refs) {
    const LindbladSystem sys = empty_cavity(r.nf);
    IntegratorConfig cfg;
    cfg.output_grid = {0.0, 100.0};
    const Trajectory tr = evolve(sys, vacuum_state(sys.layout, kG1), cfg);
    CHECK(tr.accumulated.back() == doctest::Approx(r.acc100).epsilon(2e-8));
  }
}

TEST_CASE("weak-probe transmission contrast matches the cooperativity formula") {
  // flip channel redirected (gamma0 <- gamma0+gamma1, gamma1 <- 0) so the
  // coupled state is stationary with the same total excited-state decay;
  // probe at eps/100 to stay in the linear-response regime.
  PhysicalParams p;
  p.gamma_ghz = {0.2, 0.0};
  p.epsilon = default_epsilon(PhysicalParams{}) / 100.0;
  const SpaceLayout lay{3, 4};
  const LindbladSystem coupled = build_three_level(p, lay);

  PhysicalParams pe = p;
  pe.g_ghz = 0.0;
  const LindbladSystem empty = build_three_level(pe, lay);

  IntegratorConfig cfg;
  cfg.output_grid = {0.0, 40.0, 60.0};
  const double f_coupled = evolve(coupled, vacuum_state(lay, kG0), cfg).flux.back();
  const double f_empty = evolve(empty, vacuum_state(lay, kG1), cfg).flux.back();

  const double c = 1333.3333333333;
  CHECK(f_coupled / f_empty ==
        doctest::Approx(1.0 / ((1.0 + c) * (1.0 + c))).epsilon(0.01));
}

TEST_CASE("physical invariants hold along a representative run") {
  PhysicalParams p;
  const SpaceLayout lay{3, 6};
  const LindbladSystem sys = build_three_level(p, lay);
  IntegratorConfig cfg;
  cfg.output_grid = make_output_grid(120, 0.1, 10.0, 120.0);
  const Trajectory tr = evolve(sys, vacuum_state(lay, kG0), cfg);

  double prev = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    CHECK(tr.accumulated[i] >= prev - 1e-12);
    prev = tr.accumulated[i];
    double trace = 0.0;
    for (const auto& pl : tr.populations) {
      CHECK(pl[i] >= -1e-9);
      CHECK(pl[i] <= 1.0 + 1e-9);
      trace += pl[i];
    }
    CHECK(std::fabs(trace - 1.0) <= 1e-8);
  }
  CHECK(tr.final_rho.hermiticity_defect() <= 1e-8);
  CHECK(std::abs(tr.final_rho.trace() - cplx(1.0, 0.0)) <= 1e-8);
  CHECK(min_hermitian_eigenvalue(tr.final_rho) >= -1e-7);
}

TEST_CASE("halving the tolerance barely moves the accumulated counts") {
  PhysicalParams p;
  const SpaceLayout lay{3, 4};
  const LindbladSystem sys = build_three_level(p, lay);
  IntegratorConfig cfg;
  cfg.output_grid = {0.0, 30.0};
  const double a1 = evolve(sys, vacuum_state(lay, kG0), cfg).accumulated.back();
  cfg.rel_tol *= 0.5;
  const double a2 = evolve(sys, vacuum_state(lay, kG0), cfg).accumulated.back();
  CHECK(std::fabs(a1 - a2) / std::fabs(a2) < 1e-6);
}

TEST_CASE("output grid is hit exactly") {
  const LindbladSystem sys = empty_cavity(4);
  IntegratorConfig cfg;
  cfg.output_grid = {0.0, 0.123456, 1.0, 2.718281828, 7.5};
  const Trajectory tr = evolve(sys, vacuum_state(sys.layout, kG1), cfg);
  REQUIRE(tr.times.size() == cfg.output_grid.size());
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    CHECK(tr.times[i] == cfg.output_grid[i]);
}

TEST_CASE("evolve validates its inputs") {
  const LindbladSystem sys = empty_cavity(4);
  IntegratorConfig cfg;
  cfg.output_grid = {0.0, 1.0};

  Operator bad_trace(sys.dim);
  bad_trace(0, 0) = 2.0;
  CHECK_THROWS_AS(evolve(sys, bad_trace, cfg), std::invalid_argument);

  Operator not_herm(sys.dim);
  not_herm(0, 0) = 1.0;
  not_herm(0, 1) = cplx(0.5, 0.0);  // missing the conjugate partner
  CHECK_THROWS_AS(evolve(sys, not_herm, cfg), std::invalid_argument);

  Operator not_psd(sys.dim);
  not_psd(0, 0) = 1.5;
  not_psd(1, 1) = -0.5;
  CHECK_THROWS_AS(evolve(sys, not_psd, cfg), std::invalid_argument);

  IntegratorConfig bad_grid;
  bad_grid.output_grid = {0.5, 1.0};
  CHECK_THROWS_AS(evolve(sys, vacuum_state(sys.layout, kG0), bad_grid),
                  std::invalid_argument);
  bad_grid.output_grid = {0.0, 1.0, 1.0};
  CHECK_THROWS_AS(evolve(sys, vacuum_state(sys.layout, kG0), bad_grid),
                  std::invalid_argument);
}

TEST_CASE("spectral propagator agrees with the adaptive integrator") {
  PhysicalParams p;
  const SpaceLayout lay{4, 4};
  const LindbladSystem sys = build_four_level(p, lay);
  IntegratorConfig cfg;
  cfg.output_grid = make_output_grid(50, 0.1, 5.0, 80.0);

  const SpectralPropagator prop(sys);
  for (std::size_t level : {kG0, kG1}) {
    const Operator rho0 = vacuum_state(lay, level);
    const Trajectory rk = evolve(sys, rho0, cfg);
    const Trajectory sp = prop.propagate(rho0, cfg);
    for (std::size_t i = 0; i < cfg.output_grid.size(); ++i) {
      CHECK(sp.accumulated[i] ==
            doctest::Approx(rk.accumulated[i]).epsilon(1e-6));
      CHECK(sp.flux[i] == doctest::Approx(rk.flux[i]).epsilon(1e-6));
      for (std::size_t l = 0; l < lay.n_levels; ++l)
        CHECK(std::fabs(sp.populations[l][i] - rk.populations[l][i]) <= 1e-7);
    }
    CHECK(sp.final_rho.max_abs_diff(rk.final_rho) <= 1e-7);
  }
}

TEST_CASE("spectral propagator handles a strongly detuned level at fixed cost") {
  PhysicalParams p;
  p.delta_z_ghz = 1e4;
  const SpaceLayout lay{4, 4};
  const LindbladSystem sys = build_four_level(p, lay);
  IntegratorConfig cfg;
  cfg.output_grid = make_output_grid(40, 0.1, 5.0, 60.0);
  const Trajectory tr = evolve_spectral(sys, vacuum_state(lay, kG1), cfg);
  double prev = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    CHECK(tr.accumulated[i] >= prev);
    prev = tr.accumulated[i];
    double trace = 0.0;
    for (const auto& pl : tr.populations) trace += pl[i];
    CHECK(std::fabs(trace - 1.0) <= 1e-7);
  }
  // nearly decoupled: the bright state transmits like the empty cavity at
  // the same truncation
  IntegratorConfig short_cfg;
  short_cfg.output_grid = {0.0, 30.0};
  const LindbladSystem empty = empty_cavity(4);
  const double f_empty =
      evolve(empty, vacuum_state(empty.layout, kG1), short_cfg).flux.back();
  CHECK(tr.flux.back() == doctest::Approx(f_empty).epsilon(0.005));
}

TEST_CASE("default output grid has the documented shape") {
  const auto g = make_output_grid();
  CHECK(g.size() == 600);
  CHECK(g.front() == 0.0);
  CHECK(g[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(g.back() == doctest::Approx(400.0).epsilon(1e-12));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}
