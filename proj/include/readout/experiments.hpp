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

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "readout/lindblad.hpp"
#include "readout/models.hpp"
#include "readout/stats.hpp"

namespace readout {

enum class ModelKind { three_level, four_level, analytic };
enum class EngineKind { auto_select, rk45, spectral };

struct GridSpec {
  std::size_t n_points = 600;
  double t_geo_start = 0.1;  // ns
  double t_geo_end = 10.0;
  double t_max = 400.0;
};

struct IntegratorSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 0.0;  // 0 = unlimited
  GridSpec grid;
};

struct SweepSpec {
  std::string name;  // eta | delta_z | gamma_d | gamma_I | cooperativity | eta_T_nin
  std::vector<double> values;
};

/// A fully resolved run description: one model, its parameters, the
/// integration setup and (optionally) a parameter sweep.
struct Scenario {
  ModelKind model = ModelKind::four_level;
  PhysicalParams params;
  std::size_t n_fock = 8;
  DiffusionSpec diffusion;  // gamma_I_ghz = 0 disables averaging
  IntegratorSpec integrator;
  EngineKind engine = EngineKind::auto_select;
  std::optional<SweepSpec> sweep;
  unsigned threads = 0;  // 0 = hardware default

  // analytic-model knobs (closed-form weak-excitation curves)
  std::vector<double> c_values = {0.4, 4.0, 40.0};
  double eta_T_nin_max = 40.0;
  int analytic_points = 400;
};

struct PairResult {
  Trajectory traj0;  // initial |g0>
  Trajectory traj1;  // initial |g1>
  ReadoutCurve curve;
};

struct SweepRow {
  double value = 0.0;
  double ps_opt = 0.5;
  double t_opt = 0.0;
  int m_opt = 0;  // -1 where a single threshold is not defined (averaged curves)
  double n0_at_topt = 0.0;
  double n1_at_topt = 0.0;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepRow> rows;
};

struct Fig2Row {
  double c = 0.0;
  double eta_T_nin = 0.0;
  double n0 = 0.0;
  double n1 = 0.0;
  int m = 0;
  double ps = 0.5;
};

/// Per-node detail emitted by the diffusion preset so the averaged success
/// probability can be recomputed offline from the counts alone.
struct DiffusionNodeRow {
  double gamma_I = 0.0;
  double delta_omega = 0.0;  // GHz
  double weight = 0.0;
  std::size_t node_index = 0;
};

/// Builds the LindbladSystem for a scenario (three- or four-level).
LindbladSystem build_system(const Scenario& sc);

/// True when the stiff-exact spectral propagator should be used for these
/// parameters (auto rule: dominant detuning above ~240 GHz).
bool prefer_spectral(const Scenario& sc);

/// Run both initial spin states and form the success-probability curve.
PairResult run_model_pair(const Scenario& sc);

/// Closed-form weak-excitation curves, no ODE.
std::vector<Fig2Row> run_fig2(const std::vector<double>& c_values,
                              double eta_T_nin_max, int n_points);

/// Success probability vs probe duration at the built-in defaults.
PairResult run_fig3b(ModelKind model, Scenario sc);

/// ps_opt vs Zeeman splitting; also returns the three-level reference value.
SweepResult run_fig3c(const std::vector<double>& delta_z_values, Scenario base,
                      double* three_level_reference);

/// ps_opt vs collection efficiency; the two trajectories are eta-independent
/// and are computed once.
SweepResult run_fig4(const std::vector<double>& eta_values, Scenario base);

/// ps_opt vs pure-dephasing rate.
SweepResult run_fig5_dephasing(const std::vector<double>& gamma_d_values,
                               Scenario base);

/// Averaged success probability vs inhomogeneous linewidth. Averaging over
/// the diffusion nodes happens pointwise in T before maximizing. When
/// `detail` is given it receives one entry per executed node together with
/// the per-node curves (appended to `node_curves` in the same order).
SweepResult run_fig5_diffusion(const std::vector<double>& gamma_I_values,
                               Scenario base,
                               std::vector<DiffusionNodeRow>* detail = nullptr,
                               std::vector<PairResult>* node_curves = nullptr);

/// Generic sweep dispatcher for the scenario's sweep block (whitelist:
/// eta, delta_z, gamma_d, gamma_I, cooperativity, eta_T_nin).
SweepResult run_sweep(const Scenario& sc);

/// CSV output: '#' comment lines, a header row, 12-significant-digit values.
void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

/// Resolved-configuration comment block shared by all presets.
std::vector<std::string> describe_scenario(const Scenario& sc);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// default, READOUT_SIM_THREADS honored by the caller). Deterministic:
/// workers only write into caller-owned slot i.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace readout
