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

#include <stdexcept>
#include <utility>
#include <vector>

#include "readout/operators.hpp"

namespace readout {

/// One Markovian decay channel: rate (1/ns) times a collapse operator.
struct CollapseChannel {
  double rate = 0.0;
  Operator op;
};

/// dρ/dt = -i[H, ρ] + Σ rate_k D(op_k)ρ, with the transmitted-photon
/// observables needed to accumulate Eq.-of-motion photon counts alongside
/// the state. Frequencies and rates are angular (rad/ns); ħ is scaled out.
struct LindbladSystem {
  Operator hamiltonian;
  std::vector<CollapseChannel> collapse_ops;
  std::size_t dim = 0;

  // transmitted-flux bookkeeping: flux(t) = kappa |Tr(a ρ)|^2
  Operator a_cavity;   // composite-space annihilation operator
  double kappa = 0.0;  // cavity energy decay rate, rad/ns
  SpaceLayout layout;  // for per-level populations

  /// Validates Hermiticity of H (<= 1e-12 elementwise), non-negative rates
  /// and matching dimensions. Throws std::invalid_argument.
  void validate() const;
};

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 0.0;  // ns; 0 = unlimited
  std::vector<double> output_grid;  // ns, strictly increasing, starts at 0
  bool keep_states = false;  // capture the density matrix at every grid time
};

/// Time series on the output grid. `accumulated` is the running integral of
/// `flux` (photons, before multiplying by the collection efficiency eta),
/// carried inside the ODE state so it inherits the integrator's error
/// control.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> flux;         // kappa |Tr(a ρ)|^2, photons/ns
  std::vector<double> accumulated;  // ∫ flux dt, photons
  std::vector<std::vector<double>> populations;  // [level][time]
  std::vector<double> kappa_n;      // kappa <a†a>, diagnostic only
  Operator final_rho;
  std::vector<Operator> states;     // filled only when keep_states is set
};

struct StiffnessError : std::runtime_error {
  explicit StiffnessError(const std::string& msg) : std::runtime_error(msg) {}
};
struct DivergenceError : std::runtime_error {
  double time;
  DivergenceError(const std::string& msg, double t)
      : std::runtime_error(msg), time(t) {}
};

/// Lindblad dissipator D(O)ρ = OρO† - ½O†Oρ - ½ρO†O (trace-free).
Operator dissipator(const Operator& op, const Operator& rho);

/// Full master-equation right-hand side -i[H,ρ] + Σ rate D(op)ρ.
Operator rhs(const LindbladSystem& sys, const Operator& rho);

/// Default output grid: t=0, geometric 0.1..10 ns, then linear to t_max.
std::vector<double> make_output_grid(std::size_t n_points = 600,
                                     double t_geo_start = 0.1,
                                     double t_geo_end = 10.0,
                                     double t_max = 400.0);

/// Integrate with an adaptive Dormand–Prince 5(4) pair. Steps are clamped so
/// every grid point is hit exactly; the photon-count accumulator rides in
/// the state vector under the same error control. rho0 must be a valid
/// density matrix (Hermitian, unit trace, positive semidefinite).
Trajectory evolve(const LindbladSystem& sys, const Operator& rho0,
                  const IntegratorConfig& cfg);

}  // namespace readout
