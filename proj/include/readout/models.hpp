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

#include <utility>
#include <vector>

#include "readout/lindblad.hpp"
#include "readout/operators.hpp"

namespace readout {

// Level index conventions (fixed):
//   three-level: 0 |g0>, 1 |g1>, 2 |e>
//   four-level:  0 |g0>, 1 |g1>, 2 |e0>, 3 |e1>
inline constexpr std::size_t kG0 = 0;
inline constexpr std::size_t kG1 = 1;
inline constexpr std::size_t kE = 2;
inline constexpr std::size_t kE0 = 2;
inline constexpr std::size_t kE1 = 3;

/// All frequencies and rates quoted as ordinary frequencies in GHz, the
/// way cavity-QED parameters are usually reported (g/2pi = 20 GHz is stored
/// as 20). Conversion to angular rad/ns happens in exactly one place
/// (angular()). epsilon is a field amplitude in sqrt(photons/ns) and is not
/// 2pi-converted.
struct PhysicalParams {
  double g_ghz = 20.0;
  double kappa_ghz = 6.0;
  std::vector<double> gamma_ghz = {0.1, 0.1, 0.1, 0.1};  // gamma_0..gamma_3
  double gamma_d_ghz = 0.0;      // pure dephasing
  double delta_z_ghz = 100.0;    // Zeeman splitting (four-level)
  double detuning_c_ghz = 0.0;   // omega_c - omega_laser
  double detuning_a_ghz = 0.0;   // omega_a - omega_laser
  double delta_omega_ghz = 0.0;  // spectral-diffusion shift of the e-levels
  double epsilon = 0.0;          // sqrt(photons/ns); 0 = auto (see default_epsilon)
  double eta = 0.01;             // collection efficiency

  void validate() const;  // rates >= 0, eta in [0,1]
};

/// The single GHz -> rad/ns conversion point: omega = 2 pi f.
double angular(double f_ghz);
/// Inverse of angular(); provided so a round-trip is testable.
double from_angular(double omega_rad_ns);

/// Weak-excitation drive prescription eps = sqrt(0.01 * 2 g^2 / kappa) on
/// angular g, kappa: the incident flux eps^2 is 0.01 photons per modified
/// lifetime kappa/(2 g^2) of the coupled transition.
double default_epsilon(const PhysicalParams& p);

/// Drive amplitude actually entering the Hamiltonian: the probe couples
/// through the input mirror of the two-sided cavity at rate kappa/2,
/// H_d = sqrt(kappa/2) eps (a + a†).
double drive_amplitude(const PhysicalParams& p);

/// Atomic cooperativity C = 2 g^2 / (kappa gamma); 2pi factors cancel.
double cooperativity(const PhysicalParams& p);

/// Empty-cavity resonant steady-state transmitted flux 2 eps^2 (photons/ns);
/// forwards to the stats-module calibration with this model's epsilon.
double calibrate_nin(const PhysicalParams& p);

/// Lambda system: two ground states, one excited state, cavity coupled to
/// the |g0> <-> |e> transition only. layout must be {3 levels, >= 2 Fock}.
LindbladSystem build_three_level(const PhysicalParams& p, const SpaceLayout& layout);

/// Voigt-geometry four-level system: both vertical transitions couple to the
/// cavity with equal strength, |g1> <-> |e1> detuned by delta_z; cross
/// transitions enter only as decay channels. Pure dephasing adds projector
/// channels at rate 2*gamma_d on both excited states; the spectral-diffusion
/// shift moves both excited levels rigidly so the splitting is preserved.
/// layout must be {4 levels, >= 2 Fock}.
LindbladSystem build_four_level(const PhysicalParams& p, const SpaceLayout& layout);

/// Gaussian spectral-diffusion sampling (FWHM-parameterized).
struct DiffusionSpec {
  double gamma_I_ghz = 0.0;  // FWHM
  int n_nodes = 21;          // odd, >= 3
  double span = 1.5;         // advisory/diagnostic only (node placement is
                             // fixed by the Gauss-Hermite rule)
};

/// Gauss-Hermite nodes mapped to the FWHM-gamma_I Gaussian. Returns
/// (delta_omega_ghz, weight) pairs with weights normalized to sum to 1;
/// gamma_I = 0 collapses to {(0, 1)}.
std::vector<std::pair<double, double>> sample_diffusion(const DiffusionSpec& spec);

/// Physicists' Gauss-Hermite rule for ∫ e^{-x^2} f(x) dx ≈ Σ w_i f(x_i).
void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace readout
