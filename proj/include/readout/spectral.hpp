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

#include <memory>

#include "readout/lindblad.hpp"

namespace readout {

/// Exact propagator for the time-independent Liouvillian: diagonalizes the
/// dim² x dim² superoperator once (LAPACK zgeev) and evaluates the state,
/// the flux and the accumulated-count integral ∫|Tr(â ρ)|² dt in closed form
/// at every grid time. Unconditionally stable; the cost does not depend on
/// how stiff the Hamiltonian is, which is what makes the large-Δz sweep
/// points affordable. Results match evolve() to the integrator tolerance
/// (equivalence-tested).
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const LindbladSystem& sys);

  /// Same contract as evolve(); cfg tolerances are ignored (the method is
  /// exact up to the eigendecomposition).
  Trajectory propagate(const Operator& rho0, const IntegratorConfig& cfg) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// One-shot convenience matching the evolve() signature.
Trajectory evolve_spectral(const LindbladSystem& sys, const Operator& rho0,
                           const IntegratorConfig& cfg);

}  // namespace readout
