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

#include <cstdint>
#include <utility>
#include <vector>

namespace readout {

/// Expected collected photon numbers for the two initial spin states.
struct CountsPair {
  double n0 = 0.0;  // initial |g0> (cavity-coupled, dim transmission)
  double n1 = 0.0;  // initial |g1> (decoupled, bright transmission)
};

/// Success probability versus probe duration plus the optimum over the grid.
struct ReadoutCurve {
  std::vector<double> times;   // ns
  std::vector<double> ps;      // P_s at each time, in [0.5, 1]
  std::vector<int> thresholds; // optimal integer threshold M at each time
  double t_opt = 0.0;
  int m_opt = 0;
  double ps_opt = 0.5;
};

/// Poisson CDF P(X <= k | mean), incrementally accumulated terms; switches to
/// a streaming log-sum-exp for large means so values stay finite at mean=1e4.
double poisson_cdf(int k, double mean);

/// Weak-excitation analytic counts: n1 = eta_T_nin, n0 = eta_T_nin/(1+c)^2.
CountsPair analytic_counts(double eta_T_nin, double c);

/// p0(k) = P(X0 <= k): probability the count stays at or below threshold
/// when the qubit is in |g0>.
double correct_prob_g0(int k, double n0);
/// p1(k) = P(X1 > k): probability the count exceeds threshold for |g1>.
double correct_prob_g1(int k, double n1);

/// Closed-form optimal threshold floor((n1-n0)/(ln n1 - ln n0)); 0 when
/// n0 = 0. Requires n1 > n0 (throws otherwise; P_s = 0.5 for n0 = n1 is the
/// caller's degenerate case).
int optimal_threshold(const CountsPair& counts);

/// Equal-prior success probability via the closed-form threshold.
/// Returns exactly 0.5 when n0 = n1 (and for the no-contrast case n1 < n0).
double success_probability(const CountsPair& counts);

/// General-prior brute force: max over k in [0, ceil(n1 + 10 sqrt(n1+1))] of
/// q0 p0(k) + q1 p1(k). Ties resolve to the smallest k.
std::pair<double, int> success_probability_general(const CountsPair& counts,
                                                   double q0, double q1);

/// Map accumulated per-trajectory counts (photons, before collection) to the
/// success-probability curve: at each grid time the pair
/// (eta*acc0, eta*acc1) feeds success_probability. Grids must match.
ReadoutCurve ps_curve(const std::vector<double>& times,
                      const std::vector<double>& acc0,
                      const std::vector<double>& acc1, double eta);

/// Empty-cavity resonant steady-state transmitted flux n_in = 2 eps^2
/// (photons/ns) for the port convention used by the model builders, so that
/// N1(T) = eta T n_in holds by construction for the decoupled spin state.
double calibrate_nin(double epsilon);

}  // namespace readout
