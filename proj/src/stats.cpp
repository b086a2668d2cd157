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

#include "readout/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace readout {

namespace {

// Streaming Poisson CDF: advance k one step at a time. Direct term recursion
// term_{j+1} = term_j * mean/(j+1) below the exp(-mean) underflow threshold,
// log-space accumulation above it.
class PoissonScan {
 public:
  explicit PoissonScan(double mean) : mean_(mean), logspace_(mean > 700.0) {
    if (mean_ == 0.0) {
      cdf_ = 1.0;
    } else if (logspace_) {
      logterm_ = -mean_;  // j = 0
      max_ = logterm_;
      scaled_sum_ = 1.0;
      cdf_ = std::exp(max_) * scaled_sum_;
    } else {
      term_ = std::exp(-mean_);
      cdf_ = term_;
    }
  }

  double cdf() const { return std::min(cdf_, 1.0); }

  void advance() {  // to k+1
    ++k_;
    if (mean_ == 0.0) return;
    if (logspace_) {
      logterm_ += std::log(mean_) - std::log(static_cast<double>(k_));
      if (logterm_ <= max_) {
        scaled_sum_ += std::exp(logterm_ - max_);
      } else {
        scaled_sum_ = scaled_sum_ * std::exp(max_ - logterm_) + 1.0;
        max_ = logterm_;
      }
      cdf_ = std::exp(max_) * scaled_sum_;
    } else {
      term_ *= mean_ / static_cast<double>(k_);
      cdf_ += term_;
    }
  }

 private:
  double mean_;
  bool logspace_;
  int k_ = 0;
  double term_ = 0.0;
  double logterm_ = 0.0;
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_sum_ = 0.0;
  double cdf_ = 0.0;
};

}  // namespace

double poisson_cdf(int k, double mean) {
  if (mean < 0.0) throw std::invalid_argument("poisson_cdf: negative mean");
  if (k < 0) return 0.0;
  PoissonScan scan(mean);
  for (int j = 0; j < k; ++j) scan.advance();
  return scan.cdf();
}

CountsPair analytic_counts(double eta_T_nin, double c) {
  if (eta_T_nin < 0.0 || c < 0.0)
    throw std::invalid_argument("analytic_counts: negative input");
  const double denom = (1.0 + c) * (1.0 + c);
  return {eta_T_nin / denom, eta_T_nin};
}

double correct_prob_g0(int k, double n0) {
  if (k < 0) throw std::invalid_argument("correct_prob_g0: negative threshold");
  return poisson_cdf(k, n0);
}

double correct_prob_g1(int k, double n1) {
  if (k < 0) throw std::invalid_argument("correct_prob_g1: negative threshold");
  return 1.0 - poisson_cdf(k, n1);
}

int optimal_threshold(const CountsPair& counts) {
  if (!(counts.n1 > counts.n0))
    throw std::invalid_argument("optimal_threshold: requires n1 > n0 (no contrast)");
  if (counts.n0 == 0.0) return 0;  // any detected photon implies |g1>
  const double m = (counts.n1 - counts.n0) / (std::log(counts.n1) - std::log(counts.n0));
  return static_cast<int>(std::floor(m));
}

double success_probability(const CountsPair& counts) {
  if (!(counts.n0 >= 0.0) || !(counts.n1 >= 0.0) ||
      !std::isfinite(counts.n0) || !std::isfinite(counts.n1))
    throw std::invalid_argument("success_probability: invalid counts");
  if (counts.n1 <= counts.n0) return 0.5;  // no contrast
  const int m = optimal_threshold(counts);
  const double ps =
      0.5 + 0.5 * (poisson_cdf(m, counts.n0) - poisson_cdf(m, counts.n1));
  return std::clamp(ps, 0.5, 1.0);
}

std::pair<double, int> success_probability_general(const CountsPair& counts,
                                                   double q0, double q1) {
  if (q0 < 0.0 || q1 < 0.0 || std::fabs(q0 + q1 - 1.0) > 1e-12)
    throw std::invalid_argument("success_probability_general: invalid priors");
  const int kmax = static_cast<int>(
      std::ceil(counts.n1 + 10.0 * std::sqrt(counts.n1 + 1.0)));
  PoissonScan s0(counts.n0), s1(counts.n1);
  double best = -1.0;
  int best_k = 0;
  for (int k = 0; k <= kmax; ++k) {
    const double v = q0 * s0.cdf() + q1 * (1.0 - s1.cdf());
    if (v > best) {
      best = v;
      best_k = k;
    }
    s0.advance();
    s1.advance();
  }
  return {best, best_k};
}

ReadoutCurve ps_curve(const std::vector<double>& times,
                      const std::vector<double>& acc0,
                      const std::vector<double>& acc1, double eta) {
  if (times.size() != acc0.size() || times.size() != acc1.size())
    throw std::invalid_argument("ps_curve: grid mismatch");
  if (eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("ps_curve: eta outside [0,1]");

  ReadoutCurve out;
  out.times = times;
  out.ps.resize(times.size());
  out.thresholds.resize(times.size());
  std::size_t iopt = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const CountsPair c{eta * acc0[i], eta * acc1[i]};
    out.ps[i] = success_probability(c);
    out.thresholds[i] = (c.n1 > c.n0 && c.n0 >= 0.0) ? optimal_threshold(c) : 0;
    if (out.ps[i] > out.ps[iopt]) iopt = i;  // first attaining index wins ties
  }
  out.ps_opt = out.ps[iopt];
  out.t_opt = times[iopt];
  out.m_opt = out.thresholds[iopt];
  return out;
}

double calibrate_nin(double epsilon) { return 2.0 * epsilon * epsilon; }

}  // namespace readout
