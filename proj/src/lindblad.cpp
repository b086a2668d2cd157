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

#include "readout/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "readout/kernels.hpp"

namespace readout {

namespace {

constexpr double kHermTol = 1e-12;

// ---------------------------------------------------------------------------
// Structured application of the jump terms rate * O ρ O†. All collapse
// operators in the shipped models are either (atomic projector) ⊗ I or
// I ⊗ (cavity ladder); both admit O(d²) application. Anything else falls
// back to two dense matmuls.
// ---------------------------------------------------------------------------
struct JumpPlan {
  enum class Kind { AtomicProjector, CavityLadder, Generic };
  Kind kind = Kind::Generic;
  double weight = 0.0;       // rate * |c|²  (structured kinds)
  std::size_t from = 0, to = 0;  // |to><from| for AtomicProjector
  // Generic: T1 = op ρ, out += T1 * right, right = rate * op†
  Operator op;
  Operator right;
};

bool match_atomic_projector(const Operator& op, const SpaceLayout& lay,
                            std::size_t& from, std::size_t& to, cplx& coeff) {
  if (lay.dim() != op.dim() || lay.n_levels == 0) return false;
  bool found = false;
  for (std::size_t i = 0; i < op.dim(); ++i)
    for (std::size_t j = 0; j < op.dim(); ++j) {
      const cplx v = op(i, j);
      if (v == cplx(0.0, 0.0)) continue;
      const std::size_t li = i / lay.n_fock, mi = i % lay.n_fock;
      const std::size_t lj = j / lay.n_fock, mj = j % lay.n_fock;
      if (mi != mj) return false;
      if (!found) {
        to = li;
        from = lj;
        coeff = v;
        found = true;
      } else if (li != to || lj != from || std::abs(v - coeff) > 0.0) {
        return false;
      }
    }
  if (!found) return false;
  // every diagonal cavity slot must be present with the same coefficient
  for (std::size_t m = 0; m < lay.n_fock; ++m)
    if (op(lay.index(to, m), lay.index(from, m)) != coeff) return false;
  return true;
}

bool match_cavity_ladder(const Operator& op, const SpaceLayout& lay, cplx& coeff) {
  if (lay.dim() != op.dim() || lay.n_fock < 2) return false;
  coeff = op(lay.index(0, 0), lay.index(0, 1));  // entry at sqrt(1)
  if (coeff == cplx(0.0, 0.0)) return false;
  for (std::size_t i = 0; i < op.dim(); ++i)
    for (std::size_t j = 0; j < op.dim(); ++j) {
      const std::size_t li = i / lay.n_fock, mi = i % lay.n_fock;
      const std::size_t lj = j / lay.n_fock, mj = j % lay.n_fock;
      cplx want(0.0, 0.0);
      if (li == lj && mj == mi + 1)
        want = coeff * std::sqrt(static_cast<double>(mj));
      if (std::abs(op(i, j) - want) > 1e-14 * std::max(1.0, std::abs(want)))
        return false;
    }
  return true;
}

class RhsEvaluator {
 public:
  RhsEvaluator(const LindbladSystem& sys)
      : d_(sys.dim), lay_(sys.layout), kappa_(sys.kappa), h_nh_(sys.hamiltonian),
        scratch_(sys.dim * sys.dim) {
    // fold the anticommutator into a non-Hermitian drift:
    // H_nh = H - (i/2) Σ rate O†O, so the drift is -i(H_nh ρ - ρ H_nh†)
    for (const auto& ch : sys.collapse_ops) {
      Operator od = ch.op.adjoint();
      Operator odo = od * ch.op;
      h_nh_ += cplx(0.0, -0.5 * ch.rate) * odo;

      JumpPlan plan;
      std::size_t from = 0, to = 0;
      cplx c(0.0, 0.0);
      if (match_atomic_projector(ch.op, lay_, from, to, c)) {
        plan.kind = JumpPlan::Kind::AtomicProjector;
        plan.weight = ch.rate * std::norm(c);
        plan.from = from;
        plan.to = to;
      } else if (match_cavity_ladder(ch.op, lay_, c)) {
        plan.kind = JumpPlan::Kind::CavityLadder;
        plan.weight = ch.rate * std::norm(c);
      } else {
        plan.kind = JumpPlan::Kind::Generic;
        plan.op = ch.op;
        plan.right = od * cplx(ch.rate, 0.0);
      }
      jumps_.push_back(std::move(plan));
    }
    // sparse list for Tr(a ρ): amp = Σ a(i,j) ρ(j,i)
    const Operator& a = sys.a_cavity;
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = 0; j < d_; ++j)
        if (a(i, j) != cplx(0.0, 0.0)) amp_terms_.push_back({i, j, a(i, j)});
  }

  cplx trace_amp(const cplx* rho) const {
    cplx s(0.0, 0.0);
    for (const auto& t : amp_terms_) s += t.v * rho[t.j * d_ + t.i];
    return s;
  }

  double flux(const cplx* rho) const {
    return kappa_ * std::norm(trace_amp(rho));
  }

  // out := rhs(ρ); last slot of out gets the flux (accumulator derivative)
  void operator()(const cplx* rho, cplx* out) {
    const auto& K = kernels::active();
    // drift: out = -i (K - K†), K = H_nh ρ  (exact for Hermitian ρ)
    K.zgemm_set(scratch_.data(), h_nh_.data(), rho, d_, d_, d_);
    const cplx* k = scratch_.data();
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t j = 0; j < d_; ++j) {
        const cplx diff = k[i * d_ + j] - std::conj(k[j * d_ + i]);
        out[i * d_ + j] = cplx(diff.imag(), -diff.real());  // -i * diff
      }
    }
    // jumps
    for (const auto& p : jumps_) {
      switch (p.kind) {
        case JumpPlan::Kind::AtomicProjector: {
          // out[to-block, to-block] += w * ρ[from-block, from-block]
          const std::size_t nf = lay_.n_fock;
          const std::size_t r0 = p.to * nf, c0 = p.to * nf;
          const std::size_t sr = p.from * nf, sc = p.from * nf;
          for (std::size_t m = 0; m < nf; ++m)
            for (std::size_t n = 0; n < nf; ++n)
              out[(r0 + m) * d_ + (c0 + n)] +=
                  p.weight * rho[(sr + m) * d_ + (sc + n)];
          break;
        }
        case JumpPlan::Kind::CavityLadder: {
          // (a ρ a†)[(l,m),(l',n)] = sqrt(m+1) sqrt(n+1) ρ[(l,m+1),(l',n+1)]
          const std::size_t nf = lay_.n_fock;
          for (std::size_t r = 0; r < d_; ++r) {
            const std::size_t m = r % nf;
            if (m + 1 >= nf) continue;
            const double wm = p.weight * std::sqrt(static_cast<double>(m + 1));
            const cplx* src = rho + (r + 1) * d_;
            cplx* dst = out + r * d_;
            for (std::size_t c = 0; c < d_; ++c) {
              const std::size_t n = c % nf;
              if (n + 1 >= nf) continue;
              dst[c] += wm * std::sqrt(static_cast<double>(n + 1)) * src[c + 1];
            }
          }
          break;
        }
        case JumpPlan::Kind::Generic: {
          K.zgemm_set(scratch_.data(), p.op.data(), rho, d_, d_, d_);
          K.zgemm_acc(out, scratch_.data(), p.right.data(), d_, d_, d_);
          break;
        }
      }
    }
    out[d_ * d_] = cplx(flux(rho), 0.0);
  }

  std::size_t dim() const { return d_; }

 private:
  struct AmpTerm {
    std::size_t i, j;
    cplx v;
  };
  std::size_t d_;
  SpaceLayout lay_;
  double kappa_;
  Operator h_nh_;
  std::vector<JumpPlan> jumps_;
  std::vector<AmpTerm> amp_terms_;
  std::vector<cplx> scratch_;

 public:
  // Exposed for evolve(): per-level populations and kappa <a†a>.
  void observables(const cplx* rho, std::vector<double>& pops,
                   double& kappa_n) const {
    pops.assign(lay_.n_levels, 0.0);
    kappa_n = 0.0;
    for (std::size_t l = 0; l < lay_.n_levels; ++l)
      for (std::size_t m = 0; m < lay_.n_fock; ++m) {
        const std::size_t idx = lay_.index(l, m);
        const double pr = rho[idx * d_ + idx].real();
        pops[l] += pr;
        kappa_n += kappa_ * static_cast<double>(m) * pr;
      }
  }
};

// Dormand–Prince 5(4) tableau
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA2[1] = {1.0 / 5};
constexpr double kA3[2] = {3.0 / 40, 9.0 / 40};
constexpr double kA4[3] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
constexpr double kA5[4] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561,
                           -212.0 / 729};
constexpr double kA6[5] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247,
                           49.0 / 176, -5103.0 / 18656};
constexpr double kB[6] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                          -2187.0 / 6784, 11.0 / 84};
// b - b* (error weights), 7 stages with FSAL k7
constexpr double kE[7] = {71.0 / 57600,  0.0,          -71.0 / 16695, 71.0 / 1920,
                          -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

}  // namespace

void LindbladSystem::validate() const {
  if (hamiltonian.dim() != dim)
    throw std::invalid_argument("LindbladSystem: hamiltonian dim mismatch");
  if (hamiltonian.hermiticity_defect() > kHermTol)
    throw std::invalid_argument("LindbladSystem: hamiltonian not Hermitian");
  for (const auto& ch : collapse_ops) {
    if (ch.rate < 0.0)
      throw std::invalid_argument("LindbladSystem: negative collapse rate");
    if (ch.op.dim() != dim)
      throw std::invalid_argument("LindbladSystem: collapse op dim mismatch");
  }
  if (a_cavity.dim() != dim)
    throw std::invalid_argument("LindbladSystem: a_cavity dim mismatch");
  if (layout.dim() != dim)
    throw std::invalid_argument("LindbladSystem: layout dim mismatch");
}

Operator dissipator(const Operator& op, const Operator& rho) {
  if (op.dim() != rho.dim())
    throw std::invalid_argument("dissipator: dimension mismatch");
  const Operator od = op.adjoint();
  const Operator odo = od * op;
  Operator out = op * rho * od;
  out -= cplx(0.5, 0.0) * (odo * rho);
  out -= cplx(0.5, 0.0) * (rho * odo);
  return out;
}

Operator rhs(const LindbladSystem& sys, const Operator& rho) {
  if (rho.dim() != sys.dim) throw std::invalid_argument("rhs: dimension mismatch");
  const Operator& h = sys.hamiltonian;
  Operator out = cplx(0.0, -1.0) * (h * rho - rho * h);
  for (const auto& ch : sys.collapse_ops)
    out += cplx(ch.rate, 0.0) * dissipator(ch.op, rho);
  return out;
}

std::vector<double> make_output_grid(std::size_t n_points, double t_geo_start,
                                     double t_geo_end, double t_max) {
  if (n_points < 8 || t_geo_start <= 0.0 || t_geo_end <= t_geo_start ||
      t_max <= t_geo_end)
    throw std::invalid_argument("make_output_grid: bad parameters");
  std::vector<double> g;
  g.reserve(n_points);
  g.push_back(0.0);
  const std::size_t n_geo = n_points / 4;
  const std::size_t n_lin = n_points - 1 - n_geo;
  for (std::size_t i = 0; i < n_geo; ++i)
    g.push_back(t_geo_start *
                std::pow(t_geo_end / t_geo_start,
                         static_cast<double>(i) / static_cast<double>(n_geo - 1)));
  for (std::size_t i = 1; i <= n_lin; ++i)
    g.push_back(t_geo_end + (t_max - t_geo_end) * static_cast<double>(i) /
                                static_cast<double>(n_lin));
  return g;
}

Trajectory evolve(const LindbladSystem& sys, const Operator& rho0,
                  const IntegratorConfig& cfg) {
  sys.validate();
  if (rho0.dim() != sys.dim)
    throw std::invalid_argument("evolve: rho0 dimension mismatch");
  if (rho0.hermiticity_defect() > kHermTol)
    throw std::invalid_argument("evolve: rho0 not Hermitian");
  if (std::abs(rho0.trace() - cplx(1.0, 0.0)) > 1e-10)
    throw std::invalid_argument("evolve: rho0 trace != 1");
  if (min_hermitian_eigenvalue(rho0) < -1e-9)
    throw std::invalid_argument("evolve: rho0 not positive semidefinite");
  if (cfg.rel_tol <= 0.0 || cfg.abs_tol <= 0.0)
    throw std::invalid_argument("evolve: tolerances must be positive");
  const auto& grid = cfg.output_grid;
  if (grid.empty() || grid.front() != 0.0)
    throw std::invalid_argument("evolve: output grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw std::invalid_argument("evolve: output grid not strictly increasing");

  RhsEvaluator f(sys);
  const std::size_t d = sys.dim;
  const std::size_t nc = d * d + 1;        // complex state slots (+accumulator)
  const std::size_t nr = 2 * nc;           // real view length

  std::vector<std::vector<cplx>> k(7, std::vector<cplx>(nc));
  std::vector<cplx> y(nc), ytmp(nc), y5(nc), err(nc);
  std::copy(rho0.data(), rho0.data() + d * d, y.begin());
  y[d * d] = cplx(0.0, 0.0);

  const auto& kern = kernels::active();
  auto real_view = [](std::vector<cplx>& v) {
    return reinterpret_cast<double*>(v.data());
  };
  auto creal_view = [](const std::vector<cplx>& v) {
    return reinterpret_cast<const double*>(v.data());
  };

  Trajectory out;
  out.times = grid;
  out.flux.resize(grid.size());
  out.accumulated.resize(grid.size());
  out.kappa_n.resize(grid.size());
  out.populations.assign(sys.layout.n_levels, std::vector<double>(grid.size()));

  std::vector<double> pops;
  if (cfg.keep_states) out.states.reserve(grid.size());
  auto record = [&](std::size_t gi) {
    out.flux[gi] = f.flux(y.data());
    out.accumulated[gi] = y[d * d].real();
    double kn = 0.0;
    f.observables(y.data(), pops, kn);
    out.kappa_n[gi] = kn;
    for (std::size_t l = 0; l < pops.size(); ++l) out.populations[l][gi] = pops[l];
    if (cfg.keep_states)
      out.states.emplace_back(d, std::vector<cplx>(y.begin(), y.begin() + d * d));
  };

  std::size_t gi = 0;
  double t = 0.0;
  if (grid[0] == 0.0) {
    record(0);
    gi = 1;
  }
  if (gi >= grid.size()) {
    out.final_rho = Operator(d, std::vector<cplx>(y.begin(), y.begin() + d * d));
    return out;
  }

  f(y.data(), k[0].data());  // FSAL seed
  double h = std::min(1e-4, grid[gi] - t);
  if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);

  // PI step control (Gustafsson): damps the accept/reject limit cycle that a
  // pure I-controller develops when the step rides the stability boundary.
  constexpr double kBeta = 0.08;
  constexpr double kExpo = 0.2 - 0.75 * kBeta;
  constexpr double kSafety = 0.9;
  double facold = 1e-4;
  bool last_rejected = false;

  const double* aa[5] = {kA2, kA3, kA4, kA5, kA6};
  while (gi < grid.size()) {
    if (h < 1e-13 * std::max(1.0, std::fabs(t)))
      throw StiffnessError("evolve: step size underflow at t = " + std::to_string(t) +
                           " ns (stiffness failure)");
    bool hit_grid = false;
    double hstep = h;
    if (t + hstep >= grid[gi] - 1e-14 * std::max(1.0, grid[gi])) {
      hstep = grid[gi] - t;
      hit_grid = true;
    }

    // stages 2..6
    double coeff[6];
    const double* kptr[6];
    for (int s = 1; s <= 5; ++s) {
      for (int j = 0; j < s; ++j) {
        coeff[j] = hstep * aa[s - 1][j];
        kptr[j] = creal_view(k[j]);
      }
      kern.stage_combine(real_view(ytmp), creal_view(y), nr, coeff, kptr, s);
      f(ytmp.data(), k[s].data());
    }
    // 5th-order solution
    for (int j = 0; j < 6; ++j) {
      coeff[j] = hstep * kB[j];
      kptr[j] = creal_view(k[j]);
    }
    kern.stage_combine(real_view(y5), creal_view(y), nr, coeff, kptr, 6);
    f(y5.data(), k[6].data());  // FSAL: also the error stage
    // error estimate
    double ecoeff[7];
    const double* ekptr[7];
    for (int j = 0; j < 7; ++j) {
      ecoeff[j] = hstep * kE[j];
      ekptr[j] = creal_view(k[j]);
    }
    std::fill(err.begin(), err.end(), cplx(0.0, 0.0));
    kern.stage_combine(real_view(err), creal_view(err), nr, ecoeff, ekptr, 7);

    const double enorm =
        kern.error_norm(creal_view(err), creal_view(y), creal_view(y5),
                        cfg.abs_tol, cfg.rel_tol, nr);
    if (!std::isfinite(enorm))
      throw DivergenceError("evolve: non-finite state at t = " + std::to_string(t + hstep) + " ns", t + hstep);

    double factor;
    if (enorm == 0.0) {
      factor = 4.0;
    } else {
      factor = kSafety * std::pow(facold, kBeta) / std::pow(enorm, kExpo);
      factor = std::clamp(factor, 0.2, 4.0);
    }

    if (enorm <= 1.0) {
      // accept
      t = hit_grid ? grid[gi] : t + hstep;
      std::swap(y, y5);
      std::swap(k[0], k[6]);  // FSAL
      // the drift fold is exact only on Hermitian states and does not damp
      // the anti-Hermitian roundoff sector; project it out each step (the
      // machine-epsilon change to the FSAL stage is far below the tolerance)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
          const cplx avg = 0.5 * (y[i * d + j] + std::conj(y[j * d + i]));
          y[i * d + j] = avg;
          y[j * d + i] = std::conj(avg);
        }
      if (hit_grid) {
        record(gi);
        ++gi;
      }
      if (last_rejected) factor = std::min(factor, 1.0);  // no growth after a reject
      facold = std::max(enorm, 1e-4);
      last_rejected = false;
      h = hstep * factor;
      if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);
    } else {
      last_rejected = true;
      h = hstep * std::min(factor, kSafety);
    }
  }

  out.final_rho = Operator(d, std::vector<cplx>(y.begin(), y.begin() + d * d));
  return out;
}

}  // namespace readout
