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

#include "readout/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "readout/kernels.hpp"

// LAPACK (complex double, Fortran interface)
extern "C" {
void zgeev_(const char* jobvl, const char* jobvr, const int* n,
            std::complex<double>* a, const int* lda, std::complex<double>* w,
            std::complex<double>* vl, const int* ldvl, std::complex<double>* vr,
            const int* ldvr, std::complex<double>* work, const int* lwork,
            double* rwork, int* info);
void zgetrf_(const int* m, const int* n, std::complex<double>* a, const int* lda,
             int* ipiv, int* info);
void zgetrs_(const char* trans, const int* n, const int* nrhs,
             const std::complex<double>* a, const int* lda, const int* ipiv,
             std::complex<double>* b, const int* ldb, int* info);
}

namespace readout {

namespace {

// column-stacked vec: vec(rho)[i + j*d] = rho(i,j); Tr(A rho) = vec(A^T) . vec(rho)
std::vector<cplx> trace_functional(const Operator& a) {
  const std::size_t d = a.dim();
  std::vector<cplx> w(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) w[j + i * d] = a(i, j);
  return w;
}

}  // namespace

struct SpectralPropagator::Impl {
  std::size_t d = 0;
  std::size_t D = 0;  // d*d
  double kappa = 0.0;
  SpaceLayout layout;
  std::vector<cplx> lam;       // eigenvalues of the Liouvillian
  std::vector<cplx> V;         // right eigenvectors, column-major D x D
  std::vector<cplx> Vlu;       // LU factors of V
  std::vector<int> ipiv;
  std::vector<cplx> amp_row;   // w_amp^T V   (amp functional in eigenbasis)
  std::vector<std::vector<cplx>> pop_rows;  // per-level populations
  std::vector<cplx> n_row;     // <a†a> functional
  std::vector<cplx> tr_row;    // trace functional (sanity)

  // solve V x = vec(rho0)
  std::vector<cplx> project(const Operator& rho0) const {
    std::vector<cplx> x(D);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) x[i + j * d] = rho0(i, j);
    const int n = static_cast<int>(D), one = 1;
    int info = 0;
    zgetrs_("N", &n, &one, Vlu.data(), &n, ipiv.data(), x.data(), &n, &info);
    if (info != 0)
      throw std::runtime_error("SpectralPropagator: zgetrs failed, info=" +
                               std::to_string(info));
    return x;
  }
};

SpectralPropagator::SpectralPropagator(const LindbladSystem& sys) {
  sys.validate();
  auto impl = std::make_shared<Impl>();
  impl->d = sys.dim;
  impl->D = sys.dim * sys.dim;
  impl->kappa = sys.kappa;
  impl->layout = sys.layout;
  const std::size_t d = impl->d, D = impl->D;

  // assemble the column-stacked Liouvillian, column-major for LAPACK:
  // L = -i(I (x) H - H^T (x) I) + sum_k r_k (conj(O) (x) O
  //      - 1/2 I (x) O†O - 1/2 (O†O)^T (x) I)
  std::vector<cplx> L(D * D, cplx(0.0, 0.0));
  auto add = [&](std::size_t r, std::size_t c, cplx v) { L[r + c * D] += v; };
  const Operator& H = sys.hamiltonian;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) {
        // -i (I (x) H): row (i,j), col (k,j), value -i H(i,k)
        if (H(i, k) != cplx(0.0, 0.0))
          add(i + j * d, k + j * d, cplx(0.0, -1.0) * H(i, k));
        // +i (H^T (x) I): row (i,j), col (i,k), value +i H(k,j)
        if (H(k, j) != cplx(0.0, 0.0))
          add(i + j * d, i + k * d, cplx(0.0, 1.0) * H(k, j));
      }
  for (const auto& ch : sys.collapse_ops) {
    if (ch.rate == 0.0) continue;
    const Operator& O = ch.op;
    const Operator Od = O.adjoint();
    const Operator OdO = Od * O;
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t l = 0; l < d; ++l) {
        const cplx ojl = std::conj(O(j, l));
        if (ojl != cplx(0.0, 0.0))
          for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k)
              if (O(i, k) != cplx(0.0, 0.0))
                add(i + j * d, k + l * d, ch.rate * ojl * O(i, k));
      }
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
          if (OdO(i, k) != cplx(0.0, 0.0))
            add(i + j * d, k + j * d, -0.5 * ch.rate * OdO(i, k));
          if (OdO(k, j) != cplx(0.0, 0.0))
            add(i + j * d, i + k * d, -0.5 * ch.rate * OdO(k, j));
        }
  }

  // eigendecomposition
  impl->lam.resize(D);
  impl->V.resize(D * D);
  {
    const int n = static_cast<int>(D);
    int info = 0, lwork = -1;
    std::vector<double> rwork(2 * D);
    cplx wkopt;
    zgeev_("N", "V", &n, L.data(), &n, impl->lam.data(), nullptr, &n,
           impl->V.data(), &n, &wkopt, &lwork, rwork.data(), &info);
    lwork = static_cast<int>(wkopt.real());
    std::vector<cplx> work(static_cast<std::size_t>(lwork));
    zgeev_("N", "V", &n, L.data(), &n, impl->lam.data(), nullptr, &n,
           impl->V.data(), &n, work.data(), &lwork, rwork.data(), &info);
    if (info != 0)
      throw std::runtime_error("SpectralPropagator: zgeev failed, info=" +
                               std::to_string(info));
  }

  // LU of V for initial-state projections
  impl->Vlu = impl->V;
  impl->ipiv.resize(D);
  {
    const int n = static_cast<int>(D);
    int info = 0;
    zgetrf_(&n, &n, impl->Vlu.data(), &n, impl->ipiv.data(), &info);
    if (info != 0)
      throw std::runtime_error("SpectralPropagator: eigenvector matrix is singular");
  }

  // observable functionals in the eigenbasis: row = w^T V
  auto to_eigenbasis = [&](const std::vector<cplx>& w) {
    std::vector<cplx> row(D);
    const auto& kern = kernels::active();
    for (std::size_t c = 0; c < D; ++c)
      row[c] = kern.zdotu(w.data(), impl->V.data() + c * D, D);
    return row;
  };
  impl->amp_row = to_eigenbasis(trace_functional(sys.a_cavity));
  impl->tr_row = to_eigenbasis(trace_functional(identity(d)));
  {
    Operator n_op = sys.a_cavity.adjoint() * sys.a_cavity;
    impl->n_row = to_eigenbasis(trace_functional(n_op));
  }
  impl->pop_rows.resize(sys.layout.n_levels);
  for (std::size_t lvl = 0; lvl < sys.layout.n_levels; ++lvl) {
    Operator p(d);
    for (std::size_t m = 0; m < sys.layout.n_fock; ++m) {
      const std::size_t idx = sys.layout.index(lvl, m);
      p(idx, idx) = 1.0;
    }
    impl->pop_rows[lvl] = to_eigenbasis(trace_functional(p));
  }

  impl_ = std::move(impl);
}

Trajectory SpectralPropagator::propagate(const Operator& rho0,
                                         const IntegratorConfig& cfg) const {
  const Impl& im = *impl_;
  const std::size_t d = im.d, D = im.D;
  if (rho0.dim() != d)
    throw std::invalid_argument("SpectralPropagator: rho0 dimension mismatch");
  const auto& grid = cfg.output_grid;
  if (grid.empty() || grid.front() != 0.0)
    throw std::invalid_argument("SpectralPropagator: output grid must start at 0");

  const auto& kern = kernels::active();
  std::vector<cplx> x = im.project(rho0);

  // sanity: Tr rho(0) reconstructed from the decomposition
  {
    const cplx tr0 = kern.zdotu(im.tr_row.data(), x.data(), D);
    if (std::abs(tr0 - cplx(1.0, 0.0)) > 1e-8)
      throw std::runtime_error(
          "SpectralPropagator: eigendecomposition failed the trace check");
  }

  // amp(t) = sum_k c_k exp(lam_k t), c = amp_row ∘ x
  std::vector<cplx> c(D);
  for (std::size_t k = 0; k < D; ++k) c[k] = im.amp_row[k] * x[k];

  // accumulated(T) = kappa * sum_jk W_jk phi(M_jk, T),
  //   W_jk = c_j conj(c_k), M_jk = lam_j + conj(lam_k),
  //   phi(m, T) = (e^{mT} - 1)/m  (-> T as m -> 0).
  // Split: pairs with |M| T_max >= thresh use the closed form through the
  // outer product of u = exp(lam T); near-degenerate pairs go to a series
  // list. P = W / M with excluded cells zeroed.
  const double t_max = std::max(grid.back(), 1.0);
  const double thresh = 1e-4;
  struct SeriesCell {
    cplx w, m;
  };
  std::vector<SeriesCell> series;
  std::vector<cplx> P(D * D);
  cplx p_sum(0.0, 0.0);
  for (std::size_t j = 0; j < D; ++j)
    for (std::size_t k = 0; k < D; ++k) {
      const cplx w = c[j] * std::conj(c[k]);
      const cplx m = im.lam[j] + std::conj(im.lam[k]);
      if (std::abs(m) * t_max < thresh) {
        P[j * D + k] = cplx(0.0, 0.0);
        if (std::abs(w) > 0.0) series.push_back({w, m});
      } else {
        const cplx p = w / m;
        P[j * D + k] = p;
        p_sum += p;
      }
    }

  Trajectory out;
  out.times = grid;
  out.flux.resize(grid.size());
  out.accumulated.resize(grid.size());
  out.kappa_n.resize(grid.size());
  out.populations.assign(im.layout.n_levels, std::vector<double>(grid.size()));

  std::vector<cplx> u(D), pu(D), xe(D);
  if (cfg.keep_states) out.states.reserve(grid.size());
  double acc_floor = 0.0;  // the integral of |amp|^2 is non-decreasing; clip
                           // the ~1e-12 cancellation noise of the pairwise sum
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double T = grid[gi];
    for (std::size_t k = 0; k < D; ++k) u[k] = std::exp(im.lam[k] * T);

    // flux and linear observables
    cplx amp(0.0, 0.0);
    for (std::size_t k = 0; k < D; ++k) {
      xe[k] = x[k] * u[k];
      amp += im.amp_row[k] * xe[k];
    }
    out.flux[gi] = im.kappa * std::norm(amp);
    out.kappa_n[gi] = im.kappa * kern.zdotu(im.n_row.data(), xe.data(), D).real();
    for (std::size_t lvl = 0; lvl < im.pop_rows.size(); ++lvl)
      out.populations[lvl][gi] =
          kern.zdotu(im.pop_rows[lvl].data(), xe.data(), D).real();

    // accumulated counts: kappa * Re( u^T P conj(u) - p_sum + series )
    for (std::size_t j = 0; j < D; ++j)
      pu[j] = kern.zdotc(P.data() + j * D, u.data(), D);
    cplx acc = kern.zdotu(u.data(), pu.data(), D) - p_sum;
    for (const auto& s : series) {
      const cplx mt = s.m * T;
      // phi = T (1 + mT/2 + (mT)^2/6 + (mT)^3/24), |mT| < 1e-4
      acc += s.w * T * (1.0 + mt * (0.5 + mt * (1.0 / 6.0 + mt / 24.0)));
    }
    acc_floor = std::max(acc_floor, im.kappa * acc.real());
    out.accumulated[gi] = acc_floor;

    if (cfg.keep_states) {
      std::vector<cplx> vrho(D, cplx(0.0, 0.0));
      for (std::size_t k = 0; k < D; ++k)
        if (xe[k] != cplx(0.0, 0.0))
          kern.zaxpy(vrho.data(), xe[k], im.V.data() + k * D, D);
      Operator rho(d);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) rho(i, j) = vrho[i + j * d];
      out.states.push_back(std::move(rho));
    }
  }

  // final state: vec rho(T) = V (x ∘ exp(lam T))
  {
    const double T = grid.back();
    std::vector<cplx> vrho(D, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < D; ++k) {
      const cplx xk = x[k] * std::exp(im.lam[k] * T);
      if (xk != cplx(0.0, 0.0))
        kern.zaxpy(vrho.data(), xk, im.V.data() + k * D, D);
    }
    Operator rho(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) rho(i, j) = vrho[i + j * d];
    out.final_rho = rho;
  }
  return out;
}

Trajectory evolve_spectral(const LindbladSystem& sys, const Operator& rho0,
                           const IntegratorConfig& cfg) {
  return SpectralPropagator(sys).propagate(rho0, cfg);
}

}  // namespace readout
