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

#include "readout/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "readout/kernels.hpp"

namespace readout {

Operator::Operator(std::size_t dim, std::vector<cplx> entries)
    : dim_(dim), a_(std::move(entries)) {
  if (a_.size() != dim_ * dim_)
    throw std::invalid_argument("Operator: entry count does not match dim*dim");
}

Operator Operator::adjoint() const {
  Operator r(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      r(j, i) = std::conj((*this)(i, j));
  return r;
}

cplx Operator::trace() const {
  cplx t(0.0, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

Operator& Operator::operator+=(const Operator& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("Operator+: dimension mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

Operator& Operator::operator-=(const Operator& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("Operator-: dimension mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  for (auto& v : a_) v *= s;
  return *this;
}

Operator Operator::operator*(const Operator& o) const {
  if (o.dim_ != dim_) throw std::invalid_argument("Operator*: dimension mismatch");
  Operator r(dim_);
  kernels::active().zgemm_set(r.data(), data(), o.data(), dim_, dim_, dim_);
  return r;
}

double Operator::max_abs_diff(const Operator& o) const {
  if (o.dim_ != dim_) throw std::invalid_argument("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a_.size(); ++i)
    m = std::max(m, std::abs(a_[i] - o.a_[i]));
  return m;
}

double Operator::hermiticity_defect() const {
  double m = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return m;
}

Operator identity(std::size_t dim) {
  Operator r(dim);
  for (std::size_t i = 0; i < dim; ++i) r(i, i) = 1.0;
  return r;
}

Operator kron(const Operator& a, const Operator& b) {
  const std::size_t ad = a.dim(), bd = b.dim();
  Operator r(ad * bd);
  for (std::size_t i = 0; i < ad; ++i)
    for (std::size_t j = 0; j < ad; ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx(0.0, 0.0)) continue;
      for (std::size_t k = 0; k < bd; ++k)
        for (std::size_t l = 0; l < bd; ++l)
          r(i * bd + k, j * bd + l) = aij * b(k, l);
    }
  return r;
}

Operator annihilation(std::size_t n_fock) {
  if (n_fock < 2)
    throw std::invalid_argument("annihilation: n_fock must be >= 2, got " +
                                std::to_string(n_fock));
  Operator a(n_fock);
  for (std::size_t n = 1; n < n_fock; ++n)
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Operator transition(const SpaceLayout& layout, std::size_t from_level,
                    std::size_t to_level) {
  if (from_level >= layout.n_levels || to_level >= layout.n_levels)
    throw std::invalid_argument("transition: level index out of range");
  Operator proj(layout.n_levels);
  proj(to_level, from_level) = 1.0;
  return kron(proj, identity(layout.n_fock));
}

Operator cavity_annihilation(const SpaceLayout& layout) {
  return kron(identity(layout.n_levels), annihilation(layout.n_fock));
}

cplx expectation(const Operator& op, const Operator& rho) {
  if (op.dim() != rho.dim())
    throw std::invalid_argument("expectation: dimension mismatch");
  // Tr(op rho) = sum_ij op(i,j) rho(j,i)
  cplx s(0.0, 0.0);
  const std::size_t d = op.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) s += op(i, j) * rho(j, i);
  return s;
}

std::vector<double> hermitian_eigenvalues(const Operator& in) {
  const std::size_t n = in.dim();
  // symmetrize: (A + A^dag)/2 suppresses round-off asymmetry
  std::vector<cplx> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i * n + j] = 0.5 * (in(i, j) + std::conj(in(j, i)));

  auto at = [&](std::size_t i, std::size_t j) -> cplx& { return a[i * n + j]; };

  double scale = 0.0;
  for (const auto& v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return std::vector<double>(n, 0.0);

  const double tol = 1e-15 * scale;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(at(p, q)));
    if (off <= tol) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx g = at(p, q);
        const double absg = std::abs(g);
        if (absg <= tol) continue;
        const double alpha = at(p, p).real();
        const double beta = at(q, q).real();
        const cplx phase = g / absg;
        const double kap = (alpha - beta) / (2.0 * absg);
        const double t = (kap >= 0.0)
                             ? -1.0 / (kap + std::sqrt(1.0 + kap * kap))
                             : 1.0 / (-kap + std::sqrt(1.0 + kap * kap));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        // columns: (AJ)(i,p) = c A(i,p) - s conj(phase) A(i,q)
        //          (AJ)(i,q) = s phase A(i,p) + c A(i,q)
        for (std::size_t i = 0; i < n; ++i) {
          const cplx aip = at(i, p), aiq = at(i, q);
          at(i, p) = c * aip - s * std::conj(phase) * aiq;
          at(i, q) = s * phase * aip + c * aiq;
        }
        // rows: (J^H A)(p,:) = c A(p,:) - s phase A(q,:)
        //       (J^H A)(q,:) = s conj(phase) A(p,:) + c A(q,:)
        for (std::size_t j = 0; j < n; ++j) {
          const cplx apj = at(p, j), aqj = at(q, j);
          at(p, j) = c * apj - s * phase * aqj;
          at(q, j) = s * std::conj(phase) * apj + c * aqj;
        }
      }
    }
  }

  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

double min_hermitian_eigenvalue(const Operator& a) {
  return hermitian_eigenvalues(a).front();
}

Operator vacuum_state(const SpaceLayout& layout, std::size_t level) {
  if (level >= layout.n_levels)
    throw std::invalid_argument("vacuum_state: level index out of range");
  Operator rho(layout.dim());
  const std::size_t i = layout.index(level, 0);
  rho(i, i) = 1.0;
  return rho;
}

}  // namespace readout
