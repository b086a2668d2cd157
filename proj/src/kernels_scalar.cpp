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

// Reference kernels. Plain loops, no intrinsics; the AVX2 variants are
// equivalence-tested against these.

#include "readout/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace readout::kernels {

namespace {

void zgemm_set_scalar(cplx* c, const cplx* a, const cplx* b,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    cplx* crow = c + i * n;
    std::fill(crow, crow + n, cplx(0.0, 0.0));
    for (std::size_t l = 0; l < k; ++l) {
      const cplx ail = a[i * k + l];
      if (ail == cplx(0.0, 0.0)) continue;
      const cplx* brow = b + l * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += ail * brow[j];
    }
  }
}

void zgemm_acc_scalar(cplx* c, const cplx* a, const cplx* b,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    cplx* crow = c + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const cplx ail = a[i * k + l];
      if (ail == cplx(0.0, 0.0)) continue;
      const cplx* brow = b + l * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += ail * brow[j];
    }
  }
}

void zaxpy_scalar(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

cplx zdotc_scalar(const cplx* a, const cplx* b, std::size_t n) {
  cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) s += a[i] * std::conj(b[i]);
  return s;
}

cplx zdotu_scalar(const cplx* a, const cplx* b, std::size_t n) {
  cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void stage_combine_scalar(double* y, const double* x, std::size_t n,
                          const double* coeff, const double* const* ks,
                          std::size_t nstage) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = x[i];
    for (std::size_t s = 0; s < nstage; ++s) acc += coeff[s] * ks[s][i];
    y[i] = acc;
  }
}

double error_norm_scalar(const double* err, const double* y0, const double* y1,
                         double atol, double rtol, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
    m = std::max(m, std::fabs(err[i]) / sc);
  }
  return m;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend b = {zgemm_set_scalar, zgemm_acc_scalar, zaxpy_scalar,
                            zdotc_scalar,     zdotu_scalar,     stage_combine_scalar,
                            error_norm_scalar, "scalar"};
  return b;
}

}  // namespace readout::kernels
