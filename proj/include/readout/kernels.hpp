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

#include <complex>
#include <cstddef>
#include <string>

namespace readout::kernels {

using cplx = std::complex<double>;

// Dense complex inner loops used by the Lindblad right-hand side, the RK
// stage arithmetic and the spectral propagator. Each kernel has a scalar
// reference implementation and an AVX2/FMA variant; the active backend is
// chosen once at startup from CPUID (override with READOUT_SIM_FORCE_SCALAR=1
// or select_backend()).

struct Backend {
  // C (m x n) = A (m x k) * B (k x n), row-major, contiguous.
  void (*zgemm_set)(cplx* c, const cplx* a, const cplx* b,
                    std::size_t m, std::size_t k, std::size_t n);
  // C += A * B
  void (*zgemm_acc)(cplx* c, const cplx* a, const cplx* b,
                    std::size_t m, std::size_t k, std::size_t n);
  // y += alpha * x
  void (*zaxpy)(cplx* y, cplx alpha, const cplx* x, std::size_t n);
  // sum_i a[i] * conj(b[i])
  cplx (*zdotc)(const cplx* a, const cplx* b, std::size_t n);
  // sum_i a[i] * b[i]
  cplx (*zdotu)(const cplx* a, const cplx* b, std::size_t n);
  // y[i] = x[i] + sum_j coeff[j] * ks[j][i], real coefficients on the
  // interleaved real view (RK tableau weights are real).
  void (*stage_combine)(double* y, const double* x, std::size_t n,
                        const double* coeff, const double* const* ks,
                        std::size_t nstage);
  // max_i |err[i]| / (atol + rtol*max(|y0[i]|,|y1[i]|)) over the real view;
  // the embedded-pair error measure (scaled max norm).
  double (*error_norm)(const double* err, const double* y0, const double* y1,
                       double atol, double rtol, std::size_t n);
  const char* name;
};

// Active backend (set at static init, or by select_backend / env var).
const Backend& active();

// Force a backend by name ("scalar", "avx2"). Returns false if unavailable.
bool select_backend(const std::string& name);

// Individual backends, exposed for equivalence tests.
const Backend& scalar_backend();
const Backend* avx2_backend();  // nullptr when not supported on this CPU

}  // namespace readout::kernels
