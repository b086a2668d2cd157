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

// AVX2/FMA kernels. One __m256d holds two complex doubles; complex products
// use the fmaddsub/fmsubadd interleave pattern. Compiled with -mavx2 -mfma,
// selected at runtime (see kernels.cpp).

#include "readout/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace readout::kernels {

namespace {

// [re0,im0,re1,im1] -> [im0,re0,im1,re1]
inline __m256d swap_ri(__m256d v) { return _mm256_permute_pd(v, 0x5); }

// acc1 += b*ar, acc2 += swap(b)*ai; combined later with addsub so that
// addsub(acc1, acc2) equals sum of complex products a*b.
inline void cplx_fma_split(__m256d b, __m256d ar, __m256d ai,
                           __m256d& acc1, __m256d& acc2) {
  acc1 = _mm256_fmadd_pd(b, ar, acc1);
  acc2 = _mm256_fmadd_pd(swap_ri(b), ai, acc2);
}

void zgemm_kernel_avx2(cplx* c, const cplx* a, const cplx* b,
                       std::size_t m, std::size_t k, std::size_t n,
                       bool accumulate) {
  const double* bd = reinterpret_cast<const double*>(b);
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = reinterpret_cast<double*>(c + i * n);
    const cplx* arow = a + i * k;
    std::size_t j = 0;
    // blocks of 8 complex (4 ymm accumulator pairs)
    for (; j + 8 <= n; j += 8) {
      __m256d s10, s11, s12, s13, s20, s21, s22, s23;
      if (accumulate) {
        s10 = _mm256_loadu_pd(crow + 2 * j + 0);
        s11 = _mm256_loadu_pd(crow + 2 * j + 4);
        s12 = _mm256_loadu_pd(crow + 2 * j + 8);
        s13 = _mm256_loadu_pd(crow + 2 * j + 12);
      } else {
        s10 = s11 = s12 = s13 = _mm256_setzero_pd();
      }
      s20 = s21 = s22 = s23 = _mm256_setzero_pd();
      for (std::size_t l = 0; l < k; ++l) {
        const cplx ail = arow[l];
        if (ail.real() == 0.0 && ail.imag() == 0.0) continue;
        const __m256d ar = _mm256_set1_pd(ail.real());
        const __m256d ai = _mm256_set1_pd(ail.imag());
        const double* brow = bd + 2 * (l * n + j);
        cplx_fma_split(_mm256_loadu_pd(brow + 0), ar, ai, s10, s20);
        cplx_fma_split(_mm256_loadu_pd(brow + 4), ar, ai, s11, s21);
        cplx_fma_split(_mm256_loadu_pd(brow + 8), ar, ai, s12, s22);
        cplx_fma_split(_mm256_loadu_pd(brow + 12), ar, ai, s13, s23);
      }
      _mm256_storeu_pd(crow + 2 * j + 0, _mm256_addsub_pd(s10, s20));
      _mm256_storeu_pd(crow + 2 * j + 4, _mm256_addsub_pd(s11, s21));
      _mm256_storeu_pd(crow + 2 * j + 8, _mm256_addsub_pd(s12, s22));
      _mm256_storeu_pd(crow + 2 * j + 12, _mm256_addsub_pd(s13, s23));
    }
    for (; j + 2 <= n; j += 2) {
      __m256d s1 = accumulate ? _mm256_loadu_pd(crow + 2 * j) : _mm256_setzero_pd();
      __m256d s2 = _mm256_setzero_pd();
      for (std::size_t l = 0; l < k; ++l) {
        const cplx ail = arow[l];
        if (ail.real() == 0.0 && ail.imag() == 0.0) continue;
        cplx_fma_split(_mm256_loadu_pd(bd + 2 * (l * n + j)),
                       _mm256_set1_pd(ail.real()), _mm256_set1_pd(ail.imag()),
                       s1, s2);
      }
      _mm256_storeu_pd(crow + 2 * j, _mm256_addsub_pd(s1, s2));
    }
    if (j < n) {  // odd trailing column
      cplx acc = accumulate ? c[i * n + j] : cplx(0.0, 0.0);
      for (std::size_t l = 0; l < k; ++l) acc += arow[l] * b[l * n + j];
      c[i * n + j] = acc;
    }
  }
}

void zgemm_set_avx2(cplx* c, const cplx* a, const cplx* b,
                    std::size_t m, std::size_t k, std::size_t n) {
  zgemm_kernel_avx2(c, a, b, m, k, n, false);
}

void zgemm_acc_avx2(cplx* c, const cplx* a, const cplx* b,
                    std::size_t m, std::size_t k, std::size_t n) {
  zgemm_kernel_avx2(c, a, b, m, k, n, true);
}

void zaxpy_avx2(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  double* yd = reinterpret_cast<double*>(y);
  const double* xd = reinterpret_cast<const double*>(x);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d t = _mm256_mul_pd(swap_ri(xv), ai);
    const __m256d prod = _mm256_fmaddsub_pd(xv, ar, t);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Horizontal reduction of a [re,im,re,im] accumulator to one complex.
inline cplx hsum_cplx(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  alignas(16) double out[2];
  _mm_store_pd(out, s);
  return {out[0], out[1]};
}

cplx zdotc_avx2(const cplx* a, const cplx* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const double* ad = reinterpret_cast<const double*>(a);
  const double* bd = reinterpret_cast<const double*>(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d u = _mm256_loadu_pd(ad + 2 * i);
    const __m256d v = _mm256_loadu_pd(bd + 2 * i);
    const __m256d vre = _mm256_movedup_pd(v);           // [vr,vr,...]
    const __m256d vim = _mm256_permute_pd(v, 0xF);      // [vi,vi,...]
    const __m256d t = _mm256_mul_pd(swap_ri(u), vim);
    acc = _mm256_add_pd(acc, _mm256_fmsubadd_pd(u, vre, t));
  }
  cplx s = hsum_cplx(acc);
  for (; i < n; ++i) s += a[i] * std::conj(b[i]);
  return s;
}

cplx zdotu_avx2(const cplx* a, const cplx* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const double* ad = reinterpret_cast<const double*>(a);
  const double* bd = reinterpret_cast<const double*>(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d u = _mm256_loadu_pd(ad + 2 * i);
    const __m256d v = _mm256_loadu_pd(bd + 2 * i);
    const __m256d vre = _mm256_movedup_pd(v);
    const __m256d vim = _mm256_permute_pd(v, 0xF);
    const __m256d t = _mm256_mul_pd(swap_ri(u), vim);
    acc = _mm256_add_pd(acc, _mm256_fmaddsub_pd(u, vre, t));
  }
  cplx s = hsum_cplx(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void stage_combine_avx2(double* y, const double* x, std::size_t n,
                        const double* coeff, const double* const* ks,
                        std::size_t nstage) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_loadu_pd(x + i);
    for (std::size_t s = 0; s < nstage; ++s)
      acc = _mm256_fmadd_pd(_mm256_set1_pd(coeff[s]), _mm256_loadu_pd(ks[s] + i), acc);
    _mm256_storeu_pd(y + i, acc);
  }
  for (; i < n; ++i) {
    double acc = x[i];
    for (std::size_t s = 0; s < nstage; ++s) acc += coeff[s] * ks[s][i];
    y[i] = acc;
  }
}

double error_norm_avx2(const double* err, const double* y0, const double* y1,
                       double atol, double rtol, std::size_t n) {
  const __m256d vatol = _mm256_set1_pd(atol);
  const __m256d vrtol = _mm256_set1_pd(rtol);
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a0 = _mm256_and_pd(_mm256_loadu_pd(y0 + i), absmask);
    const __m256d a1 = _mm256_and_pd(_mm256_loadu_pd(y1 + i), absmask);
    const __m256d sc = _mm256_fmadd_pd(vrtol, _mm256_max_pd(a0, a1), vatol);
    const __m256d q = _mm256_div_pd(_mm256_and_pd(_mm256_loadu_pd(err + i), absmask), sc);
    acc = _mm256_max_pd(acc, q);
  }
  alignas(32) double out[4];
  _mm256_store_pd(out, acc);
  double m = std::max(std::max(out[0], out[1]), std::max(out[2], out[3]));
  for (; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
    m = std::max(m, std::fabs(err[i]) / sc);
  }
  return m;
}

}  // namespace

const Backend* avx2_backend() {
#if defined(__GNUC__) || defined(__clang__)
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma"))
    return nullptr;
#endif
  static const Backend b = {zgemm_set_avx2, zgemm_acc_avx2, zaxpy_avx2,
                            zdotc_avx2,     zdotu_avx2,     stage_combine_avx2,
                            error_norm_avx2, "avx2"};
  return &b;
}

}  // namespace readout::kernels

#else  // non-x86

namespace readout::kernels {
const Backend* avx2_backend() { return nullptr; }
}  // namespace readout::kernels

#endif
