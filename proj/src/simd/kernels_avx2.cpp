// Copyright 2026 The qtherm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <immintrin.h>

#include "qtherm/simd/kernels.hpp"

// AVX2/FMA variants. One __m256d holds two complex values laid out as
// [re0, im0, re1, im1]. Tails fall back to the scalar formulas.

namespace qtherm::simd {
namespace {

inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }
inline __m256d swap_re_im(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

inline double lane_sum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

inline double lane_alt_sum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] - t[1]) + (t[2] - t[3]);
}

cplx dotu_avx2(std::size_t n, const cplx* x, const cplx* y) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = load2(x + i);
    const __m256d yv = load2(y + i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(xv, swap_re_im(yv), acc_im);
  }
  double re = lane_alt_sum(acc_re);
  double im = lane_sum(acc_im);
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
  }
  return {re, im};
}

cplx dotc_avx2(std::size_t n, const cplx* x, const cplx* y) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = load2(x + i);
    const __m256d yv = load2(y + i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(xv, swap_re_im(yv), acc_im);
  }
  double re = lane_sum(acc_re);
  double im = lane_alt_sum(acc_im);
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

cplx dot_real_avx2(std::size_t n, const cplx* x, const double* r) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m128d rr = _mm_loadu_pd(r + i);
    const __m256d rv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(rr), 0x50);
    acc = _mm256_fmadd_pd(load2(x + i), rv, acc);
  }
  alignas(32) double t[4];
  _mm256_store_pd(t, acc);
  double re = t[0] + t[2];
  double im = t[1] + t[3];
  for (; i < n; ++i) {
    re += x[i].real() * r[i];
    im += x[i].imag() * r[i];
  }
  return {re, im};
}

void axpy_avx2(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = load2(x + i);
    const __m256d cross = _mm256_mul_pd(ai, swap_re_im(xv));
    const __m256d prod = _mm256_fmaddsub_pd(ar, xv, cross);
    store2(y + i, _mm256_add_pd(load2(y + i), prod));
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = {y[i].real() + (a.real() * xr - a.imag() * xi), y[i].imag() + (a.real() * xi + a.imag() * xr)};
  }
}

void axpy_conj_avx2(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  const __m256d flip_im = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_xor_pd(load2(x + i), flip_im);
    const __m256d cross = _mm256_mul_pd(ai, swap_re_im(xv));
    const __m256d prod = _mm256_fmaddsub_pd(ar, xv, cross);
    store2(y + i, _mm256_add_pd(load2(y + i), prod));
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = -x[i].imag();
    y[i] = {y[i].real() + (a.real() * xr - a.imag() * xi), y[i].imag() + (a.real() * xi + a.imag() * xr)};
  }
}

void rot_avx2(std::size_t n, double c, double s, double* x, double* y) {
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_fmsub_pd(cv, xv, _mm256_mul_pd(sv, yv)));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(sv, xv, _mm256_mul_pd(cv, yv)));
  }
  for (; i < n; ++i) {
    const double xv = x[i], yv = y[i];
    x[i] = c * xv - s * yv;
    y[i] = s * xv + c * yv;
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{Isa::avx2,   dotu_avx2,      dotc_avx2, dot_real_avx2,
                                 axpy_avx2, axpy_conj_avx2, rot_avx2};
  return table;
}

}  // namespace qtherm::simd
