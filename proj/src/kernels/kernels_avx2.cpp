// Copyright 2026 The bdauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include "bdauth/kernels.hpp"

namespace bdauth::kernels {
namespace {

// Two interleaved complex doubles per register: [re0, im0, re1, im1].
inline const double* as_doubles(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* as_doubles(cplx* p) { return reinterpret_cast<double*>(p); }

double power_sum_avx2(const cplx* x, std::size_t n) {
  const double* d = as_doubles(x);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(d + 2 * i);
    const __m256d b = _mm256_loadu_pd(d + 2 * i + 4);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(a, a));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(b, b));
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(d + 2 * i);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(a, a));
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc0);
  const __m128d hi = _mm256_extractf128_pd(acc0, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  double total = _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
  for (; i < n; ++i) {
    total += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  }
  return total;
}

// No FMA on purpose: mul, mul, addsub, add rounds exactly like the scalar loop.
void accumulate_scaled_avx2(cplx* out, const cplx* in, cplx gain, std::size_t n) {
  const double* src = as_doubles(in);
  double* dst = as_doubles(out);
  const __m256d gr = _mm256_set1_pd(gain.real());
  const __m256d gi = _mm256_set1_pd(gain.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d x = _mm256_loadu_pd(src + 2 * i);
    const __m256d swapped = _mm256_permute_pd(x, 0b0101);
    const __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(gr, x), _mm256_mul_pd(gi, swapped));
    _mm256_storeu_pd(dst + 2 * i, _mm256_add_pd(_mm256_loadu_pd(dst + 2 * i), prod));
  }
  for (; i < n; ++i) {
    const double xr = in[i].real();
    const double xi = in[i].imag();
    out[i] = cplx(out[i].real() + (gain.real() * xr - gain.imag() * xi),
                  out[i].imag() + (gain.real() * xi + gain.imag() * xr));
  }
}

void scale_real_avx2(cplx* out, const cplx* in, double scale, std::size_t n) {
  const double* src = as_doubles(in);
  double* dst = as_doubles(out);
  const __m256d s = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(dst + 2 * i, _mm256_mul_pd(s, _mm256_loadu_pd(src + 2 * i)));
  }
  for (; i < n; ++i) {
    out[i] = cplx(scale * in[i].real(), scale * in[i].imag());
  }
}

void subtract_avx2(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = as_doubles(a);
  const double* pb = as_doubles(b);
  double* dst = as_doubles(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(dst + 2 * i,
                     _mm256_sub_pd(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i)));
  }
  for (; i < n; ++i) {
    out[i] = cplx(a[i].real() - b[i].real(), a[i].imag() - b[i].imag());
  }
}

constexpr KernelSet kAvx2{
    "avx2", &power_sum_avx2, &accumulate_scaled_avx2, &scale_real_avx2, &subtract_avx2,
};

}  // namespace

const KernelSet* avx2_kernels_unchecked() { return &kAvx2; }

}  // namespace bdauth::kernels
