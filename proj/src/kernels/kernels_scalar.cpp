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

#include "bdauth/kernels.hpp"

namespace bdauth::kernels {
namespace {

double power_sum_scalar(const cplx* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  }
  return acc;
}

// Written out by hand so the rounding matches the fused AVX2 path closely
// and std::complex's NaN-recovery branch stays out of the loop.
void accumulate_scaled_scalar(cplx* out, const cplx* in, cplx gain, std::size_t n) {
  const double gr = gain.real();
  const double gi = gain.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = in[i].real();
    const double xi = in[i].imag();
    out[i] = cplx(out[i].real() + (gr * xr - gi * xi), out[i].imag() + (gr * xi + gi * xr));
  }
}

void scale_real_scalar(cplx* out, const cplx* in, double scale, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = cplx(scale * in[i].real(), scale * in[i].imag());
  }
}

void subtract_scalar(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = cplx(a[i].real() - b[i].real(), a[i].imag() - b[i].imag());
  }
}

constexpr KernelSet kScalar{
    "scalar", &power_sum_scalar, &accumulate_scaled_scalar, &scale_real_scalar, &subtract_scalar,
};

}  // namespace

const KernelSet& scalar_kernels() { return kScalar; }

}  // namespace bdauth::kernels
