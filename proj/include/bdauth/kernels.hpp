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

#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace bdauth::kernels {

using cplx = std::complex<double>;

/// Table of the data-parallel inner loops used by the baseband chain.
///
/// Every entry has a portable scalar reference implementation; vectorized
/// variants must agree with it elementwise (bit-exact for the pure
/// elementwise kernels, within reassociation error for reductions).
struct KernelSet {
  std::string_view name;

  /// Returns sum |x[i]|^2.
  double (*power_sum)(const cplx* x, std::size_t n);

  /// out[i] += gain * in[i]
  void (*accumulate_scaled)(cplx* out, const cplx* in, cplx gain, std::size_t n);

  /// out[i] = scale * in[i]
  void (*scale_real)(cplx* out, const cplx* in, double scale, std::size_t n);

  /// out[i] = a[i] - b[i]
  void (*subtract)(cplx* out, const cplx* a, const cplx* b, std::size_t n);
};

const KernelSet& scalar_kernels();

/// nullptr when the build or the host CPU lacks AVX2/FMA.
const KernelSet* avx2_kernels();

/// Kernel set picked once at first use: AVX2 when available, scalar otherwise.
/// Setting BDAUTH_FORCE_SCALAR=1 in the environment pins the scalar set.
const KernelSet& active_kernels();

}  // namespace bdauth::kernels
