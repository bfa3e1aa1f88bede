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

#include <cstdlib>
#include <string_view>

#include "bdauth/kernels.hpp"

namespace bdauth::kernels {

#if defined(BDAUTH_HAVE_AVX2)
const KernelSet* avx2_kernels_unchecked();
#endif

const KernelSet* avx2_kernels() {
#if defined(BDAUTH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? avx2_kernels_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelSet& active_kernels() {
  static const KernelSet& chosen = [] () -> const KernelSet& {
    if (const char* force = std::getenv("BDAUTH_FORCE_SCALAR");
        force != nullptr && std::string_view(force) != "0") {
      return scalar_kernels();
    }
    if (const KernelSet* k = avx2_kernels()) return *k;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace bdauth::kernels
