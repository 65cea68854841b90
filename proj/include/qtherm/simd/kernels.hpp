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

#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace qtherm::simd {

using cplx = std::complex<double>;

/// Instruction set a kernel table was compiled for.
enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// The inner loops every dense routine in the library funnels through.
/// All pointers refer to contiguous arrays of length n; x and y never alias.
struct KernelTable {
  Isa isa;
  /// sum_i x[i] * y[i]
  cplx (*dotu)(std::size_t n, const cplx* x, const cplx* y);
  /// sum_i conj(x[i]) * y[i]
  cplx (*dotc)(std::size_t n, const cplx* x, const cplx* y);
  /// sum_i x[i] * r[i] with r real
  cplx (*dot_real)(std::size_t n, const cplx* x, const double* r);
  /// y += a * x
  void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
  /// y += a * conj(x)
  void (*axpy_conj)(std::size_t n, cplx a, const cplx* x, cplx* y);
  /// Plane rotation of two real rows: x' = c x - s y, y' = s x + c y.
  void (*rot)(std::size_t n, double c, double s, double* x, double* y);
};

const KernelTable& scalar_kernels();

/// Null when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Table used by the library. Chosen once from the CPU features, unless the
/// environment variable QTHERM_ISA=scalar|avx2 says otherwise.
const KernelTable& kernels();

/// Overrides the active table for the rest of the process (tests, golden
/// runs). Returns false when the requested ISA is unavailable.
bool select_isa(Isa isa);

}  // namespace qtherm::simd
