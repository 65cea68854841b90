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

#include <cstddef>
#include <span>
#include <vector>

#include "qtherm/matrix.hpp"

namespace qtherm {

/// Positive semidefinite, unit-trace Hermitian matrix.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  /// Full validation: Hermitian (1e-12 relative), |tr - 1| <= 1e-10,
  /// smallest eigenvalue >= -1e-10.
  static DensityMatrix from_matrix(ComplexMatrix m);
  /// Checks Hermiticity and trace only; for outputs of operations that are
  /// positive by construction.
  static DensityMatrix from_trusted(ComplexMatrix m);
  static DensityMatrix pure(std::span<const cplx> psi);
  static DensityMatrix diagonal(std::span<const double> probabilities);
  static DensityMatrix maximally_mixed(std::size_t dim);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t dimension() const noexcept { return m_.rows(); }
  std::vector<double> eigenvalues() const;

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix tensor_power(const DensityMatrix& a, std::size_t n);

/// Partial trace over every subsystem not listed in `keep`. Subsystem 0 is
/// the most significant tensor factor (kron order); kept subsystems retain
/// their relative order.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);
/// Same on a raw square matrix (no state invariants assumed).
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

/// Sum of singular values; sum of |eigenvalues| on the Hermitian path.
double trace_norm(const ComplexMatrix& a);
/// (1/2) ||rho - sigma||_1
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// ||sqrt(rho) sqrt(sigma)||_1, clamped to [0, 1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// 1 - F <= (1/2)||rho - sigma||_1 <= sqrt(1 - F^2), each with 1e-9 slack.
bool check_fuchs_van_de_graaf(const DensityMatrix& rho, const DensityMatrix& sigma);

/// ||[A, B]||_F
double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qtherm
