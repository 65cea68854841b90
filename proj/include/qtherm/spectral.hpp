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
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "qtherm/matrix.hpp"

namespace qtherm {

/// Contiguous index range [begin, end) of numerically degenerate eigenvalues.
struct DegenerateGroup {
  std::size_t begin;
  std::size_t end;
  std::size_t size() const noexcept { return end - begin; }
};

/// Eigen-decomposition A = V diag(values) V^dagger of a Hermitian matrix,
/// with eigenvalues ascending and eigenvectors as the columns of V.
struct SpectralDecomposition {
  std::vector<double> values;
  ComplexMatrix vectors;
  std::vector<DegenerateGroup> groups;
  double tol_deg = 0.0;

  std::size_t dimension() const noexcept { return values.size(); }
  /// V diag(f(values)) V^dagger
  ComplexMatrix apply(const std::function<double(double)>& f) const;
  /// sum_k w_k v_k v_k^dagger
  ComplexMatrix weighted_sum(std::span<const double> weights) const;
  /// Projector onto the eigenspace of a group.
  ComplexMatrix projector(const DegenerateGroup& g) const;
};

/// Single-linkage clustering of ascending values: a new group starts when the
/// gap to the previous value exceeds tol.
std::vector<DegenerateGroup> group_degenerate(const std::vector<double>& ascending, double tol);

/// Default clustering tolerance: 1e-10 times the spectral range.
double default_degeneracy_tolerance(const std::vector<double>& ascending);

/// Relative Hermiticity tolerance applied on input to the eigensolvers.
inline constexpr double kHermitianTolerance = 1e-12;

/// Householder tridiagonalisation followed by implicit QL. Rejects inputs
/// whose asymmetry exceeds 1e-12 * max|A|. tol_deg < 0 selects the default.
SpectralDecomposition eig_hermitian(const ComplexMatrix& a, double tol_deg = -1.0);

/// Eigenvalues only (ascending); skips all eigenvector work.
std::vector<double> eigvalsh(const ComplexMatrix& a);

/// Hermitian matrix with a lazily computed, shared spectral decomposition.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  /// Validates Hermiticity (relative tolerance 1e-12) and symmetrises.
  explicit HermitianOperator(ComplexMatrix m);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dimension() const noexcept { return matrix_.rows(); }
  const SpectralDecomposition& spectrum() const;

 private:
  struct Cache;
  ComplexMatrix matrix_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace qtherm
