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

#include "qtherm/random_ops.hpp"

#include <cmath>

#include "qtherm/error.hpp"

namespace qtherm {

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, SplitMix64& rng) {
  ComplexMatrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = rng.complex_normal();
  return g;
}

ComplexMatrix random_hermitian(std::size_t dim, SplitMix64& rng) {
  ComplexMatrix g = ginibre(dim, dim, rng);
  g.symmetrize();
  return g;
}

ComplexMatrix haar_unitary(std::size_t dim, SplitMix64& rng) {
  // Columns of the Ginibre matrix, orthonormalised in order (modified
  // Gram-Schmidt, two passes). Positive R diagonal makes the result Haar.
  ComplexMatrix gt = ginibre(dim, dim, rng);  // row j plays column j
  for (std::size_t j = 0; j < dim; ++j) {
    auto col = gt.row(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        const auto prev = gt.row(k);
        const cplx proj = inner(prev, col);
        for (std::size_t i = 0; i < dim; ++i) col[i] -= proj * prev[i];
      }
    }
    const double nrm = norm(col);
    if (nrm < 1e-300) throw ConvergenceError("haar_unitary: degenerate Gaussian sample");
    for (auto& z : col) z /= nrm;
  }
  return gt.transpose();
}

Vector random_pure_state(std::size_t dim, SplitMix64& rng) {
  Vector v(dim);
  for (auto& z : v) z = rng.complex_normal();
  const double nrm = norm(v);
  for (auto& z : v) z /= nrm;
  return v;
}

DensityMatrix random_density_matrix(std::size_t dim, SplitMix64& rng, std::size_t rank) {
  if (rank == 0) rank = dim;
  const ComplexMatrix g = ginibre(dim, rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  const double tr = rho.trace().real();
  rho *= 1.0 / tr;
  return DensityMatrix::from_trusted(std::move(rho));
}

std::vector<double> random_probabilities(std::size_t dim, SplitMix64& rng) {
  std::vector<double> p(dim);
  double total = 0.0;
  for (auto& x : p) {
    x = rng.exponential(1.0);
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

}  // namespace qtherm
