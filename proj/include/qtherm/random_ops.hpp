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
#include <vector>

#include "qtherm/matrix.hpp"
#include "qtherm/rng.hpp"
#include "qtherm/states.hpp"

namespace qtherm {

/// Entries i.i.d. complex Gaussian.
ComplexMatrix ginibre(std::size_t rows, std::size_t cols, SplitMix64& rng);
/// (G + G^dagger) / 2 for a Ginibre G.
ComplexMatrix random_hermitian(std::size_t dim, SplitMix64& rng);
/// Haar unitary: Gram-Schmidt QR of a Ginibre matrix with positive R diagonal.
ComplexMatrix haar_unitary(std::size_t dim, SplitMix64& rng);
/// Normalised complex Gaussian vector.
Vector random_pure_state(std::size_t dim, SplitMix64& rng);
/// G G^dagger / tr for a dim x rank Ginibre G (rank 0 means full rank).
DensityMatrix random_density_matrix(std::size_t dim, SplitMix64& rng, std::size_t rank = 0);
/// Uniform point on the probability simplex (flat Dirichlet).
std::vector<double> random_probabilities(std::size_t dim, SplitMix64& rng);

}  // namespace qtherm
