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
#include <cstdint>
#include <vector>

#include "qtherm/matrix.hpp"
#include "qtherm/spectral.hpp"

namespace qtherm {

// Spin-1/2 chain conventions: site i is bit i of the basis index (site 0 is
// the least significant bit). Bit value 0 is spin up, sigma^z |up> = +|up>,
// so the local basis matches the Pauli-Z eigenbasis diag(+1, -1).

enum class Boundary { periodic, open };

struct ChainSpec {
  int sites = 10;
  double disorder = 0.0;  // dimensionless disorder strength
  Boundary boundary = Boundary::periodic;
  std::uint64_t seed = 0;
  double coupling = 1.0;  // 0 removes every bond (diagnostic mode)

  void validate() const;
};

inline constexpr int kMinSites = 2;
inline constexpr int kMaxSites = 14;

/// One draw of the random fields h_i in [-1, 1].
struct DisorderRealization {
  ChainSpec spec;
  std::vector<double> fields;

  /// Fields from the splitmix64 stream derive_seed(spec.seed, index).
  static DisorderRealization draw(const ChainSpec& spec, std::uint64_t index);
  /// Explicit fields (tests, diagnostics); each must lie in [-1, 1].
  static DisorderRealization with_fields(const ChainSpec& spec, std::vector<double> fields);
};

/// Basis states of fixed total magnetization M = (#up - #down).
struct SectorBasis {
  int sites = 0;
  int magnetization = 0;
  std::vector<std::uint32_t> states;  // ascending
  std::vector<std::int32_t> lookup;   // full index -> position, -1 outside

  std::size_t dimension() const noexcept { return states.size(); }
  std::int32_t index_of(std::uint32_t state) const { return lookup[state]; }
};

int magnetization_of(std::uint32_t state, int sites);
SectorBasis sector_basis(int sites, int magnetization);
/// All sectors ordered by decreasing magnetization (M = L, L-2, ..., -L).
std::vector<SectorBasis> all_sectors(int sites);

/// Contiguous window of sites [start, start + size), wrapping modulo L.
struct Region {
  int start = 0;
  int size = 1;
};

/// Bytes a dense 2^L x 2^L complex matrix needs.
std::size_t dense_operator_bytes(int sites);
inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{1} << 30;

/// sum over bonds of J (XX + YY + ZZ) + Delta sum_i h_i Z_i on the full space.
HermitianOperator build_chain_hamiltonian(const DisorderRealization& real,
                                          std::size_t memory_budget = kDefaultMemoryBudget);

/// The chain Hamiltonian restricted to one magnetization sector, built
/// directly from the bond list (never touches the full space).
ComplexMatrix sector_hamiltonian(const DisorderRealization& real, const SectorBasis& basis);

/// Total sigma^z on 2^L states (diagonal).
ComplexMatrix total_sz(int sites);

struct SectorBlock {
  SectorBasis basis;
  HermitianOperator block;
};

/// Splits a dense Hamiltonian into magnetization blocks. Rejects operators
/// that do not commute with total sigma^z.
std::vector<SectorBlock> build_sector_blocks(const HermitianOperator& h, int sites);

/// normalize(|up down up ...> + |down up down ...> + |up down ... with the last
/// spin flipped>), as a real vector on the full 2^L space.
Vector neel_variant_state(int sites);

/// H_R: the |R| - 1 bonds interior to R plus the |R| field terms, on 2^|R|
/// states with the region's first site as bit 0.
HermitianOperator reduced_hamiltonian(const DisorderRealization& real, const Region& region);

/// acc += weight * Tr_{R^c} |phi><phi| for a full-space vector phi. acc must be
/// 2^|R| square; the region's first site maps to bit 0 of the result.
void accumulate_region_state(std::span<const cplx> phi, int sites, const Region& region, double weight,
                             ComplexMatrix& acc);

/// Per-sector eigensystems of a chain plus the merged global level list.
class ChainSpectrum {
 public:
  struct Level {
    double energy;
    std::uint32_t sector;
    std::uint32_t index;  // column in that sector's eigenvector matrix
  };
  struct Sector {
    SectorBasis basis;
    SpectralDecomposition spectrum;
  };

  explicit ChainSpectrum(const DisorderRealization& real, double tol_deg = -1.0);

  const DisorderRealization& realization() const noexcept { return real_; }
  int sites() const noexcept { return real_.spec.sites; }
  std::size_t dimension() const noexcept { return levels_.size(); }
  const std::vector<Sector>& sectors() const noexcept { return sectors_; }
  /// Ascending in energy; ties broken by (sector, index).
  const std::vector<Level>& levels() const noexcept { return levels_; }
  /// Degeneracy groups over levels() (cross-sector).
  const std::vector<DegenerateGroup>& groups() const noexcept { return groups_; }
  double tol_deg() const noexcept { return tol_deg_; }
  std::vector<double> energies() const;

  /// Adds `scale` times eigenvector `level` into the full-space vector `out`.
  void accumulate_eigenvector(std::size_t level, cplx scale, std::span<cplx> out) const;
  /// <E_k|psi> for every level k.
  Vector overlaps(std::span<const cplx> psi) const;

 private:
  DisorderRealization real_;
  std::vector<Sector> sectors_;
  std::vector<Level> levels_;
  std::vector<DegenerateGroup> groups_;
  double tol_deg_ = 0.0;
};

}  // namespace qtherm
