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

#include "qtherm/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "qtherm/error.hpp"
#include "qtherm/rng.hpp"
#include "qtherm/simd/kernels.hpp"

namespace qtherm {
namespace {

using Bond = std::pair<int, int>;

std::vector<Bond> chain_bonds(int sites, Boundary boundary) {
  std::vector<Bond> bonds;
  for (int i = 0; i + 1 < sites; ++i) bonds.emplace_back(i, i + 1);
  if (boundary == Boundary::periodic) bonds.emplace_back(sites - 1, 0);
  return bonds;
}

inline double spin_z(std::uint32_t state, int site) { return ((state >> site) & 1U) ? -1.0 : 1.0; }

double diagonal_energy(std::uint32_t state, const std::vector<Bond>& bonds, std::span<const double> field_terms,
                       double coupling) {
  double e = 0.0;
  for (const auto& [i, j] : bonds) e += coupling * spin_z(state, i) * spin_z(state, j);
  for (std::size_t i = 0; i < field_terms.size(); ++i) e += field_terms[i] * spin_z(state, static_cast<int>(i));
  return e;
}

// Dense Heisenberg-plus-field operator on `sites` spins.
ComplexMatrix dense_heisenberg(int sites, const std::vector<Bond>& bonds, std::span<const double> field_terms,
                               double coupling) {
  const std::size_t dim = std::size_t{1} << sites;
  ComplexMatrix h(dim, dim);
  for (std::uint32_t s = 0; s < dim; ++s) {
    h(s, s) += diagonal_energy(s, bonds, field_terms, coupling);
    for (const auto& [i, j] : bonds) {
      if (((s >> i) & 1U) == ((s >> j) & 1U)) continue;
      const std::uint32_t t = s ^ ((1U << i) | (1U << j));
      h(t, s) += 2.0 * coupling;  // XX + YY flips an anti-aligned pair
    }
  }
  return h;
}

}  // namespace

void ChainSpec::validate() const {
  if (sites < kMinSites || sites > kMaxSites) {
    throw InvalidArgument("ChainSpec: L = " + std::to_string(sites) + " outside [" + std::to_string(kMinSites) +
                          ", " + std::to_string(kMaxSites) + "]");
  }
  if (!(disorder >= 0.0) || !std::isfinite(disorder)) throw InvalidArgument("ChainSpec: disorder must be >= 0");
  if (!std::isfinite(coupling)) throw InvalidArgument("ChainSpec: coupling must be finite");
}

DisorderRealization DisorderRealization::draw(const ChainSpec& spec, std::uint64_t index) {
  spec.validate();
  SplitMix64 rng(derive_seed(spec.seed, index));
  std::vector<double> h(static_cast<std::size_t>(spec.sites));
  for (auto& x : h) x = rng.uniform(-1.0, 1.0);
  return {spec, std::move(h)};
}

DisorderRealization DisorderRealization::with_fields(const ChainSpec& spec, std::vector<double> fields) {
  spec.validate();
  if (fields.size() != static_cast<std::size_t>(spec.sites)) {
    throw InvalidArgument("DisorderRealization: expected " + std::to_string(spec.sites) + " fields");
  }
  for (double x : fields) {
    if (!(x >= -1.0 && x <= 1.0)) throw InvalidArgument("DisorderRealization: field outside [-1, 1]");
  }
  return {spec, std::move(fields)};
}

int magnetization_of(std::uint32_t state, int sites) { return sites - 2 * std::popcount(state); }

SectorBasis sector_basis(int sites, int magnetization) {
  if (sites < 1 || sites > kMaxSites) throw InvalidArgument("sector_basis: unsupported site count");
  if (std::abs(magnetization) > sites || (sites - magnetization) % 2 != 0) {
    throw InvalidArgument("sector_basis: no sector with M = " + std::to_string(magnetization) + " for L = " +
                          std::to_string(sites));
  }
  SectorBasis b;
  b.sites = sites;
  b.magnetization = magnetization;
  const std::uint32_t dim = 1U << sites;
  b.lookup.assign(dim, -1);
  for (std::uint32_t s = 0; s < dim; ++s) {
    if (magnetization_of(s, sites) == magnetization) {
      b.lookup[s] = static_cast<std::int32_t>(b.states.size());
      b.states.push_back(s);
    }
  }
  return b;
}

std::vector<SectorBasis> all_sectors(int sites) {
  std::vector<SectorBasis> out;
  for (int m = sites; m >= -sites; m -= 2) out.push_back(sector_basis(sites, m));
  return out;
}

std::size_t dense_operator_bytes(int sites) {
  const std::size_t dim = std::size_t{1} << sites;
  return dim * dim * sizeof(cplx);
}

HermitianOperator build_chain_hamiltonian(const DisorderRealization& real, std::size_t memory_budget) {
  const ChainSpec& spec = real.spec;
  spec.validate();
  const std::size_t bytes = dense_operator_bytes(spec.sites);
  if (bytes > memory_budget) {
    throw CapacityError("build_chain_hamiltonian: L = " + std::to_string(spec.sites) + " needs " +
                        std::to_string(bytes) + " bytes, budget is " + std::to_string(memory_budget));
  }
  std::vector<double> field_terms(real.fields.size());
  for (std::size_t i = 0; i < field_terms.size(); ++i) field_terms[i] = spec.disorder * real.fields[i];
  return HermitianOperator(dense_heisenberg(spec.sites, chain_bonds(spec.sites, spec.boundary), field_terms,
                                            spec.coupling));
}

ComplexMatrix sector_hamiltonian(const DisorderRealization& real, const SectorBasis& basis) {
  const ChainSpec& spec = real.spec;
  if (basis.sites != spec.sites) throw InvalidArgument("sector_hamiltonian: basis built for another chain length");
  const auto bonds = chain_bonds(spec.sites, spec.boundary);
  std::vector<double> field_terms(real.fields.size());
  for (std::size_t i = 0; i < field_terms.size(); ++i) field_terms[i] = spec.disorder * real.fields[i];

  const std::size_t dim = basis.dimension();
  ComplexMatrix h(dim, dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const std::uint32_t s = basis.states[a];
    h(a, a) += diagonal_energy(s, bonds, field_terms, spec.coupling);
    for (const auto& [i, j] : bonds) {
      if (((s >> i) & 1U) == ((s >> j) & 1U)) continue;
      const std::uint32_t t = s ^ ((1U << i) | (1U << j));
      h(static_cast<std::size_t>(basis.index_of(t)), a) += 2.0 * spec.coupling;
    }
  }
  return h;
}

ComplexMatrix total_sz(int sites) {
  const std::size_t dim = std::size_t{1} << sites;
  ComplexMatrix sz(dim, dim);
  for (std::uint32_t s = 0; s < dim; ++s) sz(s, s) = static_cast<double>(magnetization_of(s, sites));
  return sz;
}

std::vector<SectorBlock> build_sector_blocks(const HermitianOperator& h, int sites) {
  const std::size_t dim = std::size_t{1} << sites;
  if (h.dimension() != dim) {
    throw InvalidArgument("build_sector_blocks: operator dimension " + std::to_string(h.dimension()) +
                          " is not 2^" + std::to_string(sites));
  }
  const double comm = commutator(h.matrix(), total_sz(sites)).frobenius_norm();
  if (comm > 1e-12 * std::max(1.0, h.matrix().frobenius_norm())) {
    std::ostringstream msg;
    msg << "build_sector_blocks: operator does not conserve magnetization, ||[H, Sz]||_F = " << comm;
    throw InvalidArgument(msg.str());
  }
  std::vector<SectorBlock> blocks;
  for (auto& basis : all_sectors(sites)) {
    const std::size_t n = basis.dimension();
    ComplexMatrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b(i, j) = h.matrix()(basis.states[i], basis.states[j]);
    blocks.push_back({std::move(basis), HermitianOperator(std::move(b))});
  }
  return blocks;
}

Vector neel_variant_state(int sites) {
  if (sites < 3 || sites > kMaxSites) throw InvalidArgument("neel_variant_state: need 3 <= L <= 14");
  const std::size_t dim = std::size_t{1} << sites;
  std::uint32_t neel = 0;  // up on even sites, down on odd sites
  for (int i = 1; i < sites; i += 2) neel |= 1U << i;
  const std::uint32_t anti = neel ^ static_cast<std::uint32_t>(dim - 1);
  const std::uint32_t flipped = neel ^ (1U << (sites - 1));
  Vector psi(dim, 0.0);
  const double amp = 1.0 / std::sqrt(3.0);
  psi[neel] += amp;
  psi[anti] += amp;
  psi[flipped] += amp;
  return psi;
}

HermitianOperator reduced_hamiltonian(const DisorderRealization& real, const Region& region) {
  const ChainSpec& spec = real.spec;
  if (region.size < 1 || region.size > spec.sites) {
    throw InvalidArgument("reduced_hamiltonian: region size " + std::to_string(region.size) + " outside [1, " +
                          std::to_string(spec.sites) + "]");
  }
  if (region.start < 0 || region.start >= spec.sites) throw InvalidArgument("reduced_hamiltonian: bad region start");
  std::vector<double> field_terms(static_cast<std::size_t>(region.size));
  for (int j = 0; j < region.size; ++j) {
    field_terms[static_cast<std::size_t>(j)] =
        spec.disorder * real.fields[static_cast<std::size_t>((region.start + j) % spec.sites)];
  }
  return HermitianOperator(
      dense_heisenberg(region.size, chain_bonds(region.size, Boundary::open), field_terms, spec.coupling));
}

void accumulate_region_state(std::span<const cplx> phi, int sites, const Region& region, double weight,
                             ComplexMatrix& acc) {
  const std::size_t dim = std::size_t{1} << sites;
  const std::size_t rdim = std::size_t{1} << region.size;
  if (phi.size() != dim) throw InvalidArgument("accumulate_region_state: vector is not 2^L long");
  if (region.size < 1 || region.size > sites || region.start < 0 || region.start >= sites) {
    throw InvalidArgument("accumulate_region_state: invalid region");
  }
  if (acc.rows() != rdim || acc.cols() != rdim) throw InvalidArgument("accumulate_region_state: accumulator shape");

  // Rotate the site labels so the region starts at bit 0.
  Vector rotated;
  std::span<const cplx> v = phi;
  if (region.start != 0) {
    rotated.assign(dim, 0.0);
    const std::uint32_t mask = static_cast<std::uint32_t>(dim - 1);
    const int a = region.start;
    for (std::uint32_t s = 0; s < dim; ++s) {
      const std::uint32_t r = ((s >> a) | (s << (sites - a))) & mask;
      rotated[r] = phi[s];
    }
    v = rotated;
  }
  const auto& ker = simd::kernels();
  const std::size_t outer = dim / rdim;
  for (std::size_t c = 0; c < outer; ++c) {
    const cplx* seg = v.data() + c * rdim;
    for (std::size_t x = 0; x < rdim; ++x) {
      if (seg[x] == cplx{}) continue;
      ker.axpy_conj(rdim, weight * seg[x], seg, acc.row(x).data());
    }
  }
}

ChainSpectrum::ChainSpectrum(const DisorderRealization& real, double tol_deg) : real_(real) {
  real_.spec.validate();
  for (auto& basis : all_sectors(real_.spec.sites)) {
    ComplexMatrix block = sector_hamiltonian(real_, basis);
    SpectralDecomposition sd = eig_hermitian(block);
    sectors_.push_back({std::move(basis), std::move(sd)});
  }
  for (std::uint32_t s = 0; s < sectors_.size(); ++s) {
    const auto& values = sectors_[s].spectrum.values;
    for (std::uint32_t k = 0; k < values.size(); ++k) levels_.push_back({values[k], s, k});
  }
  std::stable_sort(levels_.begin(), levels_.end(), [](const Level& a, const Level& b) { return a.energy < b.energy; });
  const auto e = energies();
  tol_deg_ = tol_deg < 0.0 ? default_degeneracy_tolerance(e) : tol_deg;
  groups_ = group_degenerate(e, tol_deg_);
}

std::vector<double> ChainSpectrum::energies() const {
  std::vector<double> e(levels_.size());
  for (std::size_t k = 0; k < levels_.size(); ++k) e[k] = levels_[k].energy;
  return e;
}

void ChainSpectrum::accumulate_eigenvector(std::size_t level, cplx scale, std::span<cplx> out) const {
  const Level& lv = levels_[level];
  const Sector& sec = sectors_[lv.sector];
  const ComplexMatrix& v = sec.spectrum.vectors;
  for (std::size_t a = 0; a < sec.basis.dimension(); ++a) out[sec.basis.states[a]] += scale * v(a, lv.index);
}

Vector ChainSpectrum::overlaps(std::span<const cplx> psi) const {
  if (psi.size() != dimension()) throw InvalidArgument("ChainSpectrum::overlaps: dimension mismatch");
  Vector c(levels_.size());
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const Level& lv = levels_[k];
    const Sector& sec = sectors_[lv.sector];
    cplx s = 0.0;
    for (std::size_t a = 0; a < sec.basis.dimension(); ++a)
      s += std::conj(sec.spectrum.vectors(a, lv.index)) * psi[sec.basis.states[a]];
    c[k] = s;
  }
  return c;
}

}  // namespace qtherm
