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

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtherm/lattice.hpp"
#include "qtherm/spectral.hpp"
#include "qtherm/states.hpp"
#include "qtherm/thermal.hpp"

namespace qtherm {

/// Infinite-time average of a pure state on a chain, kept in factored form:
/// omega = sum_g |phi_g><phi_g| with phi_g the projection of psi0 onto
/// degeneracy group g. The dense 2^L x 2^L omega is never formed unless asked.
class EquilibriumState {
 public:
  EquilibriumState(std::shared_ptr<const ChainSpectrum> spectrum, std::span<const cplx> psi0,
                   std::uint64_t realization_index = 0, std::string initial_state = "neel_variant");

  const ChainSpectrum& spectrum() const noexcept { return *spectrum_; }
  /// <E_k|psi0> per level of spectrum().levels().
  const Vector& coefficients() const noexcept { return coeff_; }
  std::uint64_t realization_index() const noexcept { return realization_; }
  const std::string& initial_state() const noexcept { return initial_; }

  /// Tr[omega H_V]
  double energy() const;
  /// Groups with non-zero weight.
  const std::vector<std::size_t>& active_groups() const noexcept { return active_; }
  /// phi_g on the full 2^L space.
  Vector group_component(std::size_t group) const;
  /// Dense omega; only for small chains (tests and oracles).
  ComplexMatrix dense() const;

 private:
  std::shared_ptr<const ChainSpectrum> spectrum_;
  Vector coeff_;
  std::vector<std::size_t> active_;
  std::uint64_t realization_;
  std::string initial_;
};

EquilibriumState infinite_time_average(std::shared_ptr<const ChainSpectrum> spectrum, std::span<const cplx> psi0,
                                       std::uint64_t realization_index = 0);

/// sum_g P_g |psi><psi| P_g over the groups of a plain decomposition.
DensityMatrix infinite_time_average(std::span<const cplx> psi0, const SpectralDecomposition& spectrum);

/// sum_g P_g rho P_g
ComplexMatrix dephase(const ComplexMatrix& rho, const SpectralDecomposition& spectrum);

/// omega_R, accumulated group by group; memory O(4^|R| + 2^L).
DensityMatrix reduce_equilibrium(const EquilibriumState& omega, const Region& region);

inline constexpr double kSupportTolerance = 1e-10;
inline constexpr double kLeakageTolerance = 1e-9;

struct DmaxResult {
  double value = 0.0;    // bits
  double epsilon = 0.0;  // smoothing radius in trace norm, 0 when unsmoothed
  double lambda = 0.0;   // optimal lambda (equals value)
  std::optional<DensityMatrix> witness;  // smoothed state rho~ (smoothed case)
};

/// log2 of the largest eigenvalue of sigma^{-1/2} rho sigma^{-1/2} on supp(sigma).
/// Throws SupportError when rho has more than leakage_tol weight outside it.
DmaxResult dmax(const DensityMatrix& rho, const DensityMatrix& sigma, double tol_supp = kSupportTolerance,
                double leakage_tol = kLeakageTolerance);

/// Common eigenbasis of two commuting states with the diagonals in it.
struct CommonDiagonal {
  ComplexMatrix basis;  // columns
  std::vector<double> p;
  std::vector<double> q;
};
/// Rejects pairs with ||[rho, sigma]||_F > tol.
CommonDiagonal common_diagonal(const DensityMatrix& rho, const DensityMatrix& sigma, double tol = 1e-9);

/// Classical smooth D_max of probability vectors over the ball
/// ||p~ - p||_1 <= epsilon. Returns the value and the witness p~.
std::pair<double, std::vector<double>> dmax_smooth_classical(std::span<const double> p, std::span<const double> q,
                                                             double epsilon);

/// Smooth D_max for commuting pairs. epsilon is the trace-norm radius.
DmaxResult dmax_smooth(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon);

struct CurvePoint {
  int region_size = 0;
  std::optional<double> value;  // missing when dmax failed
  std::string failure;          // reason when missing
};

/// D_max(omega_R || target_R) for left-anchored regions [offset, offset + size).
std::vector<CurvePoint> dmax_region_curve(const EquilibriumState& omega, double beta,
                                          std::span<const int> region_sizes, TargetKind kind, int offset = 0);

}  // namespace qtherm
