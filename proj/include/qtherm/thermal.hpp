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

#include <span>
#include <string_view>
#include <vector>

#include "qtherm/lattice.hpp"
#include "qtherm/spectral.hpp"
#include "qtherm/states.hpp"

namespace qtherm {

/// exp(-beta E_k) / Z, evaluated with the exponent shifted by its maximum.
std::vector<double> gibbs_populations(std::span<const double> energies, double beta);

/// Tr[tau_beta(H) H] from the spectrum.
double thermal_energy(std::span<const double> energies, double beta);

/// exp(-beta H) / Tr exp(-beta H). Rejects non-finite beta.
DensityMatrix gibbs_state(const HermitianOperator& h, double beta);

struct BetaMatch {
  double beta = 0.0;
  double target_energy = 0.0;
  double residual = 0.0;  // |E(beta) - target|
  int iterations = 0;
  bool negative() const noexcept { return beta < 0.0; }
};

inline constexpr double kDefaultBetaTolerance = 1e-8;

/// Solves Tr[tau_beta H] = target by bisection on beta; E(beta) is strictly
/// decreasing. Initial bracket [-64, 64], widened geometrically; 200 steps.
/// Rejects targets outside the open interval (E_min, E_max).
BetaMatch match_beta(std::span<const double> energies, double target, double tol = kDefaultBetaTolerance);
/// Target is <psi|H|psi>.
BetaMatch match_beta(const HermitianOperator& h, std::span<const cplx> psi, double tol = kDefaultBetaTolerance);

enum class TargetKind {
  hamiltonian_gibbs,     // tau_beta(H_R)
  reduced_global_gibbs,  // Tr_{R^c} tau_beta(H_V)
};

std::string_view target_kind_name(TargetKind kind);
TargetKind parse_target_kind(std::string_view name);

struct ThermalTarget {
  TargetKind kind;
  double beta;
  DensityMatrix state;
};

/// Reduced state of tau_beta(H_V) on a region, accumulated level by level
/// from the sector eigenvectors.
DensityMatrix reduced_global_gibbs(const ChainSpectrum& spectrum, const Region& region, double beta);

ThermalTarget thermal_target(const ChainSpectrum& spectrum, const Region& region, double beta, TargetKind kind);

}  // namespace qtherm
