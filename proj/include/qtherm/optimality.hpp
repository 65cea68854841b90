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
#include <span>
#include <string>
#include <vector>

#include "qtherm/collision.hpp"
#include "qtherm/matrix.hpp"
#include "qtherm/states.hpp"

namespace qtherm {

inline constexpr double kDefaultEnergyTolerance = 1e-9;
inline constexpr std::size_t kEscPairBudget = 10'000'000;

/// Occupation counts (n_1, ..., n_d) with sum n, in lexicographic order.
std::vector<std::vector<std::uint32_t>> compositions(std::size_t n, std::size_t d);

/// Steps t to the next composition with the same sum in lexicographic order,
/// starting from (0, ..., 0, n). Returns false after (n, 0, ..., 0).
bool next_composition(std::span<std::uint32_t> t);

enum class EscVerdict { pass, fail, unchecked };

struct EscCollision {
  std::size_t n = 0;
  std::vector<std::uint32_t> m;
  std::vector<std::uint32_t> m_prime;
  double gap = 0.0;  // |sum m_k E_k - sum m'_k E_k|
};

struct EscReport {
  std::vector<double> energies;
  std::size_t n_max = 0;
  double tol_e = kDefaultEnergyTolerance;
  std::vector<EscVerdict> verdicts;     // verdicts[n - 1]
  std::vector<EscCollision> collisions; // the first few per failing n
  bool incomplete = false;              // budget hit; later n are unchecked
  bool exact = false;

  EscVerdict verdict(std::size_t n) const { return verdicts.at(n - 1); }
  /// Every n <= up_to passed.
  bool passes(std::size_t up_to) const;
  bool passes() const { return passes(n_max); }
};

/// Exhaustive search for two distinct compositions of n with total energies
/// closer than tol_e, for every n <= n_max. Stops (incomplete) once the number
/// of composition pairs at some n exceeds pair_budget.
EscReport check_esc(std::span<const double> energies, std::size_t n_max, double tol_e = kDefaultEnergyTolerance,
                    std::size_t pair_budget = kEscPairBudget);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

/// Exact variant: energies given as fractions, collisions are exact equalities.
EscReport check_esc_exact(std::span<const Rational> energies, std::size_t n_max,
                          std::size_t pair_budget = kEscPairBudget);

/// Occupation types of n copies of a d-level system with their projector
/// ranks (multinomials).
struct SubspaceProfile {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::vector<std::uint32_t>> types;
  std::vector<double> dimensions;
  double total_dimension() const;
};
SubspaceProfile subspace_profile(std::size_t d, std::size_t n);

/// Weight of rho (x) sigma^{(x) n-1} (diagonal rho = p, sigma = q) in each type.
std::vector<double> type_weights(const SubspaceProfile& profile, std::span<const double> p, std::span<const double> q);

/// min over states with the same energy-subspace weights as
/// rho (x) sigma^{(x) n-1} of the trace-norm distance to sigma^{(x) n}:
/// sum_E |w_E(rho (x) sigma^{n-1}) - w_E(sigma^{(x) n})|.
double optimal_distance_fixed_weights(std::span<const double> p, std::span<const double> q,
                                      std::span<const double> energies, std::size_t n,
                                      double tol_e = kDefaultEnergyTolerance);

/// Matrix form: rho and sigma must be diagonal in H's eigenbasis.
double optimal_distance_fixed_weights(const DensityMatrix& rho, const DensityMatrix& sigma, const ComplexMatrix& h,
                                      std::size_t n, double tol_e = kDefaultEnergyTolerance);

/// Random energy-preserving random-unitary channel on n copies of a diagonal
/// Hamiltonian: Haar blocks inside each energy subspace, Dirichlet weights
/// over at most 8 unitaries.
RandomUnitaryChannel sample_energy_preserving_channel(std::span<const double> energies, std::size_t n,
                                                      std::uint64_t seed, double tol_e = kDefaultEnergyTolerance);

struct OptimalityReport {
  bool esc_pass = false;
  double channel_distance = 0.0;  // convex-split channel, dense
  double optimum = 0.0;           // fixed-weight relaxation
  bool equality_holds = false;
  std::size_t trials = 0;
  double best_sampled = 0.0;      // smallest distance over sampled channels
  std::size_t violations = 0;     // sampled channels beating the convex split by > 1e-9
  bool counterexample_search = false;  // ESC failed; no optimality asserted
};

/// Optimality check on diagonal p (first subsystem) and q (the rest) for a
/// diagonal Hamiltonian with the given energies.
OptimalityReport verify_optimality(std::span<const double> p, std::span<const double> q,
                                   std::span<const double> energies, std::size_t n, std::size_t trials,
                                   std::uint64_t seed);

struct CounterexampleReport {
  std::vector<double> populations;  // thermal p
  double d_convex_split = 0.0;      // d(rho2, tau (x) tau)
  double d_improved = 0.0;          // d(rho*, tau (x) tau)
  double difference = 0.0;
  double predicted = 0.0;           // p4 (2 p1 - 1)
  double residual = 0.0;
  double weight_defect = 0.0;       // max |w_E(rho*) - w_E(rho2)|
  bool precondition = false;        // 1/4 <= p1 <= 1/2
  bool strict = false;              // difference < 0
  std::string note;
};

/// Four levels with E2 - E1 = E4 - E3, rho = |1><1|, tau thermal at beta.
/// d is half the trace norm.
CounterexampleReport appendix_c_counterexample(std::span<const double> energies, double beta);

struct TrivialHamiltonianReport {
  std::size_t d = 0;
  std::size_t unitaries = 0;       // d^2 shift-and-phase operators
  std::size_t bath_copies = 1;
  double max_distance = 0.0;       // over the tested inputs
  double randomness_bits = 0.0;    // log2(unitaries) used by this construction
  double referenced_bits = 0.0;    // log2 d
};

/// Uniform mixture of X^a Z^b maps every input to I/d; checked on `inputs`
/// seeded random states.
TrivialHamiltonianReport trivial_hamiltonian_note(std::size_t d, std::size_t inputs = 50, std::uint64_t seed = 1);

}  // namespace qtherm
