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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtherm/matrix.hpp"
#include "qtherm/spectral.hpp"
#include "qtherm/states.hpp"

namespace qtherm {

/// Largest d^n the dense channel constructions accept.
inline constexpr std::size_t kMaxDenseChannelDimension = 4096;

/// sum_i H^{(i)} over n copies of a local Hamiltonian.
ComplexMatrix total_hamiltonian(const ComplexMatrix& local, std::size_t n);

/// Permutation unitary on n subsystems of dimension d: the content of
/// subsystem k is moved to subsystem perm[k].
ComplexMatrix permutation_unitary(std::size_t d, std::span<const std::size_t> perm);

/// Exchanges subsystems i and j (0-based) of n copies; i == j gives identity.
ComplexMatrix swap_unitary(std::size_t d, std::size_t n, std::size_t i, std::size_t j);

/// rho -> sum_k p_k U_k rho U_k^dagger. Permutation matrices are detected and
/// applied by index relabelling.
class RandomUnitaryChannel {
 public:
  RandomUnitaryChannel(std::vector<double> probabilities, std::vector<ComplexMatrix> unitaries);
  static RandomUnitaryChannel identity(std::size_t dim);

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return p_.size(); }
  const std::vector<double>& probabilities() const noexcept { return p_; }
  const std::vector<ComplexMatrix>& unitaries() const noexcept { return u_; }

  ComplexMatrix apply(const ComplexMatrix& rho) const;
  DensityMatrix apply(const DensityMatrix& rho) const;

  /// Every U_k commutes with h within tol * ||h||_F.
  bool energy_preserving(const ComplexMatrix& h, double tol = 1e-9) const;

  /// `after` applied to the output of this channel.
  RandomUnitaryChannel then(const RandomUnitaryChannel& after) const;
  /// w * a + (1 - w) * b
  static RandomUnitaryChannel mix(const RandomUnitaryChannel& a, const RandomUnitaryChannel& b, double w);

 private:
  std::size_t dim_ = 0;
  std::vector<double> p_;
  std::vector<ComplexMatrix> u_;
  std::vector<std::vector<std::uint32_t>> perm_;  // row i of U has its 1 in column perm[i]; empty if dense
};

/// Poisson-timed collisions on n identical subsystems.
class CollisionProcess {
 public:
  /// Validates unitarity (1e-10) and [U_k, sum_i H^{(i)}] = 0 within
  /// tol * ||H||_F; rates must be positive.
  CollisionProcess(ComplexMatrix local_hamiltonian, std::size_t subsystems, std::vector<ComplexMatrix> unitaries,
                   std::vector<double> rates, double tol = 1e-9);

  /// A swap for every pair i < j, all at the same rate.
  static CollisionProcess all_pairs_swaps(ComplexMatrix local_hamiltonian, std::size_t subsystems, double rate);

  std::size_t subsystems() const noexcept { return n_; }
  std::size_t local_dimension() const noexcept { return local_.rows(); }
  std::size_t dimension() const noexcept { return total_.rows(); }
  const ComplexMatrix& local_hamiltonian() const noexcept { return local_; }
  const ComplexMatrix& hamiltonian() const noexcept { return total_; }
  const std::vector<ComplexMatrix>& unitaries() const noexcept { return u_; }
  const std::vector<double>& rates() const noexcept { return rates_; }
  double total_rate() const noexcept { return total_rate_; }

  /// Lambda(rho) = sum_k (lambda_k / lambda_bar) U_k rho U_k^dagger
  RandomUnitaryChannel mixing_channel() const;

 private:
  ComplexMatrix local_;
  ComplexMatrix total_;
  std::size_t n_ = 0;
  std::vector<ComplexMatrix> u_;
  std::vector<double> rates_;
  double total_rate_ = 0.0;
};

inline constexpr double kDefaultTailTolerance = 1e-10;
inline constexpr std::size_t kDefaultMaxOrder = 10000;

/// Poisson(mean) weights for m = 0..order with the tail beyond `order` at
/// most tail_tol, renormalised by the retained mass.
struct PoissonTruncation {
  std::vector<double> weights;
  double retained = 1.0;
  std::size_t order() const noexcept { return weights.size() - 1; }
};
PoissonTruncation poisson_truncation(double mean, double tail_tol = kDefaultTailTolerance,
                                     std::size_t max_order = kDefaultMaxOrder);

struct SeriesSolution {
  DensityMatrix state;
  std::size_t order = 0;
  double total_rate = 0.0;
  double tail = 0.0;  // discarded Poisson mass
};

/// rho(t) = sum_m p_t(m) Lambda^m(rho0), truncated at the Poisson tail.
SeriesSolution evolve_series(const CollisionProcess& proc, const DensityMatrix& rho0, double t,
                             double tail_tol = kDefaultTailTolerance, std::size_t max_order = kDefaultMaxOrder);

/// Classical RK4 on d rho / dt = sum_k lambda_k (U_k rho U_k^dagger - rho),
/// step min(0.01 / lambda_bar, t / 1000).
DensityMatrix evolve_rk4(const CollisionProcess& proc, const DensityMatrix& rho0, double t);

enum class TrajectorySampler {
  competing_clocks,  // one exponential clock per unitary
  aggregate_clock,   // one clock at lambda_bar plus a categorical choice
};

inline constexpr std::size_t kTrajectoryChunk = 4096;

/// Monte Carlo average over sampled collision sequences. Trajectories are
/// split into fixed chunks with seeds derived from `seed`, so the result does
/// not depend on the worker count.
DensityMatrix evolve_trajectories(const CollisionProcess& proc, const DensityMatrix& rho0, double t,
                                  std::size_t n_traj, std::uint64_t seed,
                                  TrajectorySampler sampler = TrajectorySampler::competing_clocks,
                                  unsigned workers = 1);

/// (1/n) sum_i swap(0, i) . swap(0, i)^dagger on n subsystems of dimension d.
RandomUnitaryChannel convex_split_channel(std::size_t d, std::size_t n);

/// (1/n) sum_i tau (x) ... (x) omega [slot i] (x) ... (x) tau
DensityMatrix convex_split_state(const DensityMatrix& omega, const DensityMatrix& tau, std::size_t n);

/// Average of P rho P^dagger over all permutations of n subsystems.
DensityMatrix symmetrize_subsystems(const DensityMatrix& rho, std::size_t d, std::size_t n);

struct ConvexSplitCheck {
  double measured = 0.0;  // ||E_n(rho (x) sigma^{n-1}) - sigma^{(x) n}||_1
  double bound = 0.0;     // sqrt(2^dmax / n)
  bool holds = false;
};

/// Dense evaluation of the convex-split distance against its bound.
ConvexSplitCheck verify_convex_split(const DensityMatrix& rho, const DensityMatrix& sigma, std::size_t n);

/// Same distance for diagonal inputs, summed over occupation types without
/// forming any d^n object.
double convex_split_distance_diagonal(std::span<const double> p, std::span<const double> q, std::size_t n);

/// Trace distances between rho(t) of the all-pairs swap process started from
/// omega (x) tau^{(x) n-1} and the convex-split mixture, one per time.
std::vector<double> steady_state_check(const DensityMatrix& omega, const DensityMatrix& tau,
                                       const ComplexMatrix& local_hamiltonian, std::size_t n, double rate,
                                       std::span<const double> times);

/// ||E(omega (x) tau^{(x) n-1}) - tau^{(x) n}||_1
double thermalization_distance(const RandomUnitaryChannel& channel, const DensityMatrix& omega,
                               const DensityMatrix& tau, std::size_t n);
/// Rounding slack on the distance comparison.
inline constexpr double kThermalizationSlack = 1e-12;
bool epsilon_thermalize_check(const RandomUnitaryChannel& channel, const DensityMatrix& omega,
                              const DensityMatrix& tau, std::size_t n, double epsilon);

struct NEpsilonResult {
  std::optional<std::size_t> n_epsilon;  // empty when no n <= n_max works
  std::vector<double> distances;         // distances[k] is the distance at n = k + 1
  double dmax_bits = 0.0;
  double upper_bound = 0.0;                // ceil(2^dmax / eps^2)
  std::optional<double> lower_bound;       // 2^{dmax_smooth(2 sqrt eps)}, commuting inputs only
  bool esc_verified = false;
  bool upper_bound_only = true;            // set when ESC could not be confirmed
  std::string note;
};

/// Smallest n <= n_max with ||E_n(omega (x) tau^{n-1}) - tau^{(x)n}||_1 <= eps.
/// n_max = 0 scans up to the upper bound.
NEpsilonResult find_n_epsilon(const DensityMatrix& omega, const DensityMatrix& tau, const ComplexMatrix& local_h,
                              double epsilon, std::size_t n_max = 0);

/// Tr[rho Pi_E] for every degeneracy group of the spectrum.
std::vector<double> energy_subspace_weights(const ComplexMatrix& rho, const SpectralDecomposition& h);

}  // namespace qtherm
