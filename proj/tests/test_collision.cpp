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

#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "qtherm/collision.hpp"
#include "qtherm/entropy.hpp"
#include "qtherm/error.hpp"
#include "qtherm/optimality.hpp"
#include "qtherm/random_ops.hpp"

using namespace qtherm;

namespace {

const std::vector<double> kQubitEnergies{0.0, 1.0};

ComplexMatrix qubit_h() { return ComplexMatrix::diagonal(kQubitEnergies); }

// sum_k p_k U_k rho U_k^dagger by plain matrix products
ComplexMatrix apply_dense(const RandomUnitaryChannel& ch, const ComplexMatrix& rho) {
  ComplexMatrix out(rho.rows(), rho.cols());
  for (std::size_t k = 0; k < ch.size(); ++k)
    out.add_scaled(ch.probabilities()[k], ch.unitaries()[k] * rho * ch.unitaries()[k].adjoint());
  return out;
}

// E|2K/n - 1| for K ~ Binomial(n, 1/2)
double canonical_distance(std::size_t n) {
  double s = 0.0, c = 1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    s += c * std::abs(2.0 * static_cast<double>(k) / static_cast<double>(n) - 1.0);
    c = c * static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
  return s / std::exp2(static_cast<double>(n));
}

DensityMatrix diag(std::vector<double> p) { return DensityMatrix::diagonal(p); }

}  // namespace

TEST_CASE("total Hamiltonian and swap unitaries") {
  const auto h = qubit_h();
  const auto id = ComplexMatrix::identity(2);
  CHECK((total_hamiltonian(h, 2) - (kron(h, id) + kron(id, h))).max_abs() == 0.0);
  const auto s = swap_unitary(2, 2, 0, 1);
  SplitMix64 rng(1);
  const auto a = random_density_matrix(2, rng), b = random_density_matrix(2, rng);
  CHECK((s * kron(a.matrix(), b.matrix()) * s.adjoint() - kron(b.matrix(), a.matrix())).max_abs() < 1e-15);
  // subsystem k moves to slot perm[k]
  const std::vector<std::size_t> perm{1, 2, 0};
  const auto c = random_density_matrix(2, rng);
  const auto u = permutation_unitary(2, perm);
  const auto moved = u * kron_all(std::vector{a.matrix(), b.matrix(), c.matrix()}) * u.adjoint();
  CHECK((moved - kron_all(std::vector{c.matrix(), a.matrix(), b.matrix()})).max_abs() < 1e-15);
}

TEST_CASE("random unitary channel validation") {
  SplitMix64 rng(2);
  const auto u = haar_unitary(3, rng);
  CHECK_THROWS_AS(RandomUnitaryChannel({0.5, 0.4}, {u, u}), InvalidArgument);
  CHECK_THROWS_AS(RandomUnitaryChannel({1.2, -0.2}, {u, u}), InvalidArgument);
  CHECK_THROWS_AS(RandomUnitaryChannel({1.0}, {cplx(1.01) * u}), InvalidArgument);
  CHECK_THROWS_AS(RandomUnitaryChannel({0.5, 0.5}, {u}), InvalidArgument);
}

TEST_CASE("channel application matches dense products, permutation fast path included") {
  SplitMix64 rng(3);
  const auto rho = random_density_matrix(8, rng);
  const RandomUnitaryChannel perm({0.3, 0.7}, {swap_unitary(2, 3, 0, 2), swap_unitary(2, 3, 1, 2)});
  CHECK((perm.apply(rho).matrix() - apply_dense(perm, rho.matrix())).max_abs() < 1e-15);
  const RandomUnitaryChannel dense({0.25, 0.75}, {haar_unitary(8, rng), haar_unitary(8, rng)});
  CHECK((dense.apply(rho).matrix() - apply_dense(dense, rho.matrix())).max_abs() < 1e-13);
  const auto both = perm.then(dense);
  CHECK((both.apply(rho).matrix() - dense.apply(perm.apply(rho)).matrix()).max_abs() < 1e-13);
  const auto mixed = RandomUnitaryChannel::mix(perm, dense, 0.4);
  ComplexMatrix want = cplx(0.4) * perm.apply(rho).matrix();
  want.add_scaled(0.6, dense.apply(rho).matrix());
  CHECK((mixed.apply(rho).matrix() - want).max_abs() < 1e-13);
}

TEST_CASE("convex split channel examples") {
  SplitMix64 rng(4);
  const auto rho = random_density_matrix(2, rng), sigma = random_density_matrix(2, rng);
  const auto one = convex_split_channel(2, 1);
  CHECK((one.apply(rho).matrix() - rho.matrix()).max_abs() == 0.0);

  const auto two = convex_split_channel(2, 2);
  ComplexMatrix want = cplx(0.5) * kron(rho.matrix(), sigma.matrix());
  want.add_scaled(0.5, kron(sigma.matrix(), rho.matrix()));
  CHECK((two.apply(tensor(rho, sigma)).matrix() - want).max_abs() < 1e-15);

  // omega hidden uniformly in each slot
  const auto three = convex_split_channel(2, 3);
  const auto& w = rho.matrix();
  const auto& t = sigma.matrix();
  ComplexMatrix mix(8, 8);
  mix.add_scaled(1.0 / 3.0, kron_all(std::vector{w, t, t}));
  mix.add_scaled(1.0 / 3.0, kron_all(std::vector{t, w, t}));
  mix.add_scaled(1.0 / 3.0, kron_all(std::vector{t, t, w}));
  const auto out = three.apply(tensor(rho, tensor(sigma, sigma)));
  CHECK((out.matrix() - mix).max_abs() < 1e-12);
  CHECK((convex_split_state(rho, sigma, 3).matrix() - mix).max_abs() < 1e-12);
  CHECK(three.energy_preserving(total_hamiltonian(qubit_h(), 3)));
}

TEST_CASE("symmetrization over permutations reproduces the convex-split mixture") {
  SplitMix64 rng(5);
  for (std::size_t n : {2u, 3u, 4u}) {
    const auto omega = random_density_matrix(2, rng), tau = random_density_matrix(2, rng);
    DensityMatrix rho0 = omega;
    for (std::size_t k = 1; k < n; ++k) rho0 = tensor(rho0, tau);
    CHECK((symmetrize_subsystems(rho0, 2, n).matrix() - convex_split_state(omega, tau, n).matrix()).max_abs() <
          1e-12);
  }
}

TEST_CASE("verify_convex_split examples and random qubit pairs") {
  const auto half = DensityMatrix::maximally_mixed(2);
  const auto same = verify_convex_split(half, half, 3);
  CHECK(same.measured < 1e-14);
  CHECK(same.holds);

  const auto c = verify_convex_split(diag({1.0, 0.0}), half, 2);
  CHECK(std::abs(c.measured - 0.5) < 1e-12);
  CHECK(std::abs(c.bound - 1.0) < 1e-12);
  CHECK(c.holds);

  SplitMix64 rng(6);
  for (int t = 0; t < 40; ++t) {
    const auto rho = random_density_matrix(2, rng), sigma = random_density_matrix(2, rng);
    for (std::size_t n = 1; n <= 6; ++n) CHECK(verify_convex_split(rho, sigma, n).holds);
  }
}

TEST_CASE("canonical pair follows the binomial distance law") {
  const std::vector<double> p{1.0, 0.0}, q{0.5, 0.5};
  double prev = INFINITY;
  for (std::size_t n = 1; n <= 8; ++n) {
    const double d = convex_split_distance_diagonal(p, q, n);
    CHECK(std::abs(d - canonical_distance(n)) < 1e-12);
    CHECK(d <= prev + 1e-15);
    prev = d;
    if (n <= 6) CHECK(std::abs(verify_convex_split(diag(p), diag(q), n).measured - d) < 1e-12);
  }
  // the single-site marginal is the one that moves as 1/n
  const auto out = convex_split_state(diag(p), diag(q), 4);
  const std::vector<std::size_t> dims(4, 2);
  const std::vector<std::size_t> keep{0};
  const auto first = partial_trace(out, dims, keep);
  CHECK(std::abs(trace_norm(first.matrix() - diag(q).matrix()) - 0.25) < 1e-12);
}

TEST_CASE("combinatorial convex-split distance matches the dense evaluation") {
  SplitMix64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 2 + t % 2;
    const auto p = random_probabilities(d, rng), q = random_probabilities(d, rng);
    for (std::size_t n = 1; n <= (d == 2 ? 6u : 4u); ++n) {
      const double dense = verify_convex_split(diag(p), diag(q), n).measured;
      CHECK(std::abs(convex_split_distance_diagonal(p, q, n) - dense) < 1e-12);
    }
  }
}

TEST_CASE("Poisson truncation") {
  const auto pt = poisson_truncation(3.0);
  CHECK(std::abs(std::accumulate(pt.weights.begin(), pt.weights.end(), 0.0) - 1.0) < 1e-14);
  CHECK(1.0 - pt.retained <= 1e-10);
  CHECK(std::abs(pt.weights[2] - std::exp(-3.0) * 4.5 / pt.retained) < 1e-15);
  CHECK(poisson_truncation(0.0).order() == 0);
  CHECK_THROWS_AS(poisson_truncation(1e5), CapacityError);
}

TEST_CASE("series solution: trivial cases and the two-qubit swap closed form") {
  SplitMix64 rng(8);
  const auto rho0 = random_density_matrix(4, rng);
  const auto proc = CollisionProcess::all_pairs_swaps(qubit_h(), 2, 1.0);
  CHECK((evolve_series(proc, rho0, 0.0).state.matrix() - rho0.matrix()).max_abs() == 0.0);

  const CollisionProcess idle(qubit_h(), 2, {ComplexMatrix::identity(4)}, {2.0});
  CHECK((evolve_series(idle, rho0, 5.0).state.matrix() - rho0.matrix()).max_abs() < 1e-14);

  const double t = 3.0;
  const auto s = swap_unitary(2, 2, 0, 1);
  ComplexMatrix want = cplx(0.5 * (1.0 + std::exp(-2.0 * t))) * rho0.matrix();
  want.add_scaled(0.5 * (1.0 - std::exp(-2.0 * t)), s * rho0.matrix() * s);
  const auto series = evolve_series(proc, rho0, t);
  CHECK(trace_distance(series.state.matrix(), want) < 1e-9);
  CHECK(trace_distance(series.state, evolve_rk4(proc, rho0, t)) < 1e-6);
  CHECK(series.tail <= 1e-10);
}

TEST_CASE("collision process validation") {
  const auto h = qubit_h();
  const auto flip = kron(pauli::x(), ComplexMatrix::identity(2));
  CHECK_THROWS_AS(CollisionProcess(h, 2, {flip}, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(CollisionProcess(h, 2, {swap_unitary(2, 2, 0, 1)}, {0.0}), InvalidArgument);
  CHECK_THROWS_AS(CollisionProcess(h, 2, {swap_unitary(2, 2, 0, 1)}, {1.0, 2.0}), InvalidArgument);
}

TEST_CASE("trajectories agree with the series solution") {
  SplitMix64 rng(9);
  const auto rho0 = random_density_matrix(4, rng);
  const auto proc = CollisionProcess::all_pairs_swaps(qubit_h(), 2, 1.0);
  const auto series = evolve_series(proc, rho0, 1.0).state;
  const auto a = evolve_trajectories(proc, rho0, 1.0, 100000, 77, TrajectorySampler::competing_clocks, 1);
  const auto b = evolve_trajectories(proc, rho0, 1.0, 100000, 77, TrajectorySampler::aggregate_clock, 1);
  CHECK(trace_distance(a, series) < 5e-3);
  CHECK(trace_distance(b, series) < 5e-3);
  CHECK(trace_distance(a, b) < 5e-3);
  CHECK(std::abs(a.matrix().trace().real() - 1.0) < 1e-12);

  const CollisionProcess slow(qubit_h(), 2, {swap_unitary(2, 2, 0, 1)}, {1e-12});
  CHECK(trace_distance(evolve_trajectories(slow, rho0, 1.0, 1000, 3), rho0) < 1e-12);
}

TEST_CASE("trajectory estimate is independent of the worker count") {
  SplitMix64 rng(10);
  const auto rho0 = random_density_matrix(8, rng);
  const auto proc = CollisionProcess::all_pairs_swaps(qubit_h(), 3, 0.7);
  const auto one = evolve_trajectories(proc, rho0, 2.0, 20000, 5, TrajectorySampler::competing_clocks, 1);
  const auto four = evolve_trajectories(proc, rho0, 2.0, 20000, 5, TrajectorySampler::competing_clocks, 4);
  CHECK(one.matrix() == four.matrix());
}

TEST_CASE("steady state of the all-pairs swap process") {
  const std::vector<double> p{0.9, 0.1};
  const auto omega = diag(p);
  const auto tau = gibbs_state(HermitianOperator(qubit_h()), 0.8);
  const double rate = 2.0;
  const std::vector<double> times{0.5, 5.0, 50.0 / rate};
  const auto d = steady_state_check(omega, tau, qubit_h(), 3, rate, times);
  REQUIRE(d.size() == 3);
  CHECK(d[2] < 1e-6);
  CHECK(d[0] > d[2]);
  const auto same = steady_state_check(tau, tau, qubit_h(), 3, rate, times);
  for (double x : same) CHECK(x < 1e-12);
}

TEST_CASE("epsilon thermalization checks") {
  const auto tau = gibbs_state(HermitianOperator(qubit_h()), 0.5);
  const auto ch = convex_split_channel(2, 3);
  CHECK(epsilon_thermalize_check(ch, tau, tau, 3, 0.0));
  const auto zero = diag({1.0, 0.0});
  CHECK(epsilon_thermalize_check(ch, zero, tau, 3, 2.0));
  const auto half = DensityMatrix::maximally_mixed(2);
  const auto two = convex_split_channel(2, 2);
  CHECK(std::abs(thermalization_distance(two, zero, half, 2) - 0.5) < 1e-12);
  CHECK_FALSE(epsilon_thermalize_check(two, zero, half, 2, 0.4));
  CHECK_THROWS_AS(thermalization_distance(two, zero, half, 3), InvalidArgument);
}

TEST_CASE("find_n_epsilon") {
  const auto tau = gibbs_state(HermitianOperator(qubit_h()), 0.5);
  const auto same = find_n_epsilon(tau, tau, qubit_h(), 0.1);
  REQUIRE(same.n_epsilon);
  CHECK(*same.n_epsilon == 1);

  const auto half = DensityMatrix::maximally_mixed(2);
  const auto r = find_n_epsilon(diag({1.0, 0.0}), half, ComplexMatrix::diagonal(std::vector<double>{0.0, 0.0}), 0.4);
  // first n with E|2K/n - 1| <= 0.4
  std::size_t want = 1;
  while (canonical_distance(want) > 0.4) ++want;
  REQUIRE(r.n_epsilon);
  CHECK(*r.n_epsilon == want);
  CHECK(want == 4);
  for (std::size_t k = 0; k < r.distances.size(); ++k) CHECK(std::abs(r.distances[k] - canonical_distance(k + 1)) < 1e-12);
  CHECK(std::abs(r.dmax_bits - 1.0) < 1e-12);
  CHECK(r.upper_bound == std::ceil(2.0 / 0.16));

  const auto miss = find_n_epsilon(diag({1.0, 0.0}), half, qubit_h(), 0.01, 3);
  CHECK_FALSE(miss.n_epsilon);
  CHECK(miss.distances.size() == 3);
}

TEST_CASE("bounds sandwich n_epsilon on commuting qubit instances") {
  SplitMix64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const double beta = rng.uniform(0.1, 2.0);
    const auto tau = gibbs_state(HermitianOperator(qubit_h()), beta);
    const auto omega = diag(random_probabilities(2, rng));
    const auto r = find_n_epsilon(omega, tau, qubit_h(), 0.3);
    REQUIRE(r.n_epsilon);
    CHECK(r.esc_verified);
    CHECK(static_cast<double>(*r.n_epsilon) <= r.upper_bound);
    REQUIRE(r.lower_bound);
    CHECK(*r.lower_bound <= static_cast<double>(*r.n_epsilon) + 1e-9);
  }
}

TEST_CASE("energy-subspace weights are conserved by every constructed channel") {
  SplitMix64 rng(13);
  const std::vector<double> e{0.0, 1.0, std::sqrt(2.0)};
  for (std::size_t n : {2u, 3u}) {
    const auto h = total_hamiltonian(ComplexMatrix::diagonal(e), n);
    const auto sd = eig_hermitian(h);
    const auto rho = random_density_matrix(sd.dimension(), rng);
    const auto before = energy_subspace_weights(rho.matrix(), sd);
    std::vector<RandomUnitaryChannel> channels{convex_split_channel(3, n)};
    channels.push_back(sample_energy_preserving_channel(e, n, rng.next()));
    channels.push_back(sample_energy_preserving_channel(e, n, rng.next()));
    channels.push_back(channels[1].then(channels[2]));
    channels.push_back(RandomUnitaryChannel::mix(channels[0], channels[3], 0.3));
    channels.push_back(CollisionProcess::all_pairs_swaps(ComplexMatrix::diagonal(e), n, 1.0).mixing_channel());
    for (const auto& ch : channels) {
      CHECK(ch.energy_preserving(h));
      const auto after = energy_subspace_weights(ch.apply(rho).matrix(), sd);
      REQUIRE(after.size() == before.size());
      for (std::size_t g = 0; g < before.size(); ++g) CHECK(std::abs(after[g] - before[g]) < 1e-10);
    }
    // evolved states too
    const auto proc = CollisionProcess::all_pairs_swaps(ComplexMatrix::diagonal(e), n, 1.0);
    const auto after = energy_subspace_weights(evolve_series(proc, rho, 0.7).state.matrix(), sd);
    for (std::size_t g = 0; g < before.size(); ++g) CHECK(std::abs(after[g] - before[g]) < 1e-10);
  }
}

TEST_CASE("dense channel dimension cap") {
  CHECK_THROWS_AS(convex_split_channel(2, 13), CapacityError);
}
