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
#include <limits>
#include <memory>
#include <vector>

#include "doctest.h"
#include "qtherm/error.hpp"
#include "qtherm/lattice.hpp"
#include "qtherm/random_ops.hpp"
#include "qtherm/states.hpp"
#include "qtherm/thermal.hpp"

using namespace qtherm;

namespace {

// exp(-beta H) by Taylor series with scaling and squaring; no eigensolver.
ComplexMatrix expm_taylor(const ComplexMatrix& a) {
  int squarings = 0;
  double scale = 1.0;
  while (a.max_abs() * static_cast<double>(a.rows()) * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  ComplexMatrix as = a;
  as *= scale;
  ComplexMatrix term = ComplexMatrix::identity(a.rows());
  ComplexMatrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * as;
    term *= 1.0 / k;
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

DisorderRealization make(int l, double delta, Boundary b, std::uint64_t seed, double coupling = 1.0) {
  ChainSpec spec;
  spec.sites = l;
  spec.disorder = delta;
  spec.boundary = b;
  spec.seed = seed;
  spec.coupling = coupling;
  return DisorderRealization::draw(spec, 0);
}

}  // namespace

TEST_CASE("gibbs_state examples") {
  const auto id = gibbs_state(HermitianOperator(pauli::z()), 0.0);
  CHECK((id.matrix() - cplx(0.5) * ComplexMatrix::identity(2)).max_abs() < 1e-15);

  const double e = 1.7, beta = 0.8;
  const std::vector<double> d{0.0, e};
  const auto two = gibbs_state(HermitianOperator(ComplexMatrix::diagonal(d)), beta);
  const double z = 1.0 + std::exp(-beta * e);
  CHECK(std::abs(two.matrix()(0, 0).real() - 1.0 / z) < 1e-15);
  CHECK(std::abs(two.matrix()(1, 1).real() - std::exp(-beta * e) / z) < 1e-15);

  const std::vector<double> gapped{0.0, 1.0, 2.0, 3.0};
  const auto cold = gibbs_state(HermitianOperator(ComplexMatrix::diagonal(gapped)), 50.0);
  CHECK(cold.matrix()(0, 0).real() > 1.0 - 1e-8);

  CHECK_THROWS_AS(gibbs_state(HermitianOperator(pauli::z()), std::numeric_limits<double>::infinity()),
                  InvalidArgument);
  CHECK_THROWS_AS(gibbs_state(HermitianOperator(pauli::z()), std::nan("")), InvalidArgument);
}

TEST_CASE("gibbs_state matches a Taylor-series exponential") {
  SplitMix64 rng(11);
  for (int t = 0; t < 5; ++t) {
    const auto h = random_hermitian(6, rng);
    const double beta = rng.uniform(-1.0, 2.0);
    ComplexMatrix e = expm_taylor(cplx(-beta) * h);
    e *= 1.0 / e.trace().real();
    const auto g = gibbs_state(HermitianOperator(h), beta);
    CHECK((g.matrix() - e).max_abs() < 1e-10);
    CHECK(std::abs(g.matrix().trace().real() - 1.0) < 1e-12);
    CHECK(commutator(g.matrix(), h).frobenius_norm() < 1e-10);
  }
}

TEST_CASE("gibbs_state is overflow safe at large beta") {
  const std::vector<double> d{-300.0, 0.0, 400.0};
  const auto g = gibbs_state(HermitianOperator(ComplexMatrix::diagonal(d)), 100.0);
  CHECK(std::abs(g.matrix()(0, 0).real() - 1.0) < 1e-15);
  const auto hot = gibbs_state(HermitianOperator(ComplexMatrix::diagonal(d)), -100.0);
  CHECK(std::abs(hot.matrix()(2, 2).real() - 1.0) < 1e-15);
}

TEST_CASE("populations are non-increasing in energy for beta >= 0") {
  const std::vector<double> e{-2.0, -0.5, -0.5, 0.3, 1.0, 4.0};
  for (double beta : {0.0, 0.1, 1.0, 10.0}) {
    const auto p = gibbs_populations(e, beta);
    for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] <= p[i - 1] + 1e-16);
  }
}

TEST_CASE("match_beta examples") {
  const std::vector<double> e{0.0, 1.0};
  // logistic inversion: E(beta) = 1 / (1 + e^beta)
  const auto m = match_beta(e, 1.0 / (1.0 + std::exp(1.0)));
  CHECK(std::abs(m.beta - 1.0) < 1e-6);
  CHECK(m.residual <= 1e-8);
  const auto m0 = match_beta(e, 0.268941);
  CHECK(std::abs(m0.beta - 1.0) < 1e-5);

  const std::vector<double> spread{-1.0, 0.2, 0.7, 3.0};
  const double mid = (-1.0 + 0.2 + 0.7 + 3.0) / 4.0;
  CHECK(std::abs(match_beta(spread, mid).beta) < 1e-7);

  const auto neg = match_beta(spread, 2.0);
  CHECK(neg.negative());
  CHECK(std::abs(thermal_energy(spread, neg.beta) - 2.0) <= 1e-8);
}

TEST_CASE("match_beta rejects targets outside the open spectral interval") {
  const std::vector<double> e{0.0, 1.0, 2.0};
  CHECK_THROWS_AS(match_beta(e, 0.0), InvalidArgument);
  CHECK_THROWS_AS(match_beta(e, 2.0), InvalidArgument);
  CHECK_THROWS_AS(match_beta(e, -1.0), InvalidArgument);
}

TEST_CASE("thermal energy is strictly decreasing on a beta grid") {
  const auto real = make(6, 2.0, Boundary::periodic, 4);
  const auto e = ChainSpectrum(real).energies();
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 40; ++i) {
    const double beta = -4.0 + 0.2 * i;
    const double u = thermal_energy(e, beta);
    CHECK(u < prev);
    prev = u;
  }
}

TEST_CASE("match_beta is invariant under a uniform energy shift") {
  const auto real = make(8, 3.0, Boundary::periodic, 17);
  auto e = ChainSpectrum(real).energies();
  const double target = 0.37 * e.front() + 0.63 * e.back();
  const auto a = match_beta(e, target);
  for (double& x : e) x += 12.5;
  const auto b = match_beta(e, target + 12.5);
  CHECK(std::abs(a.beta - b.beta) < 1e-6);
  CHECK(a.residual <= 1e-8);
  CHECK(b.residual <= 1e-8);
}

TEST_CASE("match_beta from a state vector on the chain") {
  const auto real = make(6, 1.0, Boundary::periodic, 2);
  const auto h = build_chain_hamiltonian(real);
  const Vector psi = neel_variant_state(6);
  const auto m = match_beta(h, psi);
  const double target = inner(psi, h.matrix() * std::span<const cplx>(psi)).real();
  const auto tau = gibbs_state(h, m.beta);
  CHECK(std::abs((tau.matrix() * h.matrix()).trace().real() - target) <= 1e-8);
}

TEST_CASE("thermal targets on a chain without bonds coincide") {
  const auto real = make(6, 2.0, Boundary::periodic, 9, 0.0);
  const ChainSpectrum cs(real);
  for (int size : {1, 2, 3}) {
    const Region r{1, size};
    const auto a = thermal_target(cs, r, 0.7, TargetKind::hamiltonian_gibbs);
    const auto b = thermal_target(cs, r, 0.7, TargetKind::reduced_global_gibbs);
    CHECK((a.state.matrix() - b.state.matrix()).max_abs() < 1e-10);
  }
}

TEST_CASE("thermal targets over the whole open chain coincide") {
  const auto real = make(5, 2.0, Boundary::open, 12);
  const ChainSpectrum cs(real);
  const auto a = thermal_target(cs, {0, 5}, 0.4, TargetKind::hamiltonian_gibbs);
  const auto b = thermal_target(cs, {0, 5}, 0.4, TargetKind::reduced_global_gibbs);
  CHECK((a.state.matrix() - b.state.matrix()).max_abs() < 1e-10);
}

TEST_CASE("reduced global Gibbs agrees with a dense partial trace and differs from tau(H_R)") {
  const auto real = make(6, 1.0, Boundary::periodic, 21);
  const ChainSpectrum cs(real);
  const double beta = 0.6;
  const Region r{0, 3};
  const auto dense = gibbs_state(build_chain_hamiltonian(real), beta);
  const std::vector<std::size_t> dims(6, 2);
  const std::vector<std::size_t> keep{3, 4, 5};
  const auto oracle = partial_trace(dense, dims, keep);
  const auto b = thermal_target(cs, r, beta, TargetKind::reduced_global_gibbs);
  CHECK((b.state.matrix() - oracle.matrix()).max_abs() < 1e-11);
  const auto a = thermal_target(cs, r, beta, TargetKind::hamiltonian_gibbs);
  CHECK(trace_distance(a.state, b.state) > 1e-3);
  CHECK((a.state.matrix() - gibbs_state(reduced_hamiltonian(real, r), beta).matrix()).max_abs() < 1e-10);
}

TEST_CASE("target kind names round trip") {
  for (auto k : {TargetKind::hamiltonian_gibbs, TargetKind::reduced_global_gibbs})
    CHECK(parse_target_kind(target_kind_name(k)) == k);
  CHECK_THROWS_AS(parse_target_kind("canonical"), InvalidArgument);
}
