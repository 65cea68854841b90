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

#include "qtherm/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qtherm/error.hpp"
#include "qtherm/random_ops.hpp"
#include "qtherm/rng.hpp"
#include "qtherm/spectral.hpp"
#include "qtherm/thermal.hpp"

namespace qtherm {
namespace {

constexpr std::size_t kCollisionsPerN = 8;

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (std::size_t i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(out);
}

double composition_count(std::size_t n, std::size_t d) { return binomial(n + d - 1, d - 1); }

double log_multinomial(std::size_t n, std::span<const std::uint32_t> t) {
  double out = std::lgamma(static_cast<double>(n) + 1.0);
  for (auto k : t) out -= std::lgamma(static_cast<double>(k) + 1.0);
  return out;
}

// Sorts entries by key and links neighbours closer than tol into clusters.
template <class Key>
std::vector<std::vector<std::size_t>> cluster_by(const std::vector<Key>& keys, double tol) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || !(static_cast<double>(keys[order[i]] - keys[order[i - 1]]) < tol)) out.emplace_back();
    out.back().push_back(order[i]);
  }
  return out;
}

std::vector<std::size_t> string_digits(std::size_t s, std::size_t d, std::size_t n) {
  std::vector<std::size_t> digits(n);
  for (std::size_t k = n; k-- > 0;) {
    digits[k] = s % d;
    s /= d;
  }
  return digits;
}

std::size_t dense_dimension(std::size_t d, std::size_t n) {
  std::size_t dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (dim > kMaxDenseChannelDimension / d) {
      throw CapacityError("dense path needs d^n <= " + std::to_string(kMaxDenseChannelDimension));
    }
    dim *= d;
  }
  return dim;
}

template <class Sum>
EscReport run_esc(std::size_t d, std::size_t n_max, std::size_t pair_budget, double tol, Sum&& total_energy) {
  EscReport report;
  report.n_max = n_max;
  report.verdicts.assign(n_max, EscVerdict::unchecked);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double count = composition_count(n, d);
    if (count * count > static_cast<double>(pair_budget)) {
      report.incomplete = true;
      break;
    }
    const auto types = compositions(n, d);
    std::vector<decltype(total_energy(types[0]))> sums;
    sums.reserve(types.size());
    for (const auto& t : types) sums.push_back(total_energy(t));
    bool fail = false;
    std::size_t recorded = 0;
    for (const auto& cluster : cluster_by(sums, tol)) {
      if (cluster.size() < 2) continue;
      fail = true;
      for (std::size_t i = 1; i < cluster.size() && recorded < kCollisionsPerN; ++i, ++recorded) {
        const auto a = cluster[i - 1], b = cluster[i];
        report.collisions.push_back(
            {n, types[a], types[b], std::abs(static_cast<double>(sums[b] - sums[a]))});
      }
    }
    report.verdicts[n - 1] = fail ? EscVerdict::fail : EscVerdict::pass;
  }
  return report;
}

}  // namespace

std::vector<std::vector<std::uint32_t>> compositions(std::size_t n, std::size_t d) {
  if (d == 0) throw InvalidArgument("compositions: d must be >= 1");
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> t(d, 0);
  t[d - 1] = static_cast<std::uint32_t>(n);
  do {
    out.push_back(t);
  } while (next_composition(t));
  return out;
}

bool next_composition(std::span<std::uint32_t> t) {
  const std::size_t d = t.size();
  if (d < 2) return false;
  std::size_t k = d - 1;
  while (k > 0 && t[k] == 0) --k;
  if (k == 0) return false;
  const std::uint32_t tail = t[k];
  t[k - 1] += 1;
  t[k] = 0;
  t[d - 1] = tail - 1;
  return true;
}

bool EscReport::passes(std::size_t up_to) const {
  if (up_to > verdicts.size()) return false;
  for (std::size_t n = 1; n <= up_to; ++n)
    if (verdicts[n - 1] != EscVerdict::pass) return false;
  return true;
}

EscReport check_esc(std::span<const double> energies, std::size_t n_max, double tol_e, std::size_t pair_budget) {
  if (energies.empty()) throw InvalidArgument("check_esc: need at least one energy");
  std::vector<double> e(energies.begin(), energies.end());
  EscReport report = run_esc(e.size(), n_max, pair_budget, tol_e, [&](const std::vector<std::uint32_t>& t) {
    double s = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) s += static_cast<double>(t[k]) * e[k];
    return s;
  });
  report.energies = std::move(e);
  report.tol_e = tol_e;
  return report;
}

EscReport check_esc_exact(std::span<const Rational> energies, std::size_t n_max, std::size_t pair_budget) {
  if (energies.empty()) throw InvalidArgument("check_esc_exact: need at least one energy");
  using i128 = __int128;
  i128 common = 1;
  for (const auto& r : energies) {
    if (r.den <= 0) throw InvalidArgument("check_esc_exact: denominators must be positive");
    const std::int64_t g = std::gcd(static_cast<std::int64_t>(common % r.den), r.den);
    common = common / g * r.den;
    if (common > (i128{1} << 80)) throw CapacityError("check_esc_exact: common denominator too large");
  }
  std::vector<i128> scaled;
  for (const auto& r : energies) scaled.push_back(static_cast<i128>(r.num) * (common / r.den));
  EscReport report = run_esc(scaled.size(), n_max, pair_budget, 0.5, [&](const std::vector<std::uint32_t>& t) {
    i128 s = 0;
    for (std::size_t k = 0; k < t.size(); ++k) s += static_cast<i128>(t[k]) * scaled[k];
    return s;
  });
  for (auto& c : report.collisions) c.gap = 0.0;
  for (const auto& r : energies) report.energies.push_back(static_cast<double>(r.num) / static_cast<double>(r.den));
  report.tol_e = 0.0;
  report.exact = true;
  return report;
}

double SubspaceProfile::total_dimension() const { return std::accumulate(dimensions.begin(), dimensions.end(), 0.0); }

SubspaceProfile subspace_profile(std::size_t d, std::size_t n) {
  SubspaceProfile out;
  out.d = d;
  out.n = n;
  out.types = compositions(n, d);
  for (const auto& t : out.types) {
    double m = 1.0;
    std::size_t placed = 0;
    for (auto k : t) {
      placed += k;
      m *= binomial(placed, k);
    }
    out.dimensions.push_back(m);
  }
  return out;
}

std::vector<double> type_weights(const SubspaceProfile& profile, std::span<const double> p, std::span<const double> q) {
  const std::size_t d = profile.d, n = profile.n;
  if (p.size() != d || q.size() != d) throw InvalidArgument("type_weights: dimension mismatch");
  std::vector<double> out;
  out.reserve(profile.types.size());
  std::vector<std::uint32_t> rest(d);
  for (const auto& t : profile.types) {
    double w = 0.0;
    for (std::size_t l = 0; l < d; ++l) {
      if (t[l] == 0 || p[l] == 0.0) continue;
      rest.assign(t.begin(), t.end());
      rest[l] -= 1;
      double term = p[l] * std::exp(log_multinomial(n - 1, rest));
      for (std::size_t j = 0; j < d; ++j) term *= std::pow(q[j], static_cast<double>(rest[j]));
      w += term;
    }
    out.push_back(w);
  }
  return out;
}

double optimal_distance_fixed_weights(std::span<const double> p, std::span<const double> q,
                                      std::span<const double> energies, std::size_t n, double tol_e) {
  const std::size_t d = energies.size();
  if (p.size() != d || q.size() != d) throw InvalidArgument("optimal_distance_fixed_weights: dimension mismatch");
  if (n == 0) throw InvalidArgument("optimal_distance_fixed_weights: n must be >= 1");
  const SubspaceProfile profile = subspace_profile(d, n);
  const auto w_rho = type_weights(profile, p, q);
  const auto w_sigma = type_weights(profile, q, q);
  std::vector<double> type_energy;
  for (const auto& t : profile.types) {
    double e = 0.0;
    for (std::size_t k = 0; k < d; ++k) e += static_cast<double>(t[k]) * energies[k];
    type_energy.push_back(e);
  }
  double total = 0.0;
  for (const auto& cluster : cluster_by(type_energy, tol_e)) {
    double diff = 0.0;
    for (std::size_t i : cluster) diff += w_rho[i] - w_sigma[i];
    total += std::abs(diff);
  }
  return total;
}

double optimal_distance_fixed_weights(const DensityMatrix& rho, const DensityMatrix& sigma, const ComplexMatrix& h,
                                      std::size_t n, double tol_e) {
  if (rho.dimension() != h.rows() || sigma.dimension() != h.rows()) {
    throw InvalidArgument("optimal_distance_fixed_weights: dimension mismatch");
  }
  const auto sd = eig_hermitian(h);
  const ComplexMatrix& v = sd.vectors;
  const ComplexMatrix r = v.adjoint() * rho.matrix() * v;
  const ComplexMatrix s = v.adjoint() * sigma.matrix() * v;
  const std::size_t d = h.rows();
  std::vector<double> p(d), q(d);
  for (std::size_t i = 0; i < d; ++i) {
    p[i] = r(i, i).real();
    q[i] = s(i, i).real();
    for (std::size_t j = 0; j < d; ++j) {
      if (i != j && (std::abs(r(i, j)) > 1e-9 || std::abs(s(i, j)) > 1e-9)) {
        throw InvalidArgument("optimal_distance_fixed_weights: states are not diagonal in the eigenbasis of H");
      }
    }
  }
  return optimal_distance_fixed_weights(p, q, sd.values, n, tol_e);
}

RandomUnitaryChannel sample_energy_preserving_channel(std::span<const double> energies, std::size_t n,
                                                      std::uint64_t seed, double tol_e) {
  const std::size_t d = energies.size();
  const std::size_t dim = dense_dimension(d, n);
  std::vector<double> string_energy(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    double e = 0.0;
    for (std::size_t k : string_digits(s, d, n)) e += energies[k];
    string_energy[s] = e;
  }
  const auto subspaces = cluster_by(string_energy, tol_e);
  SplitMix64 rng(seed);
  const std::size_t count = 1 + static_cast<std::size_t>(rng.below(8));
  std::vector<double> weights = random_probabilities(count, rng);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  std::vector<ComplexMatrix> unitaries;
  for (std::size_t c = 0; c < count; ++c) {
    ComplexMatrix u(dim, dim);
    for (const auto& block : subspaces) {
      const ComplexMatrix b = haar_unitary(block.size(), rng);
      for (std::size_t i = 0; i < block.size(); ++i)
        for (std::size_t j = 0; j < block.size(); ++j) u(block[i], block[j]) = b(i, j);
    }
    unitaries.push_back(std::move(u));
  }
  return RandomUnitaryChannel(std::move(weights), std::move(unitaries));
}

OptimalityReport verify_optimality(std::span<const double> p, std::span<const double> q,
                                   std::span<const double> energies, std::size_t n, std::size_t trials,
                                   std::uint64_t seed) {
  const std::size_t d = energies.size();
  if (p.size() != d || q.size() != d) throw InvalidArgument("verify_optimality: dimension mismatch");
  OptimalityReport out;
  out.esc_pass = check_esc(energies, n).passes(n);
  out.counterexample_search = !out.esc_pass;
  const DensityMatrix rho = DensityMatrix::diagonal(p);
  const DensityMatrix sigma = DensityMatrix::diagonal(q);
  out.channel_distance = thermalization_distance(convex_split_channel(d, n), rho, sigma, n);
  out.optimum = optimal_distance_fixed_weights(p, q, energies, n);
  out.equality_holds = std::abs(out.channel_distance - out.optimum) <= 1e-9;
  out.trials = trials;
  out.best_sampled = trials > 0 ? std::numeric_limits<double>::infinity() : out.channel_distance;
  for (std::size_t k = 0; k < trials; ++k) {
    const auto channel = sample_energy_preserving_channel(energies, n, derive_seed(seed, k));
    const double dist = thermalization_distance(channel, rho, sigma, n);
    out.best_sampled = std::min(out.best_sampled, dist);
    if (dist < out.channel_distance - 1e-9) ++out.violations;
  }
  return out;
}

CounterexampleReport appendix_c_counterexample(std::span<const double> energies, double beta) {
  if (energies.size() != 4) throw InvalidArgument("appendix_c_counterexample: four energies required");
  const double scale = std::max({std::abs(energies[0]), std::abs(energies[1]), std::abs(energies[2]),
                                 std::abs(energies[3]), 1.0});
  if (std::abs((energies[1] - energies[0]) - (energies[3] - energies[2])) > 1e-12 * scale) {
    throw InvalidArgument("appendix_c_counterexample: energies must satisfy E2 - E1 = E4 - E3");
  }
  CounterexampleReport out;
  out.populations = gibbs_populations(energies, beta);
  const auto& p = out.populations;
  const std::vector<double> ground{1.0, 0.0, 0.0, 0.0};
  const DensityMatrix rho = DensityMatrix::diagonal(ground);
  const DensityMatrix tau = DensityMatrix::diagonal(p);
  const ComplexMatrix rho2 = convex_split_state(rho, tau, 2).matrix();
  const ComplexMatrix tau2 = kron(tau.matrix(), tau.matrix());

  // Pi projects onto the strings (a, b) with E_a + E_b = E_1 + E_4.
  const double target = energies[0] + energies[3];
  std::vector<double> string_energy(16);
  ComplexMatrix pi(16, 16);
  double rank = 0.0;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      string_energy[a * 4 + b] = energies[a] + energies[b];
      if (std::abs(energies[a] + energies[b] - target) <= 1e-12 * scale) {
        pi(a * 4 + b, a * 4 + b) = 1.0;
        rank += 1.0;
      }
    }
  const ComplexMatrix block = pi * rho2 * pi;
  const double weight = block.trace().real();
  ComplexMatrix star = rho2 - block;
  star.add_scaled(weight / rank, pi);

  out.d_convex_split = 0.5 * trace_norm(rho2 - tau2);
  out.d_improved = 0.5 * trace_norm(star - tau2);
  out.difference = out.d_improved - out.d_convex_split;
  out.predicted = p[3] * (2.0 * p[0] - 1.0);
  out.residual = std::abs(out.difference - out.predicted);
  for (const auto& cluster : cluster_by(string_energy, 1e-12 * scale)) {
    double w2 = 0.0, ws = 0.0;
    for (std::size_t i : cluster) {
      w2 += rho2(i, i).real();
      ws += star(i, i).real();
    }
    out.weight_defect = std::max(out.weight_defect, std::abs(w2 - ws));
  }
  out.precondition = p[0] >= 0.25 - 1e-15 && p[0] <= 0.5;
  out.strict = out.difference < 0.0;
  std::ostringstream note;
  if (p[0] > 0.5) {
    note << "p1 = " << p[0] << " > 1/2: improvement is non-strict (difference " << out.difference << ")";
  } else if (p[0] < 0.25) {
    note << "p1 = " << p[0] << " < 1/4: outside the regime of the identity";
  } else {
    note << "identity residual " << out.residual;
  }
  out.note = note.str();
  return out;
}

TrivialHamiltonianReport trivial_hamiltonian_note(std::size_t d, std::size_t inputs, std::uint64_t seed) {
  if (d < 2) throw InvalidArgument("trivial_hamiltonian_note: d must be >= 2");
  std::vector<ComplexMatrix> unitaries;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      ComplexMatrix u(d, d);
      for (std::size_t j = 0; j < d; ++j) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(b * j) / static_cast<double>(d);
        u((j + a) % d, j) = std::polar(1.0, phase);
      }
      unitaries.push_back(std::move(u));
    }
  const std::size_t count = unitaries.size();
  const RandomUnitaryChannel channel(std::vector<double>(count, 1.0 / static_cast<double>(count)),
                                     std::move(unitaries));
  TrivialHamiltonianReport out;
  out.d = d;
  out.unitaries = count;
  out.randomness_bits = std::log2(static_cast<double>(count));
  out.referenced_bits = std::log2(static_cast<double>(d));
  const ComplexMatrix mixed = DensityMatrix::maximally_mixed(d).matrix();
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < inputs; ++i) {
    const auto rho = random_density_matrix(d, rng);
    out.max_distance = std::max(out.max_distance, trace_norm(channel.apply(rho.matrix()) - mixed));
  }
  return out;
}

}  // namespace qtherm
