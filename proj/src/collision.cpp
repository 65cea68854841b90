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

#include "qtherm/collision.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "qtherm/entropy.hpp"
#include "qtherm/error.hpp"
#include "qtherm/optimality.hpp"
#include "qtherm/rng.hpp"

namespace qtherm {
namespace {

std::size_t checked_power(std::size_t d, std::size_t n, std::size_t cap, const char* who) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (out > cap / std::max<std::size_t>(d, 1)) {
      throw CapacityError(std::string(who) + ": " + std::to_string(d) + "^" + std::to_string(n) +
                          " exceeds the dense dimension cap " + std::to_string(cap));
    }
    out *= d;
  }
  return out;
}

// U|s> = |map[s]> for the subsystem permutation perm.
std::vector<std::uint32_t> permutation_map(std::size_t d, std::span<const std::size_t> perm) {
  const std::size_t n = perm.size();
  const std::size_t dim = checked_power(d, n, kMaxDenseChannelDimension, "permutation_unitary");
  std::vector<std::size_t> stride(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t s = 1;
    for (std::size_t j = k + 1; j < n; ++j) s *= d;
    stride[k] = s;
  }
  std::vector<std::uint32_t> map(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    std::size_t out = 0;
    for (std::size_t k = 0; k < n; ++k) out += ((s / stride[k]) % d) * stride[perm[k]];
    map[s] = static_cast<std::uint32_t>(out);
  }
  return map;
}

ComplexMatrix relabel(const ComplexMatrix& rho, const std::vector<std::uint32_t>& map) {
  const std::size_t dim = rho.rows();
  ComplexMatrix out(dim, dim);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) out(map[a], map[b]) = rho(a, b);
  return out;
}

double unitarity_defect(const ComplexMatrix& u) {
  return (u.adjoint() * u - ComplexMatrix::identity(u.rows())).max_abs();
}

}  // namespace

ComplexMatrix total_hamiltonian(const ComplexMatrix& local, std::size_t n) {
  if (!local.square() || n == 0) throw InvalidArgument("total_hamiltonian: square local term and n >= 1 required");
  const std::size_t d = local.rows();
  const std::size_t dim = checked_power(d, n, kMaxDenseChannelDimension, "total_hamiltonian");
  ComplexMatrix out(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const ComplexMatrix left = ComplexMatrix::identity(checked_power(d, i, dim, "total_hamiltonian"));
    const ComplexMatrix right = ComplexMatrix::identity(checked_power(d, n - i - 1, dim, "total_hamiltonian"));
    out += kron(kron(left, local), right);
  }
  return out;
}

ComplexMatrix permutation_unitary(std::size_t d, std::span<const std::size_t> perm) {
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t k : perm) {
    if (k >= perm.size() || seen[k]) throw InvalidArgument("permutation_unitary: not a permutation");
    seen[k] = true;
  }
  const auto map = permutation_map(d, perm);
  ComplexMatrix u(map.size(), map.size());
  for (std::size_t s = 0; s < map.size(); ++s) u(map[s], s) = 1.0;
  return u;
}

ComplexMatrix swap_unitary(std::size_t d, std::size_t n, std::size_t i, std::size_t j) {
  if (i >= n || j >= n) throw InvalidArgument("swap_unitary: subsystem index out of range");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[i], perm[j]);
  return permutation_unitary(d, perm);
}

RandomUnitaryChannel::RandomUnitaryChannel(std::vector<double> probabilities, std::vector<ComplexMatrix> unitaries)
    : p_(std::move(probabilities)), u_(std::move(unitaries)) {
  if (p_.empty() || p_.size() != u_.size()) throw InvalidArgument("RandomUnitaryChannel: one probability per unitary");
  dim_ = u_.front().rows();
  double total = 0.0;
  for (double p : p_) {
    if (!(p >= 0.0)) throw InvalidArgument("RandomUnitaryChannel: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("RandomUnitaryChannel: probabilities do not sum to 1");
  perm_.resize(u_.size());
  for (std::size_t k = 0; k < u_.size(); ++k) {
    const ComplexMatrix& u = u_[k];
    if (!u.square() || u.rows() != dim_) throw InvalidArgument("RandomUnitaryChannel: unitaries differ in shape");
    std::vector<std::uint32_t> col(dim_);
    bool permutation = true;
    for (std::size_t i = 0; i < dim_ && permutation; ++i) {
      int ones = 0;
      for (std::size_t j = 0; j < dim_; ++j) {
        if (u(i, j) == cplx(1.0, 0.0)) {
          ++ones;
          col[i] = static_cast<std::uint32_t>(j);
        } else if (u(i, j) != cplx{}) {
          permutation = false;
          break;
        }
      }
      if (ones != 1) permutation = false;
    }
    if (permutation) {
      // Inverse map: U|col[i]> = |i>.
      std::vector<std::uint32_t> map(dim_);
      for (std::size_t i = 0; i < dim_; ++i) map[col[i]] = static_cast<std::uint32_t>(i);
      std::vector<bool> hit(dim_, false);
      for (auto c : col) hit[c] = true;
      if (std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) {
        perm_[k] = std::move(map);
        continue;
      }
    }
    const double defect = unitarity_defect(u);
    if (defect > 1e-10) {
      std::ostringstream msg;
      msg << "RandomUnitaryChannel: operator " << k << " is not unitary (defect " << defect << ")";
      throw InvalidArgument(msg.str());
    }
  }
}

RandomUnitaryChannel RandomUnitaryChannel::identity(std::size_t dim) {
  return RandomUnitaryChannel({1.0}, {ComplexMatrix::identity(dim)});
}

ComplexMatrix RandomUnitaryChannel::apply(const ComplexMatrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) throw InvalidArgument("RandomUnitaryChannel::apply: dimension mismatch");
  ComplexMatrix out(dim_, dim_);
  for (std::size_t k = 0; k < u_.size(); ++k) {
    if (p_[k] == 0.0) continue;
    if (!perm_[k].empty()) {
      out.add_scaled(p_[k], relabel(rho, perm_[k]));
    } else {
      out.add_scaled(p_[k], conjugate_by(u_[k], rho));
    }
  }
  out.symmetrize();
  return out;
}

DensityMatrix RandomUnitaryChannel::apply(const DensityMatrix& rho) const {
  return DensityMatrix::from_trusted(apply(rho.matrix()));
}

bool RandomUnitaryChannel::energy_preserving(const ComplexMatrix& h, double tol) const {
  if (h.rows() != dim_ || h.cols() != dim_) throw InvalidArgument("energy_preserving: dimension mismatch");
  const double scale = h.frobenius_norm();
  for (const auto& u : u_)
    if (commutator_norm(u, h) > tol * scale) return false;
  return true;
}

RandomUnitaryChannel RandomUnitaryChannel::then(const RandomUnitaryChannel& after) const {
  if (after.dim_ != dim_) throw InvalidArgument("RandomUnitaryChannel::then: dimension mismatch");
  std::vector<double> p;
  std::vector<ComplexMatrix> u;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < after.size(); ++j) {
      p.push_back(p_[i] * after.p_[j]);
      u.push_back(after.u_[j] * u_[i]);
    }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  return RandomUnitaryChannel(std::move(p), std::move(u));
}

RandomUnitaryChannel RandomUnitaryChannel::mix(const RandomUnitaryChannel& a, const RandomUnitaryChannel& b, double w) {
  if (a.dim_ != b.dim_) throw InvalidArgument("RandomUnitaryChannel::mix: dimension mismatch");
  if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("RandomUnitaryChannel::mix: weight outside [0, 1]");
  std::vector<double> p;
  std::vector<ComplexMatrix> u;
  for (std::size_t i = 0; i < a.size(); ++i) {
    p.push_back(w * a.p_[i]);
    u.push_back(a.u_[i]);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    p.push_back((1.0 - w) * b.p_[i]);
    u.push_back(b.u_[i]);
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  return RandomUnitaryChannel(std::move(p), std::move(u));
}

CollisionProcess::CollisionProcess(ComplexMatrix local_hamiltonian, std::size_t subsystems,
                                   std::vector<ComplexMatrix> unitaries, std::vector<double> rates, double tol)
    : local_(std::move(local_hamiltonian)), n_(subsystems), u_(std::move(unitaries)), rates_(std::move(rates)) {
  if (!local_.is_hermitian()) throw InvalidArgument("CollisionProcess: local Hamiltonian is not Hermitian");
  if (u_.empty() || u_.size() != rates_.size()) throw InvalidArgument("CollisionProcess: one rate per unitary");
  total_ = total_hamiltonian(local_, n_);
  const double scale = total_.frobenius_norm();
  for (std::size_t k = 0; k < u_.size(); ++k) {
    if (!(rates_[k] > 0.0) || !std::isfinite(rates_[k])) throw InvalidArgument("CollisionProcess: rates must be positive");
    if (u_[k].rows() != total_.rows() || !u_[k].square()) throw InvalidArgument("CollisionProcess: unitary shape");
    const double defect = unitarity_defect(u_[k]);
    if (defect > 1e-10) throw InvalidArgument("CollisionProcess: operator " + std::to_string(k) + " is not unitary");
    const double c = commutator_norm(u_[k], total_);
    if (c > tol * scale) {
      std::ostringstream msg;
      msg << "CollisionProcess: unitary " << k << " does not conserve energy, ||[U, H]||_F = " << c;
      throw InvalidArgument(msg.str());
    }
    total_rate_ += rates_[k];
  }
}

CollisionProcess CollisionProcess::all_pairs_swaps(ComplexMatrix local_hamiltonian, std::size_t subsystems,
                                                   double rate) {
  if (subsystems < 2) throw InvalidArgument("all_pairs_swaps: need at least two subsystems");
  const std::size_t d = local_hamiltonian.rows();
  std::vector<ComplexMatrix> u;
  std::vector<double> r;
  for (std::size_t i = 0; i < subsystems; ++i)
    for (std::size_t j = i + 1; j < subsystems; ++j) {
      u.push_back(swap_unitary(d, subsystems, i, j));
      r.push_back(rate);
    }
  return CollisionProcess(std::move(local_hamiltonian), subsystems, std::move(u), std::move(r));
}

RandomUnitaryChannel CollisionProcess::mixing_channel() const {
  std::vector<double> p(rates_.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = rates_[k] / total_rate_;
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  return RandomUnitaryChannel(std::move(p), u_);
}

PoissonTruncation poisson_truncation(double mean, double tail_tol, std::size_t max_order) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw InvalidArgument("poisson_truncation: mean must be finite and >= 0");
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw InvalidArgument("poisson_truncation: tail tolerance outside (0, 1)");
  PoissonTruncation out;
  if (mean == 0.0) {
    out.weights = {1.0};
    return out;
  }
  const double log_mean = std::log(mean);
  double sum = 0.0, carry = 0.0;  // Kahan
  for (std::size_t m = 0;; ++m) {
    if (m > max_order) {
      std::ostringstream msg;
      msg << "poisson_truncation: order above " << max_order << " needed for mean " << mean
          << "; use a smaller time or smaller rates";
      throw CapacityError(msg.str());
    }
    const double w = std::exp(-mean + static_cast<double>(m) * log_mean - std::lgamma(static_cast<double>(m) + 1.0));
    out.weights.push_back(w);
    const double y = w - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    if (sum >= 1.0 - tail_tol && static_cast<double>(m) >= mean) break;
  }
  out.retained = sum;
  for (double& w : out.weights) w /= sum;
  return out;
}

SeriesSolution evolve_series(const CollisionProcess& proc, const DensityMatrix& rho0, double t, double tail_tol,
                             std::size_t max_order) {
  if (!(t >= 0.0)) throw InvalidArgument("evolve_series: t must be >= 0");
  if (rho0.dimension() != proc.dimension()) throw InvalidArgument("evolve_series: dimension mismatch");
  const PoissonTruncation trunc = poisson_truncation(proc.total_rate() * t, tail_tol, max_order);
  const RandomUnitaryChannel lambda = proc.mixing_channel();
  ComplexMatrix current = rho0.matrix();
  ComplexMatrix acc = trunc.weights[0] * current;
  for (std::size_t m = 1; m < trunc.weights.size(); ++m) {
    current = lambda.apply(current);
    acc.add_scaled(trunc.weights[m], current);
  }
  acc.symmetrize();
  SeriesSolution out;
  out.state = DensityMatrix::from_trusted(std::move(acc));
  out.order = trunc.order();
  out.total_rate = proc.total_rate();
  out.tail = 1.0 - trunc.retained;
  return out;
}

DensityMatrix evolve_rk4(const CollisionProcess& proc, const DensityMatrix& rho0, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("evolve_rk4: t must be >= 0");
  if (t == 0.0) return rho0;
  const double rate = proc.total_rate();
  const double dt0 = std::min(0.01 / rate, t / 1000.0);
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt0));
  const double dt = t / static_cast<double>(steps);
  const RandomUnitaryChannel lambda = proc.mixing_channel();
  auto f = [&](const ComplexMatrix& r) {
    ComplexMatrix out = lambda.apply(r);
    out -= r;
    out *= rate;
    return out;
  };
  ComplexMatrix rho = rho0.matrix();
  for (std::size_t s = 0; s < steps; ++s) {
    const ComplexMatrix k1 = f(rho);
    const ComplexMatrix k2 = f(rho + (0.5 * dt) * k1);
    const ComplexMatrix k3 = f(rho + (0.5 * dt) * k2);
    const ComplexMatrix k4 = f(rho + dt * k3);
    rho.add_scaled(dt / 6.0, k1);
    rho.add_scaled(dt / 3.0, k2);
    rho.add_scaled(dt / 3.0, k3);
    rho.add_scaled(dt / 6.0, k4);
  }
  rho.symmetrize();
  return DensityMatrix::from_trusted(std::move(rho));
}

DensityMatrix evolve_trajectories(const CollisionProcess& proc, const DensityMatrix& rho0, double t,
                                  std::size_t n_traj, std::uint64_t seed, TrajectorySampler sampler,
                                  unsigned workers) {
  if (n_traj == 0) throw InvalidArgument("evolve_trajectories: n_traj must be >= 1");
  if (!(t >= 0.0)) throw InvalidArgument("evolve_trajectories: t must be >= 0");
  const std::size_t dim = proc.dimension();
  if (rho0.dimension() != dim) throw InvalidArgument("evolve_trajectories: dimension mismatch");
  const auto& unitaries = proc.unitaries();
  const auto& rates = proc.rates();
  const double total_rate = proc.total_rate();
  const std::size_t chunks = (n_traj + kTrajectoryChunk - 1) / kTrajectoryChunk;
  std::vector<ComplexMatrix> sums(chunks);

  auto run_chunk = [&](std::size_t c) {
    SplitMix64 rng(derive_seed(seed, c));
    const std::size_t count = std::min(kTrajectoryChunk, n_traj - c * kTrajectoryChunk);
    ComplexMatrix sum(dim, dim);
    std::vector<double> clocks(rates.size());
    std::vector<std::size_t> events;
    for (std::size_t traj = 0; traj < count; ++traj) {
      events.clear();
      if (sampler == TrajectorySampler::competing_clocks) {
        for (std::size_t k = 0; k < rates.size(); ++k) clocks[k] = rng.exponential(rates[k]);
        while (true) {
          const auto it = std::min_element(clocks.begin(), clocks.end());
          if (*it > t) break;
          const auto k = static_cast<std::size_t>(it - clocks.begin());
          events.push_back(k);
          *it += rng.exponential(rates[k]);
        }
      } else {
        double clock = rng.exponential(total_rate);
        while (clock <= t) {
          double u = rng.uniform() * total_rate;
          std::size_t k = 0;
          while (k + 1 < rates.size() && u >= rates[k]) u -= rates[k++];
          events.push_back(k);
          clock += rng.exponential(total_rate);
        }
      }
      if (events.empty()) {
        sum += rho0.matrix();
        continue;
      }
      ComplexMatrix w = unitaries[events[0]];
      for (std::size_t e = 1; e < events.size(); ++e) w = unitaries[events[e]] * w;
      sum += conjugate_by(w, rho0.matrix());
    }
    sums[c] = std::move(sum);
  };

  const unsigned n_workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));
  if (n_workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < chunks; c = next++) run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }
  ComplexMatrix total(dim, dim);
  for (const auto& s : sums) total += s;
  total *= 1.0 / static_cast<double>(n_traj);
  total.symmetrize();
  return DensityMatrix::from_trusted(std::move(total));
}

RandomUnitaryChannel convex_split_channel(std::size_t d, std::size_t n) {
  if (n == 0) throw InvalidArgument("convex_split_channel: n must be >= 1");
  checked_power(d, n, kMaxDenseChannelDimension, "convex_split_channel");
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  std::vector<ComplexMatrix> u;
  for (std::size_t i = 0; i < n; ++i) u.push_back(swap_unitary(d, n, 0, i));
  return RandomUnitaryChannel(std::move(p), std::move(u));
}

DensityMatrix convex_split_state(const DensityMatrix& omega, const DensityMatrix& tau, std::size_t n) {
  if (n == 0) throw InvalidArgument("convex_split_state: n must be >= 1");
  if (omega.dimension() != tau.dimension()) throw InvalidArgument("convex_split_state: dimension mismatch");
  const std::size_t d = tau.dimension();
  const std::size_t dim = checked_power(d, n, kMaxDenseChannelDimension, "convex_split_state");
  std::vector<ComplexMatrix> powers{ComplexMatrix::identity(1)};
  for (std::size_t k = 1; k < n; ++k) powers.push_back(kron(powers.back(), tau.matrix()));
  ComplexMatrix acc(dim, dim);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) acc.add_scaled(w, kron(kron(powers[i], omega.matrix()), powers[n - 1 - i]));
  acc.symmetrize();
  return DensityMatrix::from_trusted(std::move(acc));
}

DensityMatrix symmetrize_subsystems(const DensityMatrix& rho, std::size_t d, std::size_t n) {
  const std::size_t dim = checked_power(d, n, kMaxDenseChannelDimension, "symmetrize_subsystems");
  if (rho.dimension() != dim) throw InvalidArgument("symmetrize_subsystems: dimension mismatch");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  ComplexMatrix acc(dim, dim);
  std::size_t count = 0;
  do {
    acc += relabel(rho.matrix(), permutation_map(d, perm));
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  acc *= 1.0 / static_cast<double>(count);
  acc.symmetrize();
  return DensityMatrix::from_trusted(std::move(acc));
}

ConvexSplitCheck verify_convex_split(const DensityMatrix& rho, const DensityMatrix& sigma, std::size_t n) {
  const double d = dmax(rho, sigma).value;
  const DensityMatrix mixed = convex_split_state(rho, sigma, n);
  ConvexSplitCheck out;
  out.measured = trace_norm(mixed.matrix() - tensor_power(sigma, n).matrix());
  out.bound = std::sqrt(std::exp2(d) / static_cast<double>(n));
  out.holds = out.measured <= out.bound + 1e-9;
  return out;
}

double convex_split_distance_diagonal(std::span<const double> p, std::span<const double> q, std::size_t n) {
  if (p.size() != q.size() || p.empty()) throw InvalidArgument("convex_split_distance_diagonal: dimension mismatch");
  if (n == 0) throw InvalidArgument("convex_split_distance_diagonal: n must be >= 1");
  // Levels with q = 0 must carry no p weight; they then never appear.
  std::vector<double> ratio, log_q;
  for (std::size_t l = 0; l < p.size(); ++l) {
    if (q[l] > kSupportTolerance) {
      ratio.push_back(p[l] / q[l]);
      log_q.push_back(std::log(q[l]));
    } else if (p[l] > kLeakageTolerance) {
      throw SupportError("convex_split_distance_diagonal: p has weight outside the support of q", p[l]);
    }
  }
  const std::size_t d = ratio.size();
  std::vector<double> log_fact(n + 1, 0.0);
  for (std::size_t m = 1; m <= n; ++m) log_fact[m] = log_fact[m - 1] + std::log(static_cast<double>(m));

  // Per string of type t: E_n output = sig(t) * (1/n) sum_l t_l p_l / q_l.
  std::vector<std::uint32_t> t(d, 0);
  t[d - 1] = static_cast<std::uint32_t>(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  do {
    double log_sig = log_fact[n];
    double mean_ratio = 0.0;
    for (std::size_t l = 0; l < d; ++l) {
      log_sig += static_cast<double>(t[l]) * log_q[l] - log_fact[t[l]];
      mean_ratio += static_cast<double>(t[l]) * ratio[l];
    }
    total += std::exp(log_sig) * std::abs(mean_ratio * inv_n - 1.0);
  } while (next_composition(t));
  return total;
}

std::vector<double> steady_state_check(const DensityMatrix& omega, const DensityMatrix& tau,
                                       const ComplexMatrix& local_hamiltonian, std::size_t n, double rate,
                                       std::span<const double> times) {
  const auto proc = CollisionProcess::all_pairs_swaps(local_hamiltonian, n, rate);
  const DensityMatrix start = tensor(omega, tensor_power(tau, n - 1));
  const DensityMatrix target = convex_split_state(omega, tau, n);
  std::vector<double> out;
  for (double t : times) out.push_back(trace_distance(evolve_series(proc, start, t).state, target));
  return out;
}

double thermalization_distance(const RandomUnitaryChannel& channel, const DensityMatrix& omega,
                               const DensityMatrix& tau, std::size_t n) {
  if (omega.dimension() != tau.dimension()) throw InvalidArgument("thermalization_distance: dimension mismatch");
  if (n == 0) throw InvalidArgument("thermalization_distance: n must be >= 1");
  const std::size_t dim = checked_power(tau.dimension(), n, kMaxDenseChannelDimension, "thermalization_distance");
  if (channel.dimension() != dim) throw InvalidArgument("thermalization_distance: channel acts on the wrong space");
  const DensityMatrix input = n == 1 ? omega : tensor(omega, tensor_power(tau, n - 1));
  return trace_norm(channel.apply(input.matrix()) - tensor_power(tau, n).matrix());
}

bool epsilon_thermalize_check(const RandomUnitaryChannel& channel, const DensityMatrix& omega,
                              const DensityMatrix& tau, std::size_t n, double epsilon) {
  return thermalization_distance(channel, omega, tau, n) <= epsilon + kThermalizationSlack;
}

NEpsilonResult find_n_epsilon(const DensityMatrix& omega, const DensityMatrix& tau, const ComplexMatrix& local_h,
                              double epsilon, std::size_t n_max) {
  if (!(epsilon > 0.0)) throw InvalidArgument("find_n_epsilon: epsilon must be positive");
  if (omega.dimension() != tau.dimension() || local_h.rows() != tau.dimension()) {
    throw InvalidArgument("find_n_epsilon: dimension mismatch");
  }
  NEpsilonResult out;
  out.dmax_bits = dmax(omega, tau).value;
  out.upper_bound = std::ceil(std::exp2(out.dmax_bits) / (epsilon * epsilon));
  const std::size_t limit = n_max > 0 ? n_max : static_cast<std::size_t>(out.upper_bound);

  const std::size_t d = tau.dimension();
  const bool commuting = commutator_norm(omega.matrix(), tau.matrix()) <= 1e-9;
  std::optional<CommonDiagonal> cd;
  if (commuting) {
    cd = common_diagonal(omega, tau);
    const double radius = 2.0 * std::sqrt(epsilon);
    out.lower_bound = radius >= 2.0 ? 1.0 : std::exp2(dmax_smooth(omega, tau, radius).value);
  }
  std::size_t scanned = 0;
  for (std::size_t n = 1; n <= limit; ++n) {
    double dist;
    if (cd) {
      dist = convex_split_distance_diagonal(cd->p, cd->q, n);
    } else {
      try {
        dist = thermalization_distance(convex_split_channel(d, n), omega, tau, n);
      } catch (const CapacityError&) {
        out.note = "dense scan stopped at the dimension cap";
        break;
      }
    }
    out.distances.push_back(dist);
    scanned = n;
    if (dist <= epsilon + kThermalizationSlack) {
      out.n_epsilon = n;
      break;
    }
  }
  if (!out.n_epsilon && out.note.empty()) {
    std::ostringstream msg;
    msg << "no n <= " << limit << " reaches epsilon; distance at the last n is "
        << (out.distances.empty() ? 0.0 : out.distances.back());
    out.note = msg.str();
  }
  if (scanned > 0) {
    const auto energies = eigvalsh(local_h);
    const EscReport esc = check_esc(energies, scanned);
    out.esc_verified = !esc.incomplete && esc.passes(scanned);
  }
  out.upper_bound_only = !out.esc_verified;
  return out;
}

std::vector<double> energy_subspace_weights(const ComplexMatrix& rho, const SpectralDecomposition& h) {
  const std::size_t n = h.dimension();
  if (rho.rows() != n || rho.cols() != n) throw InvalidArgument("energy_subspace_weights: dimension mismatch");
  std::vector<double> out;
  out.reserve(h.groups.size());
  const ComplexMatrix& v = h.vectors;
  for (const auto& g : h.groups) {
    double w = 0.0;
    for (std::size_t k = g.begin; k < g.end; ++k) {
      cplx s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cplx row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += rho(i, j) * v(j, k);
        s += std::conj(v(i, k)) * row;
      }
      w += s.real();
    }
    out.push_back(w);
  }
  return out;
}

}  // namespace qtherm
