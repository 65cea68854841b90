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

#include "qtherm/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "qtherm/error.hpp"

namespace qtherm {

std::vector<double> gibbs_populations(std::span<const double> energies, double beta) {
  if (!std::isfinite(beta)) throw InvalidArgument("gibbs: beta must be finite (use a ground-state projector instead)");
  if (energies.empty()) throw InvalidArgument("gibbs: empty spectrum");
  double max_exponent = -beta * energies[0];
  for (double e : energies) max_exponent = std::max(max_exponent, -beta * e);
  std::vector<double> p(energies.size());
  double z = 0.0;
  for (std::size_t k = 0; k < energies.size(); ++k) {
    p[k] = std::exp(-beta * energies[k] - max_exponent);
    z += p[k];
  }
  for (auto& x : p) x /= z;
  return p;
}

double thermal_energy(std::span<const double> energies, double beta) {
  const auto p = gibbs_populations(energies, beta);
  double e = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) e += p[k] * energies[k];
  return e;
}

DensityMatrix gibbs_state(const HermitianOperator& h, double beta) {
  const auto& sd = h.spectrum();
  const auto p = gibbs_populations(sd.values, beta);
  return DensityMatrix::from_trusted(sd.weighted_sum(p));
}

BetaMatch match_beta(std::span<const double> energies, double target, double tol) {
  if (energies.empty()) throw InvalidArgument("match_beta: empty spectrum");
  const auto [lo_it, hi_it] = std::minmax_element(energies.begin(), energies.end());
  const double e_min = *lo_it;
  const double e_max = *hi_it;
  if (!(target > e_min)) {
    std::ostringstream msg;
    msg << "match_beta: target energy " << target << " is not above the ground energy " << e_min;
    throw InvalidArgument(msg.str());
  }
  if (!(target < e_max)) {
    std::ostringstream msg;
    msg << "match_beta: target energy " << target << " is not below the maximal energy " << e_max;
    throw InvalidArgument(msg.str());
  }

  auto residual = [&](double beta) { return thermal_energy(energies, beta) - target; };
  double lo = -64.0, hi = 64.0;
  // E is decreasing: need E(lo) >= target >= E(hi).
  for (int widen = 0; residual(lo) < 0.0; ++widen) {
    if (widen > 40) throw ConvergenceError("match_beta: could not bracket target from below");
    lo *= 2.0;
  }
  for (int widen = 0; residual(hi) > 0.0; ++widen) {
    if (widen > 40) throw ConvergenceError("match_beta: could not bracket target from above");
    hi *= 2.0;
  }

  BetaMatch out;
  out.target_energy = target;
  constexpr int max_iterations = 200;
  for (int it = 1; it <= max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    out.beta = mid;
    out.residual = std::abs(r);
    out.iterations = it;
    if (out.residual <= tol || mid == lo || mid == hi) return out;
    if (r > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (out.residual > tol) {
    std::ostringstream msg;
    msg << "match_beta: residual " << out.residual << " above tolerance after " << max_iterations << " steps";
    throw ConvergenceError(msg.str());
  }
  return out;
}

BetaMatch match_beta(const HermitianOperator& h, std::span<const cplx> psi, double tol) {
  const Vector hpsi = h.matrix() * psi;
  const double nrm2 = inner(psi, psi).real();
  const double target = inner(psi, hpsi).real() / nrm2;
  return match_beta(h.spectrum().values, target, tol);
}

std::string_view target_kind_name(TargetKind kind) {
  switch (kind) {
    case TargetKind::hamiltonian_gibbs:
      return "hamiltonian_gibbs";
    case TargetKind::reduced_global_gibbs:
      return "reduced_global_gibbs";
  }
  return "unknown";
}

TargetKind parse_target_kind(std::string_view name) {
  if (name == "hamiltonian_gibbs") return TargetKind::hamiltonian_gibbs;
  if (name == "reduced_global_gibbs") return TargetKind::reduced_global_gibbs;
  throw InvalidArgument("unknown target kind '" + std::string(name) + "'");
}

DensityMatrix reduced_global_gibbs(const ChainSpectrum& spectrum, const Region& region, double beta) {
  const auto energies = spectrum.energies();
  const auto p = gibbs_populations(energies, beta);
  const int sites = spectrum.sites();
  const std::size_t rdim = std::size_t{1} << region.size;
  ComplexMatrix acc(rdim, rdim);
  Vector phi(spectrum.dimension());
  for (std::size_t k = 0; k < energies.size(); ++k) {
    if (p[k] == 0.0) continue;
    std::fill(phi.begin(), phi.end(), cplx{});
    spectrum.accumulate_eigenvector(k, 1.0, phi);
    accumulate_region_state(phi, sites, region, p[k], acc);
  }
  acc.symmetrize();
  return DensityMatrix::from_trusted(std::move(acc));
}

ThermalTarget thermal_target(const ChainSpectrum& spectrum, const Region& region, double beta, TargetKind kind) {
  if (kind == TargetKind::hamiltonian_gibbs) {
    return {kind, beta, gibbs_state(reduced_hamiltonian(spectrum.realization(), region), beta)};
  }
  return {kind, beta, reduced_global_gibbs(spectrum, region, beta)};
}

}  // namespace qtherm
