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

#include "qtherm/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qtherm/error.hpp"

namespace qtherm {

EquilibriumState::EquilibriumState(std::shared_ptr<const ChainSpectrum> spectrum, std::span<const cplx> psi0,
                                   std::uint64_t realization_index, std::string initial_state)
    : spectrum_(std::move(spectrum)), realization_(realization_index), initial_(std::move(initial_state)) {
  if (!spectrum_) throw InvalidArgument("EquilibriumState: null spectrum");
  const double n = norm(psi0);
  if (std::abs(n - 1.0) > 1e-10) throw InvalidArgument("EquilibriumState: initial state is not normalized");
  coeff_ = spectrum_->overlaps(psi0);
  const auto& groups = spectrum_->groups();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t k = groups[g].begin; k < groups[g].end; ++k) {
      if (coeff_[k] != cplx{}) {
        active_.push_back(g);
        break;
      }
    }
  }
}

double EquilibriumState::energy() const {
  const auto& levels = spectrum_->levels();
  double e = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) e += std::norm(coeff_[k]) * levels[k].energy;
  return e;
}

Vector EquilibriumState::group_component(std::size_t group) const {
  const auto& g = spectrum_->groups().at(group);
  Vector phi(spectrum_->dimension());
  for (std::size_t k = g.begin; k < g.end; ++k) {
    if (coeff_[k] == cplx{}) continue;
    spectrum_->accumulate_eigenvector(k, coeff_[k], phi);
  }
  return phi;
}

ComplexMatrix EquilibriumState::dense() const {
  const std::size_t n = spectrum_->dimension();
  ComplexMatrix omega(n, n);
  for (std::size_t g : active_) omega += ComplexMatrix::outer(group_component(g), group_component(g));
  omega.symmetrize();
  return omega;
}

EquilibriumState infinite_time_average(std::shared_ptr<const ChainSpectrum> spectrum, std::span<const cplx> psi0,
                                       std::uint64_t realization_index) {
  return EquilibriumState(std::move(spectrum), psi0, realization_index);
}

DensityMatrix infinite_time_average(std::span<const cplx> psi0, const SpectralDecomposition& spectrum) {
  const std::size_t n = spectrum.dimension();
  if (psi0.size() != n) throw InvalidArgument("infinite_time_average: dimension mismatch");
  if (std::abs(norm(psi0) - 1.0) > 1e-10) throw InvalidArgument("infinite_time_average: state is not normalized");
  const ComplexMatrix& v = spectrum.vectors;
  Vector c(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::conj(v(i, k)) * psi0[i];
    c[k] = s;
  }
  ComplexMatrix omega(n, n);
  Vector phi(n);
  for (const auto& g : spectrum.groups) {
    std::fill(phi.begin(), phi.end(), cplx{});
    for (std::size_t k = g.begin; k < g.end; ++k)
      for (std::size_t i = 0; i < n; ++i) phi[i] += c[k] * v(i, k);
    omega += ComplexMatrix::outer(phi, phi);
  }
  omega.symmetrize();
  return DensityMatrix::from_trusted(std::move(omega));
}

ComplexMatrix dephase(const ComplexMatrix& rho, const SpectralDecomposition& spectrum) {
  const std::size_t n = spectrum.dimension();
  if (rho.rows() != n || rho.cols() != n) throw InvalidArgument("dephase: dimension mismatch");
  const ComplexMatrix& v = spectrum.vectors;
  ComplexMatrix in_basis = v.adjoint() * rho * v;
  std::vector<std::size_t> group_of(n);
  for (std::size_t g = 0; g < spectrum.groups.size(); ++g)
    for (std::size_t k = spectrum.groups[g].begin; k < spectrum.groups[g].end; ++k) group_of[k] = g;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (group_of[i] != group_of[j]) in_basis(i, j) = 0.0;
  ComplexMatrix out = v * in_basis * v.adjoint();
  out.symmetrize();
  return out;
}

DensityMatrix reduce_equilibrium(const EquilibriumState& omega, const Region& region) {
  const int sites = omega.spectrum().sites();
  if (region.size < 1 || region.size > sites) throw InvalidArgument("reduce_equilibrium: region size out of range");
  const std::size_t rdim = std::size_t{1} << region.size;
  ComplexMatrix acc(rdim, rdim);
  for (std::size_t g : omega.active_groups()) {
    const Vector phi = omega.group_component(g);
    accumulate_region_state(phi, sites, region, 1.0, acc);
  }
  acc.symmetrize();
  return DensityMatrix::from_trusted(std::move(acc));
}

DmaxResult dmax(const DensityMatrix& rho, const DensityMatrix& sigma, double tol_supp, double leakage_tol) {
  const std::size_t n = sigma.dimension();
  if (rho.dimension() != n) throw InvalidArgument("dmax: dimension mismatch");
  const auto sd = eig_hermitian(sigma.matrix());
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < n; ++k)
    if (sd.values[k] > tol_supp) kept.push_back(k);
  const std::size_t r = kept.size();

  // A = V_s^dagger rho V_s on the retained support.
  ComplexMatrix vs(n, r);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < r; ++a) vs(i, a) = sd.vectors(i, kept[a]);
  ComplexMatrix a = vs.adjoint() * rho.matrix() * vs;
  const double leakage = rho.matrix().trace().real() - a.trace().real();
  if (leakage > leakage_tol) {
    std::ostringstream msg;
    msg << "dmax: rho has weight " << leakage << " outside the support of sigma";
    throw SupportError(msg.str(), leakage);
  }
  for (std::size_t i = 0; i < r; ++i) {
    const double si = 1.0 / std::sqrt(sd.values[kept[i]]);
    for (std::size_t j = 0; j < r; ++j) a(i, j) *= si / std::sqrt(sd.values[kept[j]]);
  }
  a.symmetrize();
  const double top = eigvalsh(a).back();
  DmaxResult out;
  out.value = std::log2(top);
  out.lambda = out.value;
  return out;
}

CommonDiagonal common_diagonal(const DensityMatrix& rho, const DensityMatrix& sigma, double tol) {
  const std::size_t n = sigma.dimension();
  if (rho.dimension() != n) throw InvalidArgument("common_diagonal: dimension mismatch");
  const double c = commutator_norm(rho.matrix(), sigma.matrix());
  if (c > tol) {
    std::ostringstream msg;
    msg << "smooth dmax needs commuting states, ||[rho, sigma]||_F = " << c
        << "; the unsmoothed dmax is an upper bound for non-commuting pairs";
    throw InvalidArgument(msg.str());
  }
  // Group sigma's eigenvalues with an absolute tolerance: they live in [0, 1].
  const auto sd = eig_hermitian(sigma.matrix(), 1e-10);
  ComplexMatrix u = sd.vectors;
  const ComplexMatrix r = u.adjoint() * rho.matrix() * u;
  for (const auto& g : sd.groups) {
    if (g.size() < 2) continue;
    ComplexMatrix block(g.size(), g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) block(i, j) = r(g.begin + i, g.begin + j);
    block.symmetrize();
    const auto bd = eig_hermitian(block);
    // Columns g.begin.. of u become u_g * W.
    ComplexMatrix rotated(n, g.size());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t b = 0; b < g.size(); ++b) {
        cplx s = 0.0;
        for (std::size_t a = 0; a < g.size(); ++a) s += u(i, g.begin + a) * bd.vectors(a, b);
        rotated(i, b) = s;
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t b = 0; b < g.size(); ++b) u(i, g.begin + b) = rotated(i, b);
  }
  CommonDiagonal out;
  const ComplexMatrix pr = u.adjoint() * rho.matrix() * u;
  out.p.resize(n);
  out.q = sd.values;
  for (std::size_t i = 0; i < n; ++i) out.p[i] = pr(i, i).real();
  out.basis = std::move(u);
  return out;
}

std::pair<double, std::vector<double>> dmax_smooth_classical(std::span<const double> p, std::span<const double> q,
                                                             double epsilon) {
  const std::size_t n = p.size();
  if (q.size() != n || n == 0) throw InvalidArgument("dmax_smooth: dimension mismatch");
  if (!(epsilon >= 0.0) || epsilon >= 2.0) throw InvalidArgument("dmax_smooth: epsilon must lie in [0, 2)");

  double p_total = 0.0, q_support = 0.0, outside = 0.0, top_ratio = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pi = std::max(p[i], 0.0);
    p_total += pi;
    if (q[i] > kSupportTolerance) {
      q_support += q[i];
      top_ratio = std::max(top_ratio, pi / q[i]);
    } else {
      outside += pi;
    }
  }
  const double allowed = std::max(epsilon / 2.0, kLeakageTolerance);
  if (outside > allowed) {
    std::ostringstream msg;
    msg << "dmax_smooth: weight " << outside << " outside the support of sigma exceeds the smoothing budget";
    throw SupportError(msg.str(), outside);
  }

  auto cap = [&](std::size_t i, double scale) { return q[i] > kSupportTolerance ? scale * q[i] : 0.0; };
  auto clipped_mass = [&](double lambda) {
    const double scale = std::exp2(lambda);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += std::max(std::max(p[i], 0.0) - cap(i, scale), 0.0);
    return m;
  };
  auto feasible = [&](double lambda) {
    return clipped_mass(lambda) <= epsilon / 2.0 + 1e-15 && std::exp2(lambda) * q_support >= p_total * (1.0 - 1e-15);
  };

  // Below log2(p_total / q_support) the caps cannot hold a normalized state.
  double lo = std::log2(p_total / q_support);
  double hi = std::max(std::log2(top_ratio), lo);
  if (epsilon == 0.0) {
    std::vector<double> same(p.begin(), p.end());
    return {hi, same};
  }
  for (int it = 0; it < 64 && !feasible(hi); ++it) hi += 1e-13 * (1.0 + std::abs(hi));
  if (!feasible(hi)) throw ConvergenceError("dmax_smooth: no feasible upper bracket");
  if (feasible(lo)) {
    hi = lo;
  } else {
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? hi : lo) = mid;
    }
  }

  // Witness: clip to the caps at hi, then pour the clipped mass into the
  // remaining room proportionally.
  const double scale = std::exp2(hi);
  std::vector<double> w(n);
  double kept = 0.0, room = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::min(std::max(p[i], 0.0), cap(i, scale));
    kept += w[i];
    room += cap(i, scale) - w[i];
  }
  const double deficit = p_total - kept;
  if (deficit > 0.0 && room > 0.0) {
    const double frac = std::min(deficit / room, 1.0);
    for (std::size_t i = 0; i < n; ++i) w[i] += frac * (cap(i, scale) - w[i]);
  }
  return {hi, w};
}

DmaxResult dmax_smooth(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon) {
  if (!(epsilon >= 0.0) || epsilon >= 2.0) throw InvalidArgument("dmax_smooth: epsilon must lie in [0, 2)");
  const CommonDiagonal cd = common_diagonal(rho, sigma);
  if (epsilon == 0.0) {
    DmaxResult out = dmax(rho, sigma);
    out.witness = rho;
    return out;
  }
  auto [value, w] = dmax_smooth_classical(cd.p, cd.q, epsilon);
  const ComplexMatrix& u = cd.basis;
  ComplexMatrix tilde = u * ComplexMatrix::diagonal(w) * u.adjoint();
  tilde.symmetrize();
  DmaxResult out;
  out.value = value;
  out.lambda = value;
  out.epsilon = epsilon;
  out.witness = DensityMatrix::from_trusted(std::move(tilde));
  return out;
}

std::vector<CurvePoint> dmax_region_curve(const EquilibriumState& omega, double beta, std::span<const int> region_sizes,
                                          TargetKind kind, int offset) {
  const int sites = omega.spectrum().sites();
  std::vector<int> sizes(region_sizes.begin(), region_sizes.end());
  std::sort(sizes.begin(), sizes.end());
  std::vector<CurvePoint> out;
  out.reserve(sizes.size());
  for (int size : sizes) {
    if (size < 1 || size > sites - 1) {
      throw InvalidArgument("dmax_region_curve: region size " + std::to_string(size) + " outside [1, L-1]");
    }
    const Region region{offset, size};
    CurvePoint pt;
    pt.region_size = size;
    try {
      const DensityMatrix omega_r = reduce_equilibrium(omega, region);
      const ThermalTarget target = thermal_target(omega.spectrum(), region, beta, kind);
      pt.value = dmax(omega_r, target.state).value;
    } catch (const SupportError& e) {
      pt.failure = e.what();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace qtherm
