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

#include "qtherm/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qtherm/error.hpp"
#include "qtherm/spectral.hpp"

namespace qtherm {
namespace {

constexpr double kTraceTolerance = 1e-10;
constexpr double kPositivityTolerance = 1e-10;

void check_trace(const ComplexMatrix& m) {
  const cplx tr = m.trace();
  if (std::abs(tr.real() - 1.0) > kTraceTolerance || std::abs(tr.imag()) > kTraceTolerance) {
    std::ostringstream msg;
    msg << "DensityMatrix: trace " << tr.real() << (tr.imag() >= 0 ? "+" : "") << tr.imag() << "i is not 1";
    throw InvalidArgument(msg.str());
  }
}

void check_square_hermitian(const ComplexMatrix& m) {
  if (!m.square() || m.rows() == 0) throw InvalidArgument("DensityMatrix: expected a non-empty square matrix");
  if (!m.is_hermitian(kHermitianTolerance)) {
    std::ostringstream msg;
    msg << "DensityMatrix: not Hermitian, defect " << m.hermitian_defect();
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m) {
  check_square_hermitian(m);
  m.symmetrize();
  check_trace(m);
  const auto ev = eigvalsh(m);
  if (ev.front() < -kPositivityTolerance) {
    std::ostringstream msg;
    msg << "DensityMatrix: smallest eigenvalue " << ev.front() << " is negative";
    throw InvalidArgument(msg.str());
  }
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::from_trusted(ComplexMatrix m) {
  check_square_hermitian(m);
  m.symmetrize();
  check_trace(m);
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(std::span<const cplx> psi) {
  const double nrm = norm(psi);
  if (nrm == 0.0) throw InvalidArgument("DensityMatrix::pure: zero vector");
  Vector unit(psi.begin(), psi.end());
  for (auto& z : unit) z /= nrm;
  return from_trusted(ComplexMatrix::outer(unit, unit));
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> probabilities) {
  for (double p : probabilities) {
    if (!(p >= -kPositivityTolerance)) throw InvalidArgument("DensityMatrix::diagonal: negative probability");
  }
  return from_trusted(ComplexMatrix::diagonal(probabilities));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw InvalidArgument("DensityMatrix::maximally_mixed: zero dimension");
  std::vector<double> p(dim, 1.0 / static_cast<double>(dim));
  return diagonal(p);
}

std::vector<double> DensityMatrix::eigenvalues() const { return eigvalsh(m_); }

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::from_trusted(kron(a.matrix(), b.matrix()));
}

DensityMatrix tensor_power(const DensityMatrix& a, std::size_t n) {
  return DensityMatrix::from_trusted(kron_power(a.matrix(), n));
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  if (dims.empty()) throw InvalidArgument("partial_trace: empty dimension list");
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<std::size_t>());
  if (!m.square() || m.rows() != total) {
    throw InvalidArgument("partial_trace: product of dims " + std::to_string(total) +
                          " does not match matrix dimension " + std::to_string(m.rows()));
  }
  if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t k : keep) {
    if (k >= dims.size() || kept[k]) throw InvalidArgument("partial_trace: invalid or repeated keep index");
    kept[k] = true;
  }
  const std::size_t nsys = dims.size();
  // strides[i]: weight of subsystem i's digit in the full index.
  std::vector<std::size_t> strides(nsys);
  std::size_t stride = 1;
  for (std::size_t i = nsys; i-- > 0;) {
    strides[i] = stride;
    stride *= dims[i];
  }
  std::vector<std::size_t> keep_sorted(keep.begin(), keep.end());
  std::sort(keep_sorted.begin(), keep_sorted.end());
  std::vector<std::size_t> traced;
  for (std::size_t i = 0; i < nsys; ++i)
    if (!kept[i]) traced.push_back(i);

  auto offsets = [&](const std::vector<std::size_t>& systems) {
    std::size_t count = 1;
    for (std::size_t s : systems) count *= dims[s];
    std::vector<std::size_t> off(count, 0);
    // Mixed-radix enumeration with the first listed subsystem most significant.
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rem = idx;
      std::size_t o = 0;
      for (std::size_t p = systems.size(); p-- > 0;) {
        const std::size_t s = systems[p];
        o += (rem % dims[s]) * strides[s];
        rem /= dims[s];
      }
      off[idx] = o;
    }
    return off;
  };
  const auto kept_off = offsets(keep_sorted);
  const auto traced_off = offsets(traced);

  ComplexMatrix out(kept_off.size(), kept_off.size());
  for (std::size_t a = 0; a < kept_off.size(); ++a)
    for (std::size_t b = 0; b < kept_off.size(); ++b) {
      cplx s = 0.0;
      for (std::size_t t : traced_off) s += m(kept_off[a] + t, kept_off[b] + t);
      out(a, b) = s;
    }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  return DensityMatrix::from_trusted(partial_trace(rho.matrix(), dims, keep));
}

double trace_norm(const ComplexMatrix& a) {
  if (!a.square()) throw InvalidArgument("trace_norm: expected a square matrix");
  if (a.rows() == 0) return 0.0;
  if (a.max_abs() == 0.0) return 0.0;
  if (a.is_hermitian(kHermitianTolerance)) {
    ComplexMatrix h = a;
    h.symmetrize();
    double s = 0.0;
    for (double v : eigvalsh(h)) s += std::abs(v);
    return s;
  }
  ComplexMatrix g = a.adjoint() * a;
  g.symmetrize();
  double s = 0.0;
  for (double v : eigvalsh(g)) s += std::sqrt(std::max(v, 0.0));
  return s;
}

double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma) { return 0.5 * trace_norm(rho - sigma); }

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return trace_distance(rho.matrix(), sigma.matrix());
}

namespace {

// sqrt(rho) with eigenvalues at rounding level treated as exact zeros; their
// square roots would otherwise inject O(sqrt(eps)) noise.
ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
  const auto sd = eig_hermitian(a);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(sd.values.back(), 0.0);
  return sd.apply([floor](double x) { return x > floor ? std::sqrt(x) : 0.0; });
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dimension() != sigma.dimension()) throw InvalidArgument("fidelity: dimension mismatch");
  const ComplexMatrix a = psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix());
  // Singular values of A are the positive eigenvalues of [[0, A], [A^dagger, 0]].
  const std::size_t n = a.rows();
  ComplexMatrix dilation(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      dilation(i, n + j) = a(i, j);
      dilation(n + j, i) = std::conj(a(i, j));
    }
  double f = 0.0;
  for (double v : eigvalsh(dilation)) f += std::abs(v);
  return std::clamp(0.5 * f, 0.0, 1.0);
}

bool check_fuchs_van_de_graaf(const DensityMatrix& rho, const DensityMatrix& sigma) {
  constexpr double slack = 1e-9;
  const double f = fidelity(rho, sigma);
  const double d = trace_distance(rho, sigma);
  return (1.0 - f <= d + slack) && (d <= std::sqrt(std::max(0.0, 1.0 - f * f)) + slack);
}

double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b) { return commutator(a, b).frobenius_norm(); }

}  // namespace qtherm
