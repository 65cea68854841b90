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

#include "qtherm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>

#include "qtherm/error.hpp"
#include "qtherm/simd/kernels.hpp"

namespace qtherm {
namespace {

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> sub;  // sub[k] couples k and k+1; sub[n-1] == 0
  ComplexMatrix q;          // A = Q T Q^dagger (only when requested)
};

void check_hermitian_input(const ComplexMatrix& a) {
  if (!a.square() || a.rows() == 0) {
    throw InvalidArgument("eig_hermitian: expected a non-empty square matrix, got " + std::to_string(a.rows()) +
                          "x" + std::to_string(a.cols()));
  }
  const double defect = a.hermitian_defect();
  const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());
  if (defect > kHermitianTolerance * scale) {
    std::ostringstream msg;
    msg << "eig_hermitian: matrix is not Hermitian, max |A_ij - conj(A_ji)| = " << defect;
    throw InvalidArgument(msg.str());
  }
}

// Unblocked Householder reduction A -> Q^dagger A Q = T, real tridiagonal.
Tridiagonal tridiagonalize(ComplexMatrix a, bool want_q) {
  const auto& ker = simd::kernels();
  const std::size_t n = a.rows();
  a.symmetrize();
  Tridiagonal t;
  t.diag.assign(n, 0.0);
  t.sub.assign(n, 0.0);

  std::vector<Vector> reflectors;
  std::vector<cplx> taus;
  if (want_q) {
    reflectors.reserve(n);
    taus.reserve(n);
  }

  Vector v, w, y;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t m = n - k - 1;
    const std::size_t s = k + 1;
    const cplx alpha = a(s, k);
    double xnorm2 = 0.0;
    for (std::size_t i = s + 1; i < n; ++i) xnorm2 += std::norm(a(i, k));

    t.diag[k] = a(k, k).real();
    if (xnorm2 == 0.0 && alpha.imag() == 0.0) {
      t.sub[k] = alpha.real();
      if (want_q) {
        reflectors.emplace_back();
        taus.push_back(0.0);
      }
      continue;
    }
    const double beta = -std::copysign(std::sqrt(std::norm(alpha) + xnorm2), alpha.real());
    const cplx tau = (beta - alpha) / beta;
    const cplx scale = 1.0 / (alpha - beta);
    v.assign(m, 0.0);
    v[0] = 1.0;
    for (std::size_t j = 1; j < m; ++j) v[j] = a(s + j, k) * scale;
    t.sub[k] = beta;

    // A22 <- H^dagger A22 H with H = I - tau v v^dagger.
    w.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) w[i] = ker.dotu(m, &a(s + i, s), v.data());
    for (std::size_t i = 0; i < m; ++i) ker.axpy_conj(m, -tau * w[i], v.data(), &a(s + i, s));
    y.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) ker.axpy(m, std::conj(v[i]), &a(s + i, s), y.data());
    const cplx ctau = std::conj(tau);
    for (std::size_t i = 0; i < m; ++i) ker.axpy(m, -ctau * v[i], y.data(), &a(s + i, s));

    if (want_q) {
      reflectors.push_back(v);
      taus.push_back(tau);
    }
  }
  t.diag[n - 1] = a(n - 1, n - 1).real();
  t.sub[n - 1] = 0.0;

  if (want_q) {
    t.q = ComplexMatrix::identity(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (taus[k] == cplx{}) continue;
      const std::size_t s = k + 1;
      const std::size_t m = n - s;
      const Vector& vk = reflectors[k];
      // Q <- Q H_k; row 0 of Q is e_0 throughout.
      for (std::size_t i = 1; i < n; ++i) {
        cplx* row = &t.q(i, s);
        const cplx dot = ker.dotu(m, row, vk.data());
        if (dot == cplx{}) continue;
        ker.axpy_conj(m, -taus[k] * dot, vk.data(), row);
      }
    }
  }
  return t;
}

// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.
// zt (optional) holds the accumulated rotations as rows: zt[j] is the j-th
// eigenvector expressed in the tridiagonal basis.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>* zt) {
  const std::size_t n = d.size();
  const auto& ker = simd::kernels();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_iterations = 64;
  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    if (!std::isfinite(tst1)) throw ConvergenceError("tridiagonal_ql: non-finite entries");
    std::size_t m = l;
    while (m + 1 < n) {  // e[n-1] is zero
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iterations) throw ConvergenceError("tridiagonal_ql: no convergence");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (zt != nullptr) {
            double* row_i = zt->data() + ii * n;
            double* row_next = zt->data() + (ii + 1) * n;
            // (col_i, col_{i+1}) <- (c col_i - s col_{i+1}, s col_i + c col_{i+1})
            ker.rot(n, c, s, row_i, row_next);
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace

double default_degeneracy_tolerance(const std::vector<double>& ascending) {
  if (ascending.empty()) return 0.0;
  return 1e-10 * (ascending.back() - ascending.front());
}

std::vector<DegenerateGroup> group_degenerate(const std::vector<double>& ascending, double tol) {
  std::vector<DegenerateGroup> groups;
  if (ascending.empty()) return groups;
  std::size_t begin = 0;
  for (std::size_t i = 1; i < ascending.size(); ++i) {
    if (ascending[i] - ascending[i - 1] > tol) {
      groups.push_back({begin, i});
      begin = i;
    }
  }
  groups.push_back({begin, ascending.size()});
  return groups;
}

SpectralDecomposition eig_hermitian(const ComplexMatrix& a, double tol_deg) {
  check_hermitian_input(a);
  const std::size_t n = a.rows();
  Tridiagonal t = tridiagonalize(a, true);
  std::vector<double> zt(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) zt[i * n + i] = 1.0;
  tridiagonal_ql(t.diag, t.sub, &zt);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return t.diag[x] < t.diag[y]; });

  SpectralDecomposition out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  const auto& ker = simd::kernels();
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = t.diag[order[j]];
    const double* z = zt.data() + order[j] * n;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = ker.dot_real(n, &t.q(i, 0), z);
  }
  out.tol_deg = tol_deg < 0.0 ? default_degeneracy_tolerance(out.values) : tol_deg;
  out.groups = group_degenerate(out.values, out.tol_deg);
  return out;
}

std::vector<double> eigvalsh(const ComplexMatrix& a) {
  check_hermitian_input(a);
  Tridiagonal t = tridiagonalize(a, false);
  tridiagonal_ql(t.diag, t.sub, nullptr);
  std::sort(t.diag.begin(), t.diag.end());
  return t.diag;
}

ComplexMatrix SpectralDecomposition::apply(const std::function<double(double)>& f) const {
  std::vector<double> w(values.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = f(values[k]);
  return weighted_sum(w);
}

ComplexMatrix SpectralDecomposition::weighted_sum(std::span<const double> weights) const {
  const std::size_t n = dimension();
  if (weights.size() != n) throw InvalidArgument("weighted_sum: one weight per eigenvalue required");
  const ComplexMatrix vt = vectors.transpose();  // row k = eigenvector k
  ComplexMatrix out(n, n);
  const auto& ker = simd::kernels();
  for (std::size_t k = 0; k < n; ++k) {
    if (weights[k] == 0.0) continue;
    const cplx* vk = &vt(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (vk[i] == cplx{}) continue;
      ker.axpy_conj(n, weights[k] * vk[i], vk, out.row(i).data());
    }
  }
  out.symmetrize();
  return out;
}

ComplexMatrix SpectralDecomposition::projector(const DegenerateGroup& g) const {
  const std::size_t n = dimension();
  ComplexMatrix out(n, n);
  const auto& ker = simd::kernels();
  for (std::size_t k = g.begin; k < g.end; ++k) {
    const Vector vk = vectors.column(k);
    for (std::size_t i = 0; i < n; ++i) {
      if (vk[i] == cplx{}) continue;
      ker.axpy_conj(n, vk[i], vk.data(), out.row(i).data());
    }
  }
  return out;
}

struct HermitianOperator::Cache {
  std::once_flag once;
  SpectralDecomposition spectrum;
};

HermitianOperator::HermitianOperator(ComplexMatrix m) : matrix_(std::move(m)), cache_(std::make_shared<Cache>()) {
  check_hermitian_input(matrix_);
  matrix_.symmetrize();
}

const SpectralDecomposition& HermitianOperator::spectrum() const {
  if (!cache_) throw InvalidArgument("HermitianOperator: empty operator has no spectrum");
  std::call_once(cache_->once, [this] { cache_->spectrum = eig_hermitian(matrix_); });
  return cache_->spectrum;
}

}  // namespace qtherm
