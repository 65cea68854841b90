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

#include "qtherm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qtherm/error.hpp"
#include "qtherm/simd/kernels.hpp"

namespace qtherm {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidArgument("ComplexMatrix: " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                          " needs " + std::to_string(rows_ * cols_) + " entries, got " +
                          std::to_string(data_.size()));
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const cplx> v, std::span<const cplx> w) {
  ComplexMatrix m(v.size(), w.size());
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < v.size(); ++i) k.axpy_conj(w.size(), v[i], w.data(), m.row(i).data());
  return m;
}

Vector ComplexMatrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

std::vector<double> ComplexMatrix::real_diagonal() const {
  std::vector<double> d(std::min(rows_, cols_));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i).real();
  return d;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

double ComplexMatrix::hermitian_defect() const {
  if (!square()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return worst;
}

bool ComplexMatrix::is_hermitian(double rel_tol) const {
  if (!square()) return false;
  return hermitian_defect() <= rel_tol * std::max(max_abs(), std::numeric_limits<double>::min());
}

void ComplexMatrix::symmetrize() {
  for (std::size_t i = 0; i < rows_; ++i) {
    (*this)(i, i) = (*this)(i, i).real();
    for (std::size_t j = i + 1; j < cols_; ++j) {
      const cplx avg = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
      (*this)(i, j) = avg;
      (*this)(j, i) = std::conj(avg);
    }
  }
}

namespace {
void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                          std::to_string(b.cols()));
  }
}
}  // namespace

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

void ComplexMatrix::add_scaled(cplx s, const ComplexMatrix& other) {
  require_same_shape(*this, other, "add_scaled");
  simd::kernels().axpy(data_.size(), s, other.data(), data_.data());
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw InvalidArgument("matrix product: inner dimensions " + std::to_string(a.cols()) + " and " +
                          std::to_string(b.rows()) + " differ");
  }
  ComplexMatrix c(a.rows(), b.cols());
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx* out = c.row(i).data();
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const cplx s = a(i, l);
      if (s == cplx{}) continue;
      k.axpy(b.cols(), s, b.row(l).data(), out);
    }
  }
  return c;
}

Vector operator*(const ComplexMatrix& a, std::span<const cplx> v) {
  if (a.cols() != v.size()) throw InvalidArgument("matrix-vector product: dimension mismatch");
  Vector out(a.rows());
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = k.dotu(v.size(), a.row(i).data(), v.data());
  return out;
}

ComplexMatrix conjugate_by(const ComplexMatrix& u, const ComplexMatrix& a) { return u * a * u.adjoint(); }

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t max_dimension) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if ((a.rows() != 0 && rows / a.rows() != b.rows()) || (a.cols() != 0 && cols / a.cols() != b.cols()) ||
      rows > max_dimension || cols > max_dimension) {
    throw CapacityError("kron: result " + std::to_string(a.rows()) + "*" + std::to_string(b.rows()) + " x " +
                        std::to_string(a.cols()) + "*" + std::to_string(b.cols()) +
                        " exceeds the maximum dimension " + std::to_string(max_dimension));
  }
  ComplexMatrix c(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx s = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k) {
        cplx* out = &c(i * b.rows() + k, j * b.cols());
        const cplx* in = &b(k, 0);
        for (std::size_t l = 0; l < b.cols(); ++l) out[l] = s * in[l];
      }
    }
  return c;
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors, std::size_t max_dimension) {
  if (factors.empty()) return ComplexMatrix::identity(1);
  ComplexMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i], max_dimension);
  return out;
}

ComplexMatrix kron_power(const ComplexMatrix& a, std::size_t n, std::size_t max_dimension) {
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (std::size_t i = 0; i < n; ++i) out = kron(out, a, max_dimension);
  return out;
}

double norm(std::span<const cplx> v) {
  return std::sqrt(simd::kernels().dotc(v.size(), v.data(), v.data()).real());
}

cplx inner(std::span<const cplx> v, std::span<const cplx> w) {
  if (v.size() != w.size()) throw InvalidArgument("inner: dimension mismatch");
  return simd::kernels().dotc(v.size(), v.data(), w.data());
}

namespace pauli {
ComplexMatrix x() { return ComplexMatrix(2, 2, {0.0, 1.0, 1.0, 0.0}); }
ComplexMatrix y() { return ComplexMatrix(2, 2, {0.0, cplx(0, -1), cplx(0, 1), 0.0}); }
ComplexMatrix z() { return ComplexMatrix(2, 2, {1.0, 0.0, 0.0, -1.0}); }
}  // namespace pauli

}  // namespace qtherm
