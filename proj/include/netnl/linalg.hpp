// Copyright 2026 The netnl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex matrices for small quantum systems.
//
// Multi-partite operators use a fixed convention: subsystem 0 is the
// leftmost tensor factor, so the flat index of a basis state is the
// mixed-radix number whose most significant digit is subsystem 0.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netnl/errors.hpp"

namespace netnl::linalg {

using Complex = std::complex<double>;

inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kAlgebraicTol = 1e-12;
inline constexpr std::size_t kDefaultKronCap = 4096;

class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMat(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("CMat: entry count does not match rows*cols");
    }
  }
  CMat(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw DimensionError("CMat: ragged initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static CMat identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static CMat zeros(std::size_t rows, std::size_t cols) { return CMat(rows, cols); }
  static CMat column(std::vector<Complex> entries) {
    const std::size_t n = entries.size();
    return CMat(n, 1, std::move(entries));
  }
  static CMat diagonal(std::span<const double> d) {
    CMat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  std::span<const Complex> entries() const { return data_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }

  CMat adjoint() const {
    CMat out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }
  CMat transpose() const {
    CMat out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }
  CMat conj() const {
    CMat out = *this;
    for (auto& z : out.data_) z = std::conj(z);
    return out;
  }

  Complex trace() const {
    if (!is_square()) throw DimensionError("trace of non-square matrix");
    Complex t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  CMat& operator+=(const CMat& o) {
    require_same_shape(o, "+");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  CMat& operator-=(const CMat& o) {
    require_same_shape(o, "-");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  CMat& operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend CMat operator+(CMat a, const CMat& b) { return a += b; }
  friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
  friend CMat operator-(CMat a) { return a *= -1.0; }
  friend CMat operator*(CMat a, Complex s) { return a *= s; }
  friend CMat operator*(Complex s, CMat a) { return a *= s; }
  friend CMat operator*(const CMat& a, const CMat& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix product: inner dimensions differ");
    CMat out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex(0.0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }
  friend bool operator==(const CMat&, const CMat&) = default;

 private:
  void require_same_shape(const CMat& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw DimensionError(std::string("matrix ") + op + ": shapes differ");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Largest entrywise |a - b|.
inline double max_norm_diff(const CMat& a, const CMat& b) { return (a - b).max_abs(); }

inline CMat commutator(const CMat& a, const CMat& b) { return a * b - b * a; }
inline CMat anticommutator(const CMat& a, const CMat& b) { return a * b + b * a; }

/// |psi><psi| for a column vector psi.
inline CMat projector(const CMat& psi) {
  if (psi.cols() != 1) throw DimensionError("projector: expected a column vector");
  return psi * psi.adjoint();
}

inline bool is_hermitian(const CMat& m, double tol = kStructuralTol) {
  if (!m.is_square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
  return true;
}

inline std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

/// Kronecker product; `cap` bounds the number of entries of the result.
inline CMat kron(const CMat& a, const CMat& b, std::size_t cap = kDefaultKronCap) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (rows * cols > cap) {
    std::ostringstream msg;
    msg << "kron: result " << rows << "x" << cols << " exceeds the cap of " << cap << " entries";
    throw DimensionError(msg.str());
  }
  CMat out(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

inline CMat kron_all(std::span<const CMat> factors, std::size_t cap = kDefaultKronCap) {
  CMat out = CMat::identity(1);
  for (const auto& f : factors) out = kron(out, f, cap);
  return out;
}

/// Block-diagonal matrix with the given blocks along the diagonal.
inline CMat direct_sum(std::span<const CMat> blocks) {
  std::size_t rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  CMat out(rows, cols);
  std::size_t r0 = 0, c0 = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) out(r0 + i, c0 + j) = b(i, j);
    r0 += b.rows();
    c0 += b.cols();
  }
  return out;
}

namespace detail {

inline void require_square_with_dims(const CMat& m, std::span<const std::size_t> dims, const char* who) {
  if (!m.is_square() || product(dims) != m.rows()) {
    std::ostringstream msg;
    msg << who << ": operator of dimension " << m.rows() << "x" << m.cols()
        << " does not match the subsystem dimension product " << product(dims);
    throw DimensionError(msg.str());
  }
}

inline std::vector<std::size_t> strides_of(std::span<const std::size_t> dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

}  // namespace detail

/// Reduced operator on the subsystems listed in `keep` (kept in ascending order).
inline CMat partial_trace(const CMat& m, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
  detail::require_square_with_dims(m, dims, "partial_trace");
  const std::size_t n = dims.size();
  std::vector<bool> kept(n, false);
  for (std::size_t k : keep) {
    if (k >= n) throw DimensionError("partial_trace: subsystem index out of range");
    kept[k] = true;
  }
  if (keep.empty()) throw DimensionError("partial_trace: keep set must be nonempty");

  std::vector<std::size_t> kept_dims, traced_dims, kept_idx, traced_idx;
  for (std::size_t k = 0; k < n; ++k) {
    if (kept[k]) {
      kept_dims.push_back(dims[k]);
      kept_idx.push_back(k);
    } else {
      traced_dims.push_back(dims[k]);
      traced_idx.push_back(k);
    }
  }
  const auto strides = detail::strides_of(dims);
  const std::size_t dk = product(kept_dims);
  const std::size_t dt = product(traced_dims);

  // Flat offset contributed by a kept-index or traced-index multi-digit value.
  auto offsets = [&](const std::vector<std::size_t>& sub_dims, const std::vector<std::size_t>& which) {
    std::vector<std::size_t> out(product(sub_dims), 0);
    for (std::size_t v = 0; v < out.size(); ++v) {
      std::size_t rem = v, off = 0;
      for (std::size_t k = sub_dims.size(); k-- > 0;) {
        off += (rem % sub_dims[k]) * strides[which[k]];
        rem /= sub_dims[k];
      }
      out[v] = off;
    }
    return out;
  };
  const auto kept_off = offsets(kept_dims, kept_idx);
  const auto traced_off = offsets(traced_dims, traced_idx);

  CMat out(dk, dk);
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      Complex s = 0.0;
      for (std::size_t t = 0; t < dt; ++t) s += m(kept_off[i] + traced_off[t], kept_off[j] + traced_off[t]);
      out(i, j) = s;
    }
  return out;
}

/// Reorders tensor factors: output subsystem k is input subsystem perm[k].
inline CMat permute_subsystems(const CMat& m, std::span<const std::size_t> dims, std::span<const std::size_t> perm) {
  detail::require_square_with_dims(m, dims, "permute_subsystems");
  const std::size_t n = dims.size();
  if (perm.size() != n) throw DimensionError("permute_subsystems: permutation length mismatch");
  std::vector<bool> seen(n, false);
  for (std::size_t p : perm) {
    if (p >= n || seen[p]) throw DimensionError("permute_subsystems: not a permutation");
    seen[p] = true;
  }
  std::vector<std::size_t> new_dims(n);
  for (std::size_t k = 0; k < n; ++k) new_dims[k] = dims[perm[k]];
  const auto old_strides = detail::strides_of(dims);
  const std::size_t d = m.rows();
  // map[new_flat] = old_flat
  std::vector<std::size_t> map(d);
  for (std::size_t v = 0; v < d; ++v) {
    std::size_t rem = v, old = 0;
    for (std::size_t k = n; k-- > 0;) {
      old += (rem % new_dims[k]) * old_strides[perm[k]];
      rem /= new_dims[k];
    }
    map[v] = old;
  }
  CMat out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(i, j) = m(map[i], map[j]);
  return out;
}

/// Transposes the row and column digits of subsystem `sys`.
inline CMat partial_transpose(const CMat& m, std::span<const std::size_t> dims, std::size_t sys) {
  detail::require_square_with_dims(m, dims, "partial_transpose");
  if (sys >= dims.size()) throw DimensionError("partial_transpose: subsystem index out of range");
  const auto strides = detail::strides_of(dims);
  const std::size_t s = strides[sys], d = dims[sys];
  CMat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const std::size_t di = (i / s) % d, dj = (j / s) % d;
      const std::size_t ii = i - di * s + dj * s;
      const std::size_t jj = j - dj * s + di * s;
      out(ii, jj) = m(i, j);
    }
  return out;
}

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  CMat eigenvectors;                // column k belongs to eigenvalues[k]

  CMat reconstruct() const {
    return eigenvectors * CMat::diagonal(eigenvalues) * eigenvectors.adjoint();
  }
};

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
inline EigenDecomposition hermitian_eigen(const CMat& m) {
  if (!m.is_square()) throw PreconditionError("hermitian_eigen: matrix is not square");
  if (!m.all_finite()) throw PreconditionError("hermitian_eigen: matrix has non-finite entries");
  if (!is_hermitian(m, kStructuralTol)) throw PreconditionError("hermitian_eigen: matrix is not Hermitian");
  const std::size_t n = m.rows();
  CMat a = m;
  // Symmetrize so the iteration starts from an exactly Hermitian matrix.
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }
  CMat v = CMat::identity(n);

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale += std::norm(a(i, j));
  scale = std::sqrt(scale);
  const double threshold = 1e-15 * std::max(scale, 1e-300);

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= threshold) break;

    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= 1e-300) continue;
        // Phase that makes a(p,q) real positive when column q is multiplied by it.
        const Complex phase = std::conj(a(p, q)) / mag;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // G = D R with D = diag(1, phase) on (p,q) and R = [[c, s], [-s, c]].
        const Complex g_pp = c, g_pq = s, g_qp = -s * phase, g_qq = c * phase;
        // a <- a G
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * g_pp + akq * g_qp;
          a(k, q) = akp * g_pq + akq * g_qq;
        }
        // a <- G^dagger a
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(g_pp) * apk + std::conj(g_qp) * aqk;
          a(q, k) = std::conj(g_pq) * apk + std::conj(g_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * g_pp + vkq * g_qp;
          v(k, q) = vkp * g_pq + vkq * g_qq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  EigenDecomposition out{std::vector<double>(n), CMat(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

/// Largest |eigenvalue| of a Hermitian matrix (its operator norm).
inline double spectral_norm_hermitian(const CMat& m) {
  const auto eig = hermitian_eigen(m);
  if (eig.eigenvalues.empty()) return 0.0;
  return std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
}

inline double min_eigenvalue(const CMat& m) { return hermitian_eigen(m).eigenvalues.front(); }

/// <psi| rho |psi> for a unit column vector psi.
inline double fidelity_pure(const CMat& rho, const CMat& psi) {
  if (psi.cols() != 1 || !rho.is_square() || rho.rows() != psi.rows()) {
    throw DimensionError("fidelity_pure: state and vector dimensions differ");
  }
  const Complex f = (psi.adjoint() * rho * psi)(0, 0);
  if (std::abs(f.imag()) > kAlgebraicTol * std::max(1.0, rho.max_abs())) {
    throw PreconditionError("fidelity_pure: overlap has an imaginary part; is rho Hermitian?");
  }
  return std::clamp(f.real(), 0.0, 1.0);
}

/// Tr(rho sigma) for Hermitian operands.
inline double overlap(const CMat& rho, const CMat& sigma) {
  if (!rho.is_square() || rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw DimensionError("overlap: dimensions differ");
  }
  Complex s = 0.0;
  for (std::size_t i = 0; i < rho.rows(); ++i)
    for (std::size_t j = 0; j < rho.cols(); ++j) s += rho(i, j) * sigma(j, i);
  return s.real();
}

/// Projector onto the span of eigenvectors with eigenvalue above `tol`.
inline CMat support_projector(const CMat& m, double tol = kStructuralTol) {
  const auto eig = hermitian_eigen(m);
  const std::size_t n = m.rows();
  CMat p(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (eig.eigenvalues[k] <= tol) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p(i, j) += eig.eigenvectors(i, k) * std::conj(eig.eigenvectors(j, k));
  }
  return p;
}

}  // namespace netnl::linalg
