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

// Independent reference computations used to check the library.
//
// Nothing here calls into the code under test except for plain data types (CMat,
// NetworkBehavior storage). Each oracle takes a different route to the same number:
// characteristic polynomials instead of Jacobi rotations, full Kronecker products
// instead of index contraction, facet inequalities instead of linear programming.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <cstddef>
#include <random>
#include <vector>

#include "netnl/behaviors.hpp"
#include "netnl/linalg.hpp"

namespace oracle {

using netnl::linalg::CMat;
using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Random inputs

inline CMat random_hermitian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = g(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = Complex(g(rng), g(rng));
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

inline CMat random_density(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  CMat r = a * a.adjoint();
  Complex tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) tr += r(i, i);
  return r * (1.0 / tr.real());
}

// ---------------------------------------------------------------------------
// Eigenvalues from the characteristic polynomial

/// Coefficients c[0..n] of det(t I - M) = sum c[k] t^{n-k}, by Faddeev-LeVerrier.
inline std::vector<Complex> char_poly(const CMat& m) {
  const std::size_t n = m.rows();
  std::vector<Complex> c(n + 1, 0.0);
  c[0] = 1.0;
  CMat acc(n, n);  // B_{k-1}
  for (std::size_t k = 1; k <= n; ++k) {
    // A_k = M B_{k-1} (B_0 = I), c_k = -tr(A_k) / k, B_k = A_k + c_k I.
    CMat next = m * (k == 1 ? CMat::identity(n) : acc);
    Complex tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += next(i, i);
    c[k] = -tr / static_cast<double>(k);
    acc = next;
    for (std::size_t i = 0; i < n; ++i) acc(i, i) += c[k];
  }
  return c;
}

inline Complex horner(const std::vector<Complex>& c, Complex t) {
  Complex v = 0.0;
  for (const auto& ck : c) v = v * t + ck;
  return v;
}

/// All roots of the monic polynomial, Durand-Kerner iteration followed by Newton polishing.
inline std::vector<Complex> poly_roots(const std::vector<Complex>& c) {
  const std::size_t n = c.size() - 1;
  if (n == 1) return {-c[1]};
  if (n == 2) {
    const Complex disc = std::sqrt(c[1] * c[1] - 4.0 * c[2]);
    return {(-c[1] - disc) / 2.0, (-c[1] + disc) / 2.0};
  }
  double bound = 0.0;
  for (std::size_t k = 1; k <= n; ++k) bound = std::max(bound, std::abs(c[k]));
  bound += 1.0;
  std::vector<Complex> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = bound * std::polar(1.0, 0.4 + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  for (int it = 0; it < 5000; ++it) {
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex den = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) den *= z[i] - z[j];
      if (std::abs(den) < 1e-300) den = 1e-300;
      const Complex step = horner(c, z[i]) / den;
      z[i] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-15 * bound) break;
  }
  // Derivative coefficients for Newton steps.
  std::vector<Complex> d;
  for (std::size_t k = 0; k < n; ++k) d.push_back(c[k] * static_cast<double>(n - k));
  for (auto& r : z)
    for (int it = 0; it < 3; ++it) {
      const Complex dv = horner(d, r);
      if (std::abs(dv) < 1e-14) break;
      r -= horner(c, r) / dv;
    }
  return z;
}

/// Sorted real eigenvalues of a Hermitian matrix via its characteristic polynomial.
inline std::vector<double> eigenvalues_by_char_poly(const CMat& m) {
  std::vector<double> out;
  for (const auto& r : poly_roots(char_poly(m))) out.push_back(r.real());
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Tensor algebra by definition

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Tr_B of an operator on A (x) B, as sum_k (I (x) <k|) M (I (x) |k>).
inline CMat trace_second(const CMat& m, std::size_t da, std::size_t db) {
  CMat out(da, da);
  for (std::size_t k = 0; k < db; ++k) {
    CMat bra(da, da * db);
    for (std::size_t i = 0; i < da; ++i) bra(i, i * db + k) = 1.0;
    out += bra * m * bra.adjoint();
  }
  return out;
}

/// Tr_A of an operator on A (x) B.
inline CMat trace_first(const CMat& m, std::size_t da, std::size_t db) {
  CMat out(db, db);
  for (std::size_t k = 0; k < da; ++k) {
    CMat bra(db, da * db);
    for (std::size_t i = 0; i < db; ++i) bra(i, k * db + i) = 1.0;
    out += bra * m * bra.adjoint();
  }
  return out;
}

inline double real_trace(const CMat& m) {
  double t = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i).real();
  return t;
}

/// p(abc|xz) of a no-Bob-input bilocality scenario from full operators on A (x) B1 (x) B2 (x) C.
inline std::vector<double> bilocal_behavior_by_kron(const CMat& rho_ab, const CMat& rho_bc,
                                                    const std::vector<std::vector<CMat>>& alice,
                                                    const std::vector<CMat>& bob,
                                                    const std::vector<std::vector<CMat>>& charlie) {
  const CMat rho = oracle::kron(rho_ab, rho_bc);
  std::vector<double> p;
  for (std::size_t x = 0; x < alice.size(); ++x)
    for (std::size_t z = 0; z < charlie.size(); ++z)
      for (std::size_t a = 0; a < alice[x].size(); ++a)
        for (std::size_t b = 0; b < bob.size(); ++b)
          for (std::size_t c = 0; c < charlie[z].size(); ++c)
            p.push_back(real_trace(oracle::kron(oracle::kron(alice[x][a], bob[b]), charlie[z][c]) * rho));
  return p;
}

// ---------------------------------------------------------------------------
// CHSH polytope by facets

/// Locality of a no-signaling 2-input / 2-output bipartite table p[x][y][a][b], from the
/// eight CHSH facets (positivity and no-signaling assumed to hold).
inline bool chsh_facet_local(const std::vector<double>& p, double tol = 1e-9) {
  auto e = [&](std::size_t x, std::size_t y) {
    double v = 0.0;
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) v += (a == b ? 1.0 : -1.0) * p[((x * 2 + y) * 2 + a) * 2 + b];
    return v;
  };
  for (std::size_t neg = 0; neg < 4; ++neg)
    for (double overall : {1.0, -1.0}) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += (k == neg ? -1.0 : 1.0) * e(k >> 1, k & 1);
      if (overall * s > 2.0 + tol) return false;
    }
  return true;
}

inline std::vector<double> pr_box() {
  std::vector<double> p(16, 0.0);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t a = 0; a < 2; ++a) p[((x * 2 + y) * 2 + a) * 2 + (a ^ (x & y))] = 0.5;
  return p;
}

inline std::vector<double> deterministic_2222(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
  std::vector<double> p(16, 0.0);
  const std::size_t fa[2] = {a0, a1}, fb[2] = {b0, b1};
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) p[((x * 2 + y) * 2 + fa[x]) * 2 + fb[y]] = 1.0;
  return p;
}

}  // namespace oracle
