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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "netnl/linalg.hpp"
#include "netnl/quantum.hpp"
#include "oracles.hpp"

namespace {

using namespace netnl;
using linalg::CMat;
using linalg::Complex;

CMat sz() { return quantum::pauli_matrix(quantum::Axis::Z); }

TEST(Kron, IdentityTimesIdentity) {
  EXPECT_EQ(linalg::kron(CMat::identity(2), CMat::identity(2)), CMat::identity(4));
}

TEST(Kron, PauliZSquared) {
  const double d[] = {1, -1, -1, 1};
  EXPECT_EQ(linalg::kron(sz(), sz()), CMat::diagonal(d));
}

TEST(Kron, ProjectorOnto01) {
  CMat p0(2, 2), p1(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  CMat want(4, 4);
  want(1, 1) = 1.0;  // |01> is basis index 1
  EXPECT_EQ(linalg::kron(p0, p1), want);
}

TEST(Kron, MatchesDefinitionOnRandomRectangles) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    CMat a(2 + t % 3, 1 + t % 2), b(1 + t % 4, 3);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = Complex(g(rng), g(rng));
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) = Complex(g(rng), g(rng));
    EXPECT_LE(linalg::max_norm_diff(linalg::kron(a, b), oracle::kron(a, b)), 1e-15);
  }
}

TEST(Kron, Associative) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const CMat a = oracle::random_hermitian(rng, 2), b = oracle::random_hermitian(rng, 3),
               c = oracle::random_hermitian(rng, 2);
    EXPECT_LE(linalg::max_norm_diff(linalg::kron(linalg::kron(a, b), c), linalg::kron(a, linalg::kron(b, c))), 1e-12);
  }
}

TEST(Kron, CapIsEnforced) {
  EXPECT_THROW(linalg::kron(CMat::identity(64), CMat::identity(2)), DimensionError);
  EXPECT_NO_THROW(linalg::kron(CMat::identity(64), CMat::identity(2), 1 << 16));
}

TEST(PartialTrace, MaximallyEntangledMarginal) {
  const CMat phi = linalg::projector(quantum::bell_state(0, 0));
  const std::vector<std::size_t> dims{2, 2}, keep{0};
  EXPECT_LE(linalg::max_norm_diff(linalg::partial_trace(phi, dims, keep), 0.5 * CMat::identity(2)), 1e-15);
}

TEST(PartialTrace, ProductStateFactorizes) {
  std::mt19937_64 rng(3);
  const CMat rho = oracle::random_density(rng, 3), tau = oracle::random_hermitian(rng, 2);
  const std::vector<std::size_t> dims{3, 2}, keep{0};
  const CMat got = linalg::partial_trace(linalg::kron(rho, tau), dims, keep);
  EXPECT_LE(linalg::max_norm_diff(got, rho * tau.trace()), 1e-12);
}

TEST(PartialTrace, KeepAllIsIdentity) {
  std::mt19937_64 rng(5);
  const CMat m = oracle::random_hermitian(rng, 6);
  const std::vector<std::size_t> dims{2, 3}, keep{0, 1};
  EXPECT_EQ(linalg::partial_trace(m, dims, keep), m);
}

TEST(PartialTrace, MatchesBasisSumOracle) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 30; ++t) {
    const std::size_t da = 2 + t % 2, db = 2 + t % 3;
    const CMat m = oracle::random_hermitian(rng, da * db);
    const std::vector<std::size_t> dims{da, db}, k0{0}, k1{1};
    EXPECT_LE(linalg::max_norm_diff(linalg::partial_trace(m, dims, k0), oracle::trace_second(m, da, db)), 1e-12);
    EXPECT_LE(linalg::max_norm_diff(linalg::partial_trace(m, dims, k1), oracle::trace_first(m, da, db)), 1e-12);
  }
}

TEST(PartialTrace, PreservesTraceOnRandomHermitian) {
  std::mt19937_64 rng(17);
  const std::vector<std::size_t> dims{2, 3, 2};
  const std::vector<std::vector<std::size_t>> keeps{{0}, {1}, {2}, {0, 2}, {1, 2}};
  for (int t = 0; t < 120; ++t) {
    const CMat m = oracle::random_hermitian(rng, 12);
    const auto& keep = keeps[static_cast<std::size_t>(t) % keeps.size()];
    EXPECT_NEAR(std::abs(linalg::partial_trace(m, dims, keep).trace() - m.trace()), 0.0, 1e-12);
  }
}

TEST(PartialTrace, DimensionMismatchThrows) {
  const std::vector<std::size_t> dims{2, 3}, keep{0};
  EXPECT_THROW(linalg::partial_trace(CMat::identity(4), dims, keep), DimensionError);
}

TEST(PermuteSubsystems, SwapsFactors) {
  std::mt19937_64 rng(19);
  const CMat a = oracle::random_hermitian(rng, 2), b = oracle::random_hermitian(rng, 3);
  const std::vector<std::size_t> dims{2, 3}, perm{1, 0};
  EXPECT_LE(linalg::max_norm_diff(linalg::permute_subsystems(linalg::kron(a, b), dims, perm), linalg::kron(b, a)),
            1e-14);
}

TEST(PartialTranspose, IsAnInvolution) {
  std::mt19937_64 rng(23);
  const std::vector<std::size_t> dims{2, 3};
  for (int t = 0; t < 20; ++t) {
    const CMat m = oracle::random_hermitian(rng, 6);
    for (std::size_t sys = 0; sys < 2; ++sys)
      EXPECT_EQ(linalg::partial_transpose(linalg::partial_transpose(m, dims, sys), dims, sys), m);
  }
}

TEST(HermitianEigen, PauliZ) {
  const auto e = linalg::hermitian_eigen(sz());
  ASSERT_EQ(e.eigenvalues.size(), 2u);
  EXPECT_NEAR(e.eigenvalues[0], -1.0, 1e-15);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-15);
}

TEST(HermitianEigen, Identity) {
  for (double v : linalg::hermitian_eigen(CMat::identity(4)).eigenvalues) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(HermitianEigen, PartialTransposeOfPhiPlus) {
  const CMat phi = linalg::projector(quantum::bell_state(0, 0));
  const std::vector<std::size_t> dims{2, 2};
  const CMat pt = linalg::partial_transpose(phi, dims, 1);
  const auto want = oracle::eigenvalues_by_char_poly(pt);
  EXPECT_NEAR(want.front(), -0.5, 1e-12);
  EXPECT_NEAR(linalg::min_eigenvalue(pt), -0.5, 1e-12);
}

TEST(HermitianEigen, AgreesWithCharacteristicPolynomial) {
  std::mt19937_64 rng(29);
  for (std::size_t n : {2u, 3u, 4u}) {
    for (int t = 0; t < 50; ++t) {
      const CMat m = oracle::random_hermitian(rng, n);
      const auto got = linalg::hermitian_eigen(m).eigenvalues;
      const auto want = oracle::eigenvalues_by_char_poly(m);
      for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(got[k], want[k], 1e-9) << "n=" << n << " k=" << k;
    }
  }
}

TEST(HermitianEigen, ReconstructsAndIsOrthonormalUpTo16) {
  std::mt19937_64 rng(31);
  for (std::size_t n = 1; n <= 16; ++n) {
    for (int t = 0; t < 4; ++t) {
      const CMat m = oracle::random_hermitian(rng, n);
      const auto e = linalg::hermitian_eigen(m);
      EXPECT_LE(linalg::max_norm_diff(e.reconstruct(), m), 1e-10) << "n=" << n;
      EXPECT_LE(linalg::max_norm_diff(e.eigenvectors.adjoint() * e.eigenvectors, CMat::identity(n)), 1e-10);
      for (std::size_t k = 1; k < n; ++k) EXPECT_LE(e.eigenvalues[k - 1], e.eigenvalues[k]);
    }
  }
}

TEST(HermitianEigen, DegenerateSpectrum) {
  const double d[] = {2, 2, -1, -1, 2};
  const CMat m = CMat::diagonal(d);
  const auto e = linalg::hermitian_eigen(m);
  EXPECT_LE(linalg::max_norm_diff(e.reconstruct(), m), 1e-12);
}

TEST(HermitianEigen, RejectsNonHermitian) {
  CMat m{{0.0, 1.0}, {0.0, 0.0}};
  EXPECT_THROW(linalg::hermitian_eigen(m), PreconditionError);
  EXPECT_THROW(linalg::hermitian_eigen(CMat(2, 3)), PreconditionError);
}

TEST(FidelityPure, Examples) {
  const CMat phi = quantum::bell_state(0, 0);
  EXPECT_NEAR(linalg::fidelity_pure(linalg::projector(phi), phi), 1.0, 1e-15);
  EXPECT_NEAR(linalg::fidelity_pure(0.25 * CMat::identity(4), phi), 0.25, 1e-15);
  EXPECT_NEAR(linalg::fidelity_pure(linalg::projector(quantum::bell_state(1, 1)), phi), 0.0, 1e-15);
}

TEST(FidelityPure, DimensionMismatchThrows) {
  EXPECT_THROW(linalg::fidelity_pure(CMat::identity(2) * 0.5, quantum::bell_state(0, 0)), DimensionError);
}

TEST(CMat, RejectsNonFiniteEntries) {
  CMat m(1, 1);
  m(0, 0) = std::nan("");
  EXPECT_FALSE(m.all_finite());
  EXPECT_THROW(linalg::hermitian_eigen(m), PreconditionError);
}

}  // namespace
