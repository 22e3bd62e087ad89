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

// Self-testing of the entanglement-swapping network.
//
// Given a bilocality scenario whose behavior reproduces the reference correlations,
// the outer observables must anticommute on the support of the sources, Bob must be
// performing the Bell-state measurement, and each outcome must steer a maximally
// entangled A-C pair. This header checks those conclusions on concrete scenarios:
// the correlation targets themselves, the 2x2 block (Jordan) structure of the outer
// observables, and the local channels that extract the Bell states.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "netnl/behaviors.hpp"
#include "netnl/classical.hpp"
#include "netnl/errors.hpp"
#include "netnl/linalg.hpp"
#include "netnl/quantum.hpp"

namespace netnl::selftest {

using linalg::CMat;
using linalg::Complex;
using quantum::DensityMatrix;
using quantum::NetworkScenario;
using quantum::Observable;

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kBlockTol = 1e-9;

// ---------------------------------------------------------------------------
// Correlation targets

/// Target of E_b(x, z) = <A_x C_z> given b = (b1, b2): equal inputs give (-1)^{b1} [b1 == b2],
/// different inputs give (-1)^{b1} [b1 != b2].
inline double target_correlator(std::size_t b, std::size_t x, std::size_t z) {
  const std::size_t b1 = b >> 1 & 1, b2 = b & 1;
  const double sign = b1 ? -1.0 : 1.0;
  return x == z ? sign * (b1 == b2 ? 1.0 : 0.0) : sign * (b1 != b2 ? 1.0 : 0.0);
}

struct SelfTestReport {
  double tolerance = kDefaultTol;
  // Correlation checks.
  std::array<double, 4> bob_marginal{};
  double bob_marginal_deviation = 0.0;  // max |p(b) - 1/4|
  double single_party_deviation = 0.0;  // max |<A_x>_b|, |<C_z>_b|
  double correlator_deviation = 0.0;    // max |E_b(x,z) - target|
  // Quantum checks; present when a scenario was supplied.
  std::optional<double> anticommutator_a;
  std::optional<double> anticommutator_c;
  std::optional<std::array<double, 4>> fidelities;
  std::optional<std::array<double, 4>> ppt_minima;
  std::size_t commuting_blocks_a = 0;
  std::size_t commuting_blocks_c = 0;

  double max_correlation_deviation() const {
    return std::max({bob_marginal_deviation, single_party_deviation, correlator_deviation});
  }

  bool pass() const {
    if (max_correlation_deviation() > tolerance) return false;
    if (anticommutator_a && *anticommutator_a > tolerance) return false;
    if (anticommutator_c && *anticommutator_c > tolerance) return false;
    if (fidelities)
      for (double f : *fidelities)
        if (f < 1.0 - tolerance) return false;
    if (ppt_minima)
      for (double m : *ppt_minima)
        if (std::abs(m + 0.5) > tolerance) return false;
    return true;
  }
};

inline void require_reference_shape(const NetworkBehavior& p, const char* who) {
  classical::require_bilocality_shape(p, who);
}

/// Deviations of p from uniform p(b) and the conditional one- and two-point targets.
inline SelfTestReport verify_reference_correlations(const NetworkBehavior& p, double tol = kDefaultTol) {
  require_reference_shape(p, "verify_reference_correlations");
  SelfTestReport r;
  r.tolerance = tol;
  for (std::size_t b = 0; b < 4; ++b) {
    double pb = 0.0;
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t c = 0; c < 2; ++c) pb += p.at({0, 0, 0}, {a, b, c});
    r.bob_marginal[b] = pb;
    r.bob_marginal_deviation = std::max(r.bob_marginal_deviation, std::abs(pb - 0.25));
    if (pb <= kZeroWeight) {
      // Every conditional target is undefined; count the whole target as missed.
      r.single_party_deviation = std::max(r.single_party_deviation, 1.0);
      r.correlator_deviation = std::max(r.correlator_deviation, 1.0);
      continue;
    }
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t z = 0; z < 2; ++z) {
        double ea = 0.0, ec = 0.0, eac = 0.0;
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t c = 0; c < 2; ++c) {
            const double v = p.at({x, 0, z}, {a, b, c}) / pb;
            const double sa = a ? -1.0 : 1.0, sc = c ? -1.0 : 1.0;
            ea += sa * v;
            ec += sc * v;
            eac += sa * sc * v;
          }
        r.single_party_deviation = std::max({r.single_party_deviation, std::abs(ea), std::abs(ec)});
        r.correlator_deviation = std::max(r.correlator_deviation, std::abs(eac - target_correlator(b, x, z)));
      }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Block solutions

enum class BlockCase { k1a, k1b, k2, kNone };

inline const char* to_string(BlockCase c) {
  switch (c) {
    case BlockCase::k1a:
      return "1a";
    case BlockCase::k1b:
      return "1b";
    case BlockCase::k2:
      return "2";
    case BlockCase::kNone:
      break;
  }
  return "none";
}

/// Sign of the sin(theta) sin(phi) term per outcome; outcomes 01 and 10 are read in the
/// frame rotated by U-tilde on Charlie's qubit.
inline double block_sign(std::size_t b) {
  static constexpr double sign[4] = {1.0, -1.0, 1.0, -1.0};
  return sign[b & 3];
}

inline double block_constraint(double theta, double phi, double two_re_r, std::size_t b) {
  return std::cos(theta) * std::cos(phi) + block_sign(b) * std::sin(theta) * std::sin(phi) * two_re_r;
}

/// Which solution family of cos(theta)cos(phi) + s_b sin(theta)sin(phi) 2Re(r) = 1 the triple lies on.
///
/// Writing s = s_b 2Re(r), the left side equals cos(theta - phi)(1 + s)/2 + cos(theta + phi)(1 - s)/2,
/// so solutions are theta = phi with s = 1 (1a), theta = 2pi - phi with s = -1 (1b), or
/// theta = phi in {0, pi} with s free (2). Case 2 is reported first where families meet.
inline BlockCase classify_block_solution(double theta, double phi, double two_re_r, std::size_t b,
                                         double tol = kBlockTol) {
  if (std::abs(block_constraint(theta, phi, two_re_r, b) - 1.0) > tol) return BlockCase::kNone;
  const double u = 1.0 - std::cos(theta - phi);  // distance from theta = phi
  const double v = 1.0 - std::cos(theta + phi);  // distance from theta = -phi
  // Constraint residual bounds u(1+s)/2 + v(1-s)/2, so near the crossing both are O(tol).
  const double crossing = 4.0 * tol;
  if (u <= crossing && v <= crossing) return BlockCase::k2;
  return u <= v ? BlockCase::k1a : BlockCase::k1b;
}

// ---------------------------------------------------------------------------
// Jordan families

/// Outer observables in block form: A0 = sum_alpha sigma_z, A1 = sum_alpha (cos theta_alpha sigma_z +
/// sin theta_alpha sigma_x), and likewise for C with phi_gamma. Weights give the block populations
/// of the source states.
struct JordanFamily {
  std::vector<double> alice_weights;
  std::vector<double> thetas;
  std::vector<double> charlie_weights;
  std::vector<double> phis;

  static JordanFamily uniform(std::vector<double> thetas, std::vector<double> phis) {
    const std::size_t na = thetas.size(), nc = phis.size();
    return {std::vector<double>(na, 1.0 / static_cast<double>(na)), std::move(thetas),
            std::vector<double>(nc, 1.0 / static_cast<double>(nc)), std::move(phis)};
  }

  void validate() const {
    auto check = [](const std::vector<double>& w, const std::vector<double>& ang, const char* who) {
      if (w.empty() || w.size() != ang.size()) {
        throw ValidationError(std::string("JordanFamily: ") + who + " needs one weight per block");
      }
      double total = 0.0;
      for (double x : w) {
        if (!(x >= 0.0)) throw ValidationError(std::string("JordanFamily: negative ") + who + " weight");
        total += x;
      }
      if (std::abs(total - 1.0) > kNormalizationTol) {
        throw ValidationError(std::string("JordanFamily: ") + who + " weights do not sum to 1");
      }
      for (double a : ang)
        if (!std::isfinite(a)) throw ValidationError(std::string("JordanFamily: non-finite ") + who + " angle");
    };
    check(alice_weights, thetas, "Alice");
    check(charlie_weights, phis, "Charlie");
  }
};

inline CMat block_observable(double angle) {
  using quantum::Axis;
  return std::cos(angle) * quantum::pauli_matrix(Axis::Z) + std::sin(angle) * quantum::pauli_matrix(Axis::X);
}

inline std::array<Observable, 2> block_pair(const std::vector<double>& angles) {
  std::vector<CMat> zero, one;
  for (double a : angles) {
    zero.push_back(block_observable(0.0));
    one.push_back(block_observable(a));
  }
  return {Observable(linalg::direct_sum(zero)), Observable(linalg::direct_sum(one))};
}

struct JordanObservables {
  Observable a0, a1, c0, c1;
};

inline JordanObservables jordan_observables(const JordanFamily& f) {
  f.validate();
  auto [a0, a1] = block_pair(f.thetas);
  auto [c0, c1] = block_pair(f.phis);
  return {std::move(a0), std::move(a1), std::move(c0), std::move(c1)};
}

/// Real rotation taking the reference observables (sigma_x +- sigma_z)/sqrt2 to sigma_z and sigma_x.
inline CMat reference_rotation() {
  const double c = std::cos(std::numbers::pi / 8.0), s = std::sin(std::numbers::pi / 8.0);
  return CMat{{c, s}, {-s, c}};
}

/// Bilocality scenario with the family's observables. Each source emits the block label
/// (distributed by the weights, kept by the outer party) and a rotated Phi+ pair, so that
/// theta = phi = pi/2 on every block reproduces the reference behavior.
inline NetworkScenario jordan_scenario(const JordanFamily& f) {
  const auto obs = jordan_observables(f);
  const CMat r = reference_rotation();
  const CMat pair = linalg::projector(linalg::kron(r, CMat::identity(2)) * quantum::bell_state(0, 0));
  const std::size_t na = f.thetas.size(), nc = f.phis.size();
  // S_AB on (A'' A', B1): block label first, then Alice's qubit and Bob's.
  const CMat rho_ab = linalg::kron(CMat::diagonal(f.alice_weights), pair);
  // S_BC is built as (C'', C', B2) and reordered to (B2, C'' C').
  const std::vector<std::size_t> dims{nc, 2, 2}, perm{2, 0, 1};
  const CMat rho_bc = linalg::permute_subsystems(linalg::kron(CMat::diagonal(f.charlie_weights), pair), dims, perm);
  return quantum::bilocality_scenario(DensityMatrix(rho_ab), 2 * na, 2, DensityMatrix(rho_bc), 2, 2 * nc,
                                      quantum::povms_of({obs.a0, obs.a1}), {quantum::bsm_povm()},
                                      quantum::povms_of({obs.c0, obs.c1}));
}

/// Reference experiment with Alice holding an extra junk qubit in state `junk`; her
/// measurements act as identity on it.
inline NetworkScenario junk_augmented_reference(const CMat& junk = CMat{{0.6, 0.0}, {0.0, 0.4}}) {
  const auto ref = quantum::reference_observables();
  const CMat phi = linalg::projector(quantum::bell_state(0, 0));
  // (A', B1, J) -> (A', J, B1)
  const std::vector<std::size_t> dims{2, 2, junk.rows()}, perm{0, 2, 1};
  const CMat rho_ab = linalg::permute_subsystems(linalg::kron(phi, junk), dims, perm);
  const CMat id = CMat::identity(junk.rows());
  std::vector<quantum::Povm> alice{
      quantum::observable_to_povm(Observable(linalg::kron(ref[0].matrix(), id))),
      quantum::observable_to_povm(Observable(linalg::kron(ref[1].matrix(), id)))};
  return quantum::bilocality_scenario(DensityMatrix(rho_ab), 2 * junk.rows(), 2, DensityMatrix(phi), 2, 2, alice,
                                      {quantum::bsm_povm()}, quantum::povms_of(ref));
}

// ---------------------------------------------------------------------------
// Extraction

/// Result of bringing a dichotomic pair (O0, O1) to block form.
///
/// `v` has 2 * blocks() rows; rows 2k and 2k+1 are the upper (O0 = +1) and lower (O0 = -1)
/// basis vectors of block k, conjugated. V O0 V^dagger = sum sigma_z and V O1 V^dagger =
/// sum (cos theta_k sigma_z + sin theta_k sigma_x) with sin theta_k >= 0. A zero row marks
/// a direction added to complete a 1x1 block.
struct BlockForm {
  CMat v;
  std::vector<double> thetas;
  std::vector<bool> commuting;  // sin theta_k vanishes
  std::vector<bool> padded;     // block completed with an added direction

  std::size_t blocks() const { return thetas.size(); }
  std::size_t commuting_count() const { return static_cast<std::size_t>(std::count(commuting.begin(), commuting.end(), true)); }
};

namespace detail {

inline CMat column_of(const CMat& m, std::size_t j) {
  CMat c(m.rows(), 1);
  for (std::size_t i = 0; i < m.rows(); ++i) c(i, 0) = m(i, j);
  return c;
}

inline double vnorm(const CMat& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i) s += std::norm(v(i, 0));
  return std::sqrt(s);
}

/// Orthonormal eigenvectors of a Hermitian operator restricted to span(basis columns).
inline linalg::EigenDecomposition restricted_eigen(const CMat& op, const CMat& basis) {
  return linalg::hermitian_eigen(basis.adjoint() * op * basis);
}

inline CMat columns(const std::vector<CMat>& cols, std::size_t dim) {
  CMat m(dim, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < dim; ++i) m(i, j) = cols[j](i, 0);
  return m;
}

}  // namespace detail

inline BlockForm block_form(const Observable& o0, const Observable& o1) {
  const CMat& a0 = o0.matrix();
  const CMat& a1 = o1.matrix();
  if (a0.rows() != a1.rows()) throw DimensionError("block_form: observables differ in dimension");
  const std::size_t d = a0.rows();
  const auto e0 = linalg::hermitian_eigen(a0);
  std::vector<CMat> plus, minus;
  for (std::size_t j = 0; j < d; ++j) (e0.eigenvalues[j] > 0.0 ? plus : minus).push_back(detail::column_of(e0.eigenvectors, j));
  const CMat p_minus = [&] {
    CMat m(d, d);
    for (const auto& v : minus) m += v * v.adjoint();
    return m;
  }();

  struct Upper {
    CMat e;
    double c;
  };
  std::vector<CMat> upper, lower;
  std::vector<double> thetas;
  std::vector<bool> commuting, padded;
  std::vector<Upper> unpaired_upper;
  std::vector<CMat> found_lower;

  if (!plus.empty()) {
    const CMat ep = detail::columns(plus, d);
    const auto m = detail::restricted_eigen(a1, ep);
    for (std::size_t k = 0; k < plus.size(); ++k) {
      const CMat e = ep * detail::column_of(m.eigenvectors, k);
      const double c = std::clamp(m.eigenvalues[k], -1.0, 1.0);
      const CMat g = p_minus * a1 * e;
      const double s = detail::vnorm(g);
      if (s > kBlockTol) {
        upper.push_back(e);
        lower.push_back(g * (1.0 / s));
        found_lower.push_back(lower.back());
        thetas.push_back(std::atan2(s, c));
        commuting.push_back(false);
        padded.push_back(false);
      } else {
        unpaired_upper.push_back({e, c});
      }
    }
  }
  // Remaining lower directions: the part of the -1 space not reached from the +1 space.
  std::vector<CMat> rest;
  if (!minus.empty()) {
    const CMat em = detail::columns(minus, d);
    CMat proj = CMat::identity(minus.size());
    if (!found_lower.empty()) {
      const CMat f = em.adjoint() * detail::columns(found_lower, d);
      proj = proj - f * f.adjoint();
    }
    const auto pe = linalg::hermitian_eigen(0.5 * (proj + proj.adjoint()));
    std::vector<CMat> comp;
    for (std::size_t k = 0; k < minus.size(); ++k)
      if (pe.eigenvalues[k] > 0.5) comp.push_back(em * detail::column_of(pe.eigenvectors, k));
    if (!comp.empty()) {
      const CMat cb = detail::columns(comp, d);
      const auto me = detail::restricted_eigen(a1, cb);
      for (std::size_t k = 0; k < comp.size(); ++k) rest.push_back(cb * detail::column_of(me.eigenvectors, k));
    }
  }
  std::vector<bool> rest_used(rest.size(), false);
  const CMat zero(d, 1);
  for (const auto& u : unpaired_upper) {
    // The lower partner of an upper vector with O1 = c needs O1 = -c.
    std::size_t match = rest.size();
    for (std::size_t k = 0; k < rest.size(); ++k) {
      if (rest_used[k]) continue;
      const double val = (rest[k].adjoint() * a1 * rest[k])(0, 0).real();
      if (std::abs(val + (u.c >= 0 ? 1.0 : -1.0)) < 1e-6) {
        match = k;
        break;
      }
    }
    upper.push_back(u.e);
    if (match < rest.size()) {
      rest_used[match] = true;
      lower.push_back(rest[match]);
      padded.push_back(false);
    } else {
      lower.push_back(zero);
      padded.push_back(true);
    }
    thetas.push_back(u.c >= 0 ? 0.0 : std::numbers::pi);
    commuting.push_back(true);
  }
  for (std::size_t k = 0; k < rest.size(); ++k) {
    if (rest_used[k]) continue;
    const double val = (rest[k].adjoint() * a1 * rest[k])(0, 0).real();
    upper.push_back(zero);
    lower.push_back(rest[k]);
    // Lower entry of the block is -cos theta.
    thetas.push_back(val <= 0 ? 0.0 : std::numbers::pi);
    commuting.push_back(true);
    padded.push_back(true);
  }

  BlockForm out;
  out.v = CMat(2 * thetas.size(), d);
  for (std::size_t k = 0; k < thetas.size(); ++k)
    for (std::size_t j = 0; j < d; ++j) {
      out.v(2 * k, j) = std::conj(upper[k](j, 0));
      out.v(2 * k + 1, j) = std::conj(lower[k](j, 0));
    }
  out.thetas = std::move(thetas);
  out.commuting = std::move(commuting);
  out.padded = std::move(padded);
  return out;
}

/// (1/sqrt2) [[1, 1], [-1, 1]].
inline CMat u_tilde() {
  const double h = std::numbers::sqrt2 / 2.0;
  return CMat{{h, h}, {-h, h}};
}

struct Extraction {
  BlockForm alice;
  BlockForm charlie;
  CMat u_tilde = selftest::u_tilde();

  /// (V_A (x) V_C) rho (V_A (x) V_C)^dagger on (A'', A', C'', C').
  CMat to_block_frame(const CMat& rho_ac) const {
    const CMat v = linalg::kron(alice.v, charlie.v, std::size_t{1} << 22);
    return v * rho_ac * v.adjoint();
  }

  /// Lambda_A (x) Lambda_C: the block frame with both block labels traced out.
  CMat apply(const CMat& rho_ac) const {
    const std::vector<std::size_t> dims{alice.blocks(), 2, charlie.blocks(), 2}, keep{1, 3};
    return linalg::partial_trace(to_block_frame(rho_ac), dims, keep);
  }
};

inline Extraction extraction_channels(const Observable& a0, const Observable& a1, const Observable& c0,
                                      const Observable& c1) {
  return {block_form(a0, a1), block_form(c0, c1)};
}

/// Bell-state target of the extracted state for Bob's outcome b.
inline CMat extraction_target(std::size_t b) {
  const CMat ud = linalg::kron(CMat::identity(2), u_tilde().adjoint());
  switch (b) {
    case 0:
      return quantum::bell_state(0, 0);
    case 1:
      return ud * quantum::bell_state(1, 0);
    case 2:
      return ud * quantum::bell_state(0, 1);
    default:
      return quantum::bell_state(1, 1);
  }
}

// ---------------------------------------------------------------------------
// Certification

/// Dichotomic observable E_0 - E_1 of a two-outcome measurement.
inline Observable observable_of(const quantum::Povm& m) {
  if (m.outcomes() != 2) throw PreconditionError("observable_of: expected a two-outcome measurement");
  return Observable(m.effect(0) - m.effect(1));
}

/// Spectral norm of P {O0, O1} P, P the support projector of rho.
inline double anticommutator_on_support(const CMat& o0, const CMat& o1, const CMat& rho) {
  const CMat p = linalg::support_projector(rho);
  const CMat m = p * linalg::anticommutator(o0, o1) * p;
  return linalg::spectral_norm_hermitian(0.5 * (m + m.adjoint()));
}

inline CMat party_state(const NetworkScenario& s, std::size_t party) {
  const std::vector<std::size_t> dims = s.party_dims(), keep{party};
  return linalg::partial_trace(s.global_state(), dims, keep);
}

inline SelfTestReport certify_theorem(const NetworkScenario& s, double tol = kDefaultTol) {
  const auto p = quantum::network_behavior(s);
  SelfTestReport r = verify_reference_correlations(p, tol);
  const Observable a0 = observable_of(s.measurement(0, 0)), a1 = observable_of(s.measurement(0, 1));
  const Observable c0 = observable_of(s.measurement(2, 0)), c1 = observable_of(s.measurement(2, 1));
  r.anticommutator_a = anticommutator_on_support(a0.matrix(), a1.matrix(), party_state(s, 0));
  r.anticommutator_c = anticommutator_on_support(c0.matrix(), c1.matrix(), party_state(s, 2));
  const Extraction ex = extraction_channels(a0, a1, c0, c1);
  r.commuting_blocks_a = ex.alice.commuting_count();
  r.commuting_blocks_c = ex.charlie.commuting_count();
  std::array<double, 4> fid{}, ppt{};
  const std::vector<std::size_t> qubits{2, 2};
  for (std::size_t b = 0; b < 4; ++b) {
    try {
      const auto st = quantum::steered_state(s, b);
      const CMat out = ex.apply(st.state.matrix());
      fid[b] = linalg::fidelity_pure(out, extraction_target(b));
      ppt[b] = linalg::min_eigenvalue(linalg::partial_transpose(out, qubits, 1));
    } catch (const UndefinedConditionalError&) {
      fid[b] = 0.0;
      ppt[b] = 0.0;
    }
  }
  r.fidelities = fid;
  r.ppt_minima = ppt;
  return r;
}

inline nlohmann::json to_json(const SelfTestReport& r) {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = "selftest_report";
  doc["tolerance"] = r.tolerance;
  doc["bob_marginal"] = r.bob_marginal;
  doc["deviations"] = {{"bob_marginal", r.bob_marginal_deviation},
                       {"single_party", r.single_party_deviation},
                       {"correlators", r.correlator_deviation}};
  if (r.anticommutator_a) doc["anticommutator_norms"] = {{"alice", *r.anticommutator_a}, {"charlie", *r.anticommutator_c}};
  if (r.fidelities) doc["fidelities"] = *r.fidelities;
  if (r.ppt_minima) doc["ppt_minima"] = *r.ppt_minima;
  if (r.anticommutator_a) doc["commuting_blocks"] = {{"alice", r.commuting_blocks_a}, {"charlie", r.commuting_blocks_c}};
  doc["verdict"] = r.pass() ? "pass" : "fail";
  return doc;
}

// ---------------------------------------------------------------------------
// Block-level analysis of a scenario

struct BlockEntry {
  std::size_t outcome = 0;
  std::size_t alice_block = 0;
  std::size_t charlie_block = 0;
  double weight = 0.0;  // share of rho_b in this block pair
  double theta = 0.0;
  double phi = 0.0;
  double q = 0.0;
  Complex r = 0.0;
  double two_re_r = 0.0;
  BlockCase solution = BlockCase::kNone;
};

/// Splits each steered state into block pairs of the extraction frame and classifies them.
///
/// Outcomes 01 and 10 are read after rotating Charlie's qubit by U-tilde. In each block the
/// populated two-dimensional sector is {00, 11} when <ZZ> >= 0 and {01, 10} otherwise;
/// q is the population of its first vector and r the coherence between the two.
inline std::vector<BlockEntry> analyze_blocks(const NetworkScenario& s, double weight_floor = 1e-12) {
  const Observable a0 = observable_of(s.measurement(0, 0)), a1 = observable_of(s.measurement(0, 1));
  const Observable c0 = observable_of(s.measurement(2, 0)), c1 = observable_of(s.measurement(2, 1));
  const Extraction ex = extraction_channels(a0, a1, c0, c1);
  const std::size_t na = ex.alice.blocks(), nc = ex.charlie.blocks();
  const CMat rot = linalg::kron(CMat::identity(2), ex.u_tilde);
  using quantum::Axis;
  const CMat zz = linalg::kron(quantum::pauli_matrix(Axis::Z), quantum::pauli_matrix(Axis::Z));
  const CMat xx = linalg::kron(quantum::pauli_matrix(Axis::X), quantum::pauli_matrix(Axis::X));
  std::vector<BlockEntry> out;
  for (std::size_t b = 0; b < 4; ++b) {
    const auto st = quantum::steered_state(s, b);
    const CMat frame = ex.to_block_frame(st.state.matrix());
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t k = 0; k < nc; ++k) {
        CMat blk(4, 4);
        for (std::size_t u = 0; u < 4; ++u)
          for (std::size_t w = 0; w < 4; ++w) {
            const std::size_t ru = ((i * 2 + (u >> 1)) * nc + k) * 2 + (u & 1);
            const std::size_t rw = ((i * 2 + (w >> 1)) * nc + k) * 2 + (w & 1);
            blk(u, w) = frame(ru, rw);
          }
        const double weight = blk.trace().real();
        if (weight <= weight_floor) continue;
        blk *= 1.0 / weight;
        if (b == 1 || b == 2) blk = rot * blk * rot.adjoint();
        BlockEntry e;
        e.outcome = b;
        e.alice_block = i;
        e.charlie_block = k;
        e.weight = weight;
        e.theta = ex.alice.thetas[i];
        e.phi = ex.charlie.thetas[k];
        const bool even = linalg::overlap(blk, zz) >= 0.0;
        const std::size_t first = even ? 0 : 1, second = even ? 3 : 2;
        e.q = blk(first, first).real();
        e.r = blk(first, second);
        e.two_re_r = linalg::overlap(blk, xx);
        e.solution = classify_block_solution(e.theta, e.phi, e.two_re_r, b, 1e-7);
        out.push_back(e);
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commuting branch

/// Bell-local parent of a scenario whose outer observable pairs commute: Alice and Charlie
/// measure both observables jointly, outputting (o_0, o_1) as 2 o_0 + o_1.
inline NetworkBehavior commuting_parent(const NetworkScenario& s) {
  std::vector<std::vector<quantum::Povm>> meas = s.measurements();
  for (std::size_t party : {std::size_t{0}, std::size_t{2}}) {
    const auto& m0 = s.measurement(party, 0);
    const auto& m1 = s.measurement(party, 1);
    std::vector<CMat> joint;
    for (std::size_t o0 = 0; o0 < 2; ++o0)
      for (std::size_t o1 = 0; o1 < 2; ++o1) {
        const CMat& e0 = m0.effect(o0);
        const CMat& e1 = m1.effect(o1);
        if (linalg::commutator(e0, e1).max_abs() > 1e-10) {
          throw InapplicableError("commuting_parent: measurements of party '" + s.parties()[party].name +
                                  "' do not commute");
        }
        CMat e = e0 * e1;
        joint.push_back(0.5 * (e + e.adjoint()));
      }
    meas[party] = {quantum::Povm(std::move(joint))};
  }
  std::vector<PartyShape> parties = s.parties();
  parties[0] = {parties[0].name, 1, 4};
  parties[2] = {parties[2].name, 1, 4};
  return quantum::network_behavior(NetworkScenario(parties, s.sources(), std::move(meas)));
}

struct CommutingDemo {
  NetworkBehavior behavior;
  classical::BilocalModel model;
  double roundtrip_error = 0.0;
  classical::BilocalityScore score;
  std::vector<BlockEntry> blocks;
};

/// Behavior of a family with every block at theta = phi = pi, and its explicit bilocal model.
inline CommutingDemo commuting_family_demo(const JordanFamily& f) {
  for (double t : f.thetas)
    if (std::abs(t - std::numbers::pi) > 1e-12) throw PreconditionError("commuting_family_demo: every theta must be pi");
  for (double t : f.phis)
    if (std::abs(t - std::numbers::pi) > 1e-12) throw PreconditionError("commuting_family_demo: every phi must be pi");
  const auto s = jordan_scenario(f);
  CommutingDemo d;
  d.behavior = quantum::network_behavior(s);
  d.model = classical::bilocal_model_from_parent(commuting_parent(s), d.behavior.parties());
  d.roundtrip_error = classical::evaluate_bilocal_model(d.model).max_abs_diff(d.behavior);
  d.score = classical::bilocality_score(d.behavior);
  d.blocks = analyze_blocks(s);
  return d;
}

}  // namespace netnl::selftest
