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

// Quantum network scenarios and the behaviors they produce.
//
// A scenario is a list of parties and a list of sources. Each source emits a
// state on the tensor product of one subsystem per endpoint party. A party's
// local Hilbert space is the product of the subsystems it receives, taken in
// source order. For the bilocality network this gives the global layout
// (A, B1, B2, C).

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "netnl/behaviors.hpp"
#include "netnl/errors.hpp"
#include "netnl/linalg.hpp"

namespace netnl::quantum {

using linalg::CMat;
using linalg::Complex;

inline constexpr double kDichotomicTol = 1e-9;

class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(CMat m) : m_(std::move(m)) {
    if (!m_.is_square() || m_.rows() == 0) throw PreconditionError("density matrix must be square and nonempty");
    if (!m_.all_finite()) throw PreconditionError("density matrix has non-finite entries");
    if (!linalg::is_hermitian(m_, linalg::kStructuralTol)) throw PreconditionError("density matrix is not Hermitian");
    if (std::abs(m_.trace() - Complex(1.0)) > linalg::kStructuralTol) {
      throw PreconditionError("density matrix does not have unit trace");
    }
    if (linalg::min_eigenvalue(m_) < -linalg::kStructuralTol) {
      throw PreconditionError("density matrix is not positive semidefinite");
    }
  }
  static DensityMatrix pure(const CMat& psi) { return DensityMatrix(linalg::projector(psi)); }

  std::size_t dim() const { return m_.rows(); }
  const CMat& matrix() const { return m_; }

 private:
  CMat m_;
};

class Povm {
 public:
  Povm() = default;
  explicit Povm(std::vector<CMat> effects) : effects_(std::move(effects)) {
    if (effects_.empty()) throw PreconditionError("POVM needs at least one effect");
    const std::size_t d = effects_.front().rows();
    CMat sum(d, d);
    for (const auto& e : effects_) {
      if (!e.is_square() || e.rows() != d) throw DimensionError("POVM effects differ in dimension");
      if (!linalg::is_hermitian(e) || linalg::min_eigenvalue(e) < -linalg::kStructuralTol) {
        throw PreconditionError("POVM effect is not positive semidefinite");
      }
      sum += e;
    }
    if (linalg::max_norm_diff(sum, CMat::identity(d)) > linalg::kStructuralTol) {
      throw PreconditionError("POVM effects do not sum to the identity");
    }
  }

  std::size_t outcomes() const { return effects_.size(); }
  std::size_t dim() const { return effects_.front().rows(); }
  const CMat& effect(std::size_t k) const { return effects_.at(k); }
  const std::vector<CMat>& effects() const { return effects_; }

 private:
  std::vector<CMat> effects_;
};

/// Hermitian operator with spectrum in {-1, +1}.
class Observable {
 public:
  Observable() = default;
  explicit Observable(CMat m) : m_(std::move(m)) {
    if (!linalg::is_hermitian(m_)) throw PreconditionError("observable is not Hermitian");
    if (linalg::max_norm_diff(m_ * m_, CMat::identity(m_.rows())) > kDichotomicTol) {
      throw PreconditionError("observable is not dichotomic (O^2 != I)");
    }
  }
  std::size_t dim() const { return m_.rows(); }
  const CMat& matrix() const { return m_; }

 private:
  CMat m_;
};

enum class Axis { X, Y, Z };

inline CMat pauli_matrix(Axis axis) {
  switch (axis) {
    case Axis::X:
      return CMat{{0.0, 1.0}, {1.0, 0.0}};
    case Axis::Y:
      return CMat{{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}};
    case Axis::Z:
      break;
  }
  return CMat{{1.0, 0.0}, {0.0, -1.0}};
}

inline Observable pauli(Axis axis) { return Observable(pauli_matrix(axis)); }

/// Bell basis: (0,0) -> Phi+, (0,1) -> Psi+, (1,0) -> Phi-, (1,1) -> Psi-.
inline CMat bell_state(unsigned b1, unsigned b2) {
  const double h = std::numbers::sqrt2 / 2.0;
  const double sign = b1 ? -1.0 : 1.0;
  if (!b2) return CMat::column({h, 0.0, 0.0, sign * h});
  return CMat::column({0.0, h, sign * h, 0.0});
}

/// Bell state for the two-bit outcome label b = 2*b1 + b2.
inline CMat bell_state(std::size_t b) { return bell_state(static_cast<unsigned>(b >> 1 & 1), static_cast<unsigned>(b & 1)); }

inline Povm bsm_povm() {
  std::vector<CMat> effects;
  for (std::size_t b = 0; b < 4; ++b) effects.push_back(linalg::projector(bell_state(b)));
  return Povm(std::move(effects));
}

/// Effects (I + O)/2 for outcome 0 and (I - O)/2 for outcome 1.
inline Povm observable_to_povm(const Observable& o) {
  const CMat id = CMat::identity(o.dim());
  return Povm({0.5 * (id + o.matrix()), 0.5 * (id - o.matrix())});
}

inline Povm computational_povm(std::size_t dim) {
  std::vector<CMat> effects;
  for (std::size_t k = 0; k < dim; ++k) {
    CMat e(dim, dim);
    e(k, k) = 1.0;
    effects.push_back(std::move(e));
  }
  return Povm(std::move(effects));
}

struct Source {
  std::string name;
  std::vector<std::size_t> parties;  // endpoint parties
  std::vector<std::size_t> dims;     // subsystem dimension per endpoint
  DensityMatrix state;               // on the product of the subsystems, in endpoint order
};

class NetworkScenario {
 public:
  struct Slot {
    std::size_t source;
    std::size_t endpoint;
  };

  NetworkScenario() = default;
  NetworkScenario(std::vector<PartyShape> parties, std::vector<Source> sources, std::vector<std::vector<Povm>> measurements)
      : parties_(std::move(parties)), sources_(std::move(sources)), measurements_(std::move(measurements)) {
    if (measurements_.size() != parties_.size()) throw DimensionError("scenario: one measurement list per party required");
    slots_.assign(parties_.size(), {});
    for (std::size_t s = 0; s < sources_.size(); ++s) {
      const auto& src = sources_[s];
      if (src.parties.size() != src.dims.size()) throw DimensionError("scenario: source endpoint/dimension mismatch");
      if (linalg::product(src.dims) != src.state.dim()) {
        throw DimensionError("scenario: source '" + src.name + "' state dimension does not match its subsystems");
      }
      for (std::size_t e = 0; e < src.parties.size(); ++e) {
        if (src.parties[e] >= parties_.size()) throw DimensionError("scenario: source endpoint out of range");
        slots_[src.parties[e]].push_back({s, e});
      }
    }
    for (std::size_t p = 0; p < parties_.size(); ++p) {
      const auto& povms = measurements_[p];
      if (povms.size() != parties_[p].inputs) {
        throw DimensionError("scenario: party '" + parties_[p].name + "' needs one POVM per input");
      }
      for (const auto& m : povms) {
        if (m.dim() != party_dim(p)) {
          throw DimensionError("scenario: POVM of party '" + parties_[p].name + "' has the wrong dimension");
        }
        if (m.outcomes() != parties_[p].outputs) {
          throw DimensionError("scenario: POVM of party '" + parties_[p].name + "' has the wrong outcome count");
        }
      }
    }
  }

  const std::vector<PartyShape>& parties() const { return parties_; }
  const std::vector<Source>& sources() const { return sources_; }
  const Povm& measurement(std::size_t party, std::size_t input) const { return measurements_.at(party).at(input); }
  const std::vector<std::vector<Povm>>& measurements() const { return measurements_; }
  const std::vector<Slot>& slots(std::size_t party) const { return slots_.at(party); }

  std::size_t party_dim(std::size_t party) const {
    std::size_t d = 1;
    for (const auto& slot : slots_.at(party)) d *= sources_[slot.source].dims[slot.endpoint];
    return d;
  }
  std::vector<std::size_t> party_dims() const {
    std::vector<std::size_t> d;
    for (std::size_t p = 0; p < parties_.size(); ++p) d.push_back(party_dim(p));
    return d;
  }

  /// Product of all source states, reordered so each party's subsystems are contiguous.
  CMat global_state() const {
    std::vector<std::size_t> dims;
    std::vector<std::size_t> flat_offset;  // first flat subsystem of each source
    CMat state = CMat::identity(1);
    for (const auto& src : sources_) {
      flat_offset.push_back(dims.size());
      dims.insert(dims.end(), src.dims.begin(), src.dims.end());
      state = linalg::kron(state, src.state.matrix(), kGlobalCap);
    }
    std::vector<std::size_t> perm;
    for (std::size_t p = 0; p < parties_.size(); ++p)
      for (const auto& slot : slots_[p]) perm.push_back(flat_offset[slot.source] + slot.endpoint);
    if (perm.size() != dims.size()) throw DimensionError("scenario: every subsystem must belong to a party");
    return linalg::permute_subsystems(state, dims, perm);
  }

  static constexpr std::size_t kGlobalCap = std::size_t{1} << 24;

 private:
  std::vector<PartyShape> parties_;
  std::vector<Source> sources_;
  std::vector<std::vector<Povm>> measurements_;
  std::vector<std::vector<Slot>> slots_;
};

namespace detail {

/// Tr[(E_0 (x) E_1 (x) ...) rho] without forming the product operator.
inline double expectation_of_product(const CMat& rho, const std::vector<std::size_t>& dims,
                                     const std::vector<const CMat*>& effects) {
  const std::size_t n = dims.size();
  const std::size_t d = rho.rows();
  std::vector<std::size_t> strides(n, 1);
  for (std::size_t k = n; k-- > 1;) strides[k - 1] = strides[k] * dims[k];
  Complex total = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const Complex r = rho(j, i);
      if (r == Complex(0.0)) continue;
      Complex f = 1.0;
      for (std::size_t k = 0; k < n && f != Complex(0.0); ++k) {
        const std::size_t ik = (i / strides[k]) % dims[k], jk = (j / strides[k]) % dims[k];
        f *= (*effects[k])(ik, jk);
      }
      total += f * r;
    }
  return total.real();
}

/// Tr_k[(I (x) E_k (x) I) rho] on the remaining subsystems, in order.
inline CMat apply_and_trace(const CMat& rho, const std::vector<std::size_t>& dims, std::size_t k, const CMat& effect) {
  const std::size_t n = dims.size();
  std::vector<std::size_t> strides(n, 1);
  for (std::size_t q = n; q-- > 1;) strides[q - 1] = strides[q] * dims[q];
  const std::size_t dk = dims[k];
  const std::size_t d_out = rho.rows() / dk;
  // Flat index in the full space for a remaining-space index with digit k set to v.
  auto lift = [&](std::size_t r, std::size_t v) {
    std::size_t full = 0, rem = r;
    for (std::size_t q = n; q-- > 0;) {
      std::size_t digit;
      if (q == k) {
        digit = v;
      } else {
        digit = rem % dims[q];
        rem /= dims[q];
      }
      full += digit * strides[q];
    }
    return full;
  };
  CMat out(d_out, d_out);
  for (std::size_t i = 0; i < d_out; ++i)
    for (std::size_t j = 0; j < d_out; ++j) {
      Complex s = 0.0;
      for (std::size_t beta = 0; beta < dk; ++beta)
        for (std::size_t beta2 = 0; beta2 < dk; ++beta2) {
          const Complex e = effect(beta, beta2);
          if (e == Complex(0.0)) continue;
          s += e * rho(lift(i, beta2), lift(j, beta));
        }
      out(i, j) = s;
    }
  return out;
}

}  // namespace detail

/// p(outputs | inputs) = Tr[(M_{a|x} (x) M_{b|y} (x) ...) (rho_1 (x) rho_2 ...)].
inline NetworkBehavior network_behavior(const NetworkScenario& s) {
  const CMat rho = s.global_state();
  const auto dims = s.party_dims();
  auto out = NetworkBehavior::zeros(s.parties());
  std::vector<double> p(out.data().size(), 0.0);
  const auto& in_radix = out.input_radix();
  const auto& out_radix = out.output_radix();
  std::vector<const CMat*> effects(dims.size());
  for (std::size_t xi = 0; xi < in_radix.size(); ++xi) {
    const auto x = in_radix.decode(xi);
    for (std::size_t oi = 0; oi < out_radix.size(); ++oi) {
      const auto o = out_radix.decode(oi);
      for (std::size_t k = 0; k < dims.size(); ++k) effects[k] = &s.measurement(k, x[k]).effect(o[k]);
      // Clamp float noise below zero; validation still guards real violations.
      p[xi * out_radix.size() + oi] = std::max(0.0, detail::expectation_of_product(rho, dims, effects));
    }
  }
  return NetworkBehavior(s.parties(), std::move(p));
}

struct SteeredState {
  double probability;
  DensityMatrix state;  // on the remaining parties, in party order
};

/// p(b|y) and the normalized state of the other parties after `party` obtains outcome b.
inline SteeredState steered_state(const NetworkScenario& s, std::size_t b, std::size_t y = 0, std::size_t party = 1) {
  const auto& povm = s.measurement(party, y);
  if (b >= povm.outcomes()) throw ContractError("steered_state: outcome out of range");
  const CMat unnorm = detail::apply_and_trace(s.global_state(), s.party_dims(), party, povm.effect(b));
  const double prob = unnorm.trace().real();
  if (prob <= kZeroWeight) {
    throw UndefinedConditionalError("steered_state: outcome " + std::to_string(b) + " has zero probability");
  }
  CMat rho = unnorm * (1.0 / prob);
  // Remove float asymmetry before validation.
  rho = 0.5 * (rho + rho.adjoint());
  return {prob, DensityMatrix(std::move(rho))};
}

/// Reduced state of one endpoint of a source.
inline CMat source_marginal(const NetworkScenario& s, std::size_t source, std::size_t endpoint) {
  const auto& src = s.sources().at(source);
  const std::size_t keep[] = {endpoint};
  return linalg::partial_trace(src.state.matrix(), src.dims, keep);
}

/// Sum over b of p(b) rho_b for the conditioning party (index 1), input y.
inline CMat steered_mixture(const NetworkScenario& s, std::size_t y = 0) {
  const auto& povm = s.measurement(1, y);
  CMat acc;
  for (std::size_t b = 0; b < povm.outcomes(); ++b) {
    const CMat term = detail::apply_and_trace(s.global_state(), s.party_dims(), 1, povm.effect(b));
    acc = b == 0 ? term : acc + term;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Bilocality scenarios

/// Parties A, B, C; source S_AB emits rho_ab on (A, B1), S_BC emits rho_bc on (B2, C).
inline NetworkScenario bilocality_scenario(DensityMatrix rho_ab, std::size_t dim_a, std::size_t dim_b1,
                                           DensityMatrix rho_bc, std::size_t dim_b2, std::size_t dim_c,
                                           std::vector<Povm> alice, std::vector<Povm> bob, std::vector<Povm> charlie) {
  std::vector<PartyShape> parties{{"A", alice.size(), alice.front().outcomes()},
                                  {"B", bob.size(), bob.front().outcomes()},
                                  {"C", charlie.size(), charlie.front().outcomes()}};
  std::vector<Source> sources{{"S_AB", {0, 1}, {dim_a, dim_b1}, std::move(rho_ab)},
                              {"S_BC", {1, 2}, {dim_b2, dim_c}, std::move(rho_bc)}};
  return NetworkScenario(std::move(parties), std::move(sources), {std::move(alice), std::move(bob), std::move(charlie)});
}

inline std::vector<Povm> povms_of(const std::vector<Observable>& obs) {
  std::vector<Povm> out;
  for (const auto& o : obs) out.push_back(observable_to_povm(o));
  return out;
}

/// Observables (sigma_x + sigma_z)/sqrt2 and (sigma_x - sigma_z)/sqrt2 used by Alice and Charlie.
inline std::vector<Observable> reference_observables() {
  const double h = std::numbers::sqrt2 / 2.0;
  const CMat x = pauli_matrix(Axis::X), z = pauli_matrix(Axis::Z);
  return {Observable(h * (x + z)), Observable(h * (x - z))};
}

/// Both sources emit Phi+, A and C measure the reference observables, B performs the BSM.
inline NetworkScenario reference_experiment() {
  const auto phi = DensityMatrix::pure(bell_state(0, 0));
  return bilocality_scenario(phi, 2, 2, phi, 2, 2, povms_of(reference_observables()), {bsm_povm()},
                             povms_of(reference_observables()));
}

/// Entanglement swapping with CHSH-optimal A: sigma_z, sigma_x and C: (sigma_z +- sigma_x)/sqrt2.
inline NetworkScenario swap_event_ready_experiment() {
  const double h = std::numbers::sqrt2 / 2.0;
  const CMat x = pauli_matrix(Axis::X), z = pauli_matrix(Axis::Z);
  const auto phi = DensityMatrix::pure(bell_state(0, 0));
  return bilocality_scenario(phi, 2, 2, phi, 2, 2, povms_of({Observable(z), Observable(x)}), {bsm_povm()},
                             povms_of({Observable(h * (z + x)), Observable(h * (z - x))}));
}

// ---------------------------------------------------------------------------
// Random generators (deterministic under the engine's seed)

/// Density matrix of a Ginibre-random operator G G^dagger / Tr(G G^dagger).
inline DensityMatrix random_density_matrix(std::mt19937_64& rng, std::size_t dim, std::size_t rank = 0) {
  if (rank == 0) rank = dim;
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat g(dim, rank);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < rank; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  CMat rho = g * g.adjoint();
  rho *= 1.0 / rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(std::move(rho));
}

/// Qubit observable n . sigma for a uniformly random Bloch direction n.
inline Observable random_qubit_observable(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double v[3];
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& c : v) {
      c = gauss(rng);
      norm += c * c;
    }
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  CMat o = (v[0] / norm) * pauli_matrix(Axis::X) + (v[1] / norm) * pauli_matrix(Axis::Y) +
           (v[2] / norm) * pauli_matrix(Axis::Z);
  return Observable(std::move(o));
}

}  // namespace netnl::quantum
