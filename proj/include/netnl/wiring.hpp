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

// Quantum boxes, classical shares and local wiring programs.
//
// A wired scenario has sources with two endpoint parties. Each source distributes a
// classical share value to both endpoints together with a list of bipartite boxes
// (the list may depend on the share). A party consumes its box terminals one at a time;
// which terminal comes next, and its input, are table functions of everything the party
// has seen so far. The behavior is computed exactly by summing over shares and all
// joint box outcomes.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "netnl/behaviors.hpp"
#include "netnl/classical.hpp"
#include "netnl/errors.hpp"
#include "netnl/linalg.hpp"
#include "netnl/quantum.hpp"

namespace netnl::wiring {

using linalg::CMat;
using quantum::DensityMatrix;
using quantum::Povm;

inline constexpr std::size_t kDefaultAssignmentCap = 1000000;

// ---------------------------------------------------------------------------
// Boxes

struct BoxRealization {
  DensityMatrix state;
  std::vector<Povm> left;
  std::vector<Povm> right;
};

/// Bipartite conditional table p(alpha, beta | X, Y).
class QuantumBox {
 public:
  QuantumBox() = default;
  QuantumBox(std::size_t in_left, std::size_t in_right, std::size_t out_left, std::size_t out_right,
             std::vector<double> table, std::optional<BoxRealization> realization = std::nullopt)
      : nx_(in_left), ny_(in_right), na_(out_left), nb_(out_right), table_(std::move(table)),
        realization_(std::move(realization)) {
    validate();
  }

  std::size_t inputs(std::size_t side) const { return side == 0 ? nx_ : ny_; }
  std::size_t outputs(std::size_t side) const { return side == 0 ? na_ : nb_; }
  const std::vector<double>& table() const { return table_; }
  const std::optional<BoxRealization>& realization() const { return realization_; }

  double operator()(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
    return table_[((x * ny_ + y) * na_ + a) * nb_ + b];
  }

  bool same_alphabets(const QuantumBox& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && na_ == o.na_ && nb_ == o.nb_;
  }

  /// The table as a two-party behavior (left party first).
  NetworkBehavior as_behavior() const {
    return NetworkBehavior({{"L", nx_, na_}, {"R", ny_, nb_}}, table_);
  }

 private:
  void validate() const {
    if (nx_ == 0 || ny_ == 0 || na_ == 0 || nb_ == 0) throw ValidationError("box: empty alphabet");
    if (table_.size() != nx_ * ny_ * na_ * nb_) throw ValidationError("box: table size does not match its alphabets");
    // Range, normalization and no-signaling are the behavior invariants.
    (void)as_behavior();
  }

  std::size_t nx_ = 1, ny_ = 1, na_ = 1, nb_ = 1;
  std::vector<double> table_{1.0};
  std::optional<BoxRealization> realization_;
};

/// p(alpha, beta | X, Y) = Tr[(N_{alpha|X} (x) N_{beta|Y}) sigma].
inline QuantumBox quantum_box(const DensityMatrix& sigma, std::vector<Povm> left, std::vector<Povm> right) {
  if (left.empty() || right.empty()) throw DimensionError("quantum_box: each side needs at least one POVM");
  const std::size_t dl = left.front().dim(), dr = right.front().dim();
  const std::size_t na = left.front().outcomes(), nb = right.front().outcomes();
  for (const auto& m : left)
    if (m.dim() != dl || m.outcomes() != na) throw DimensionError("quantum_box: left POVMs differ in shape");
  for (const auto& m : right)
    if (m.dim() != dr || m.outcomes() != nb) throw DimensionError("quantum_box: right POVMs differ in shape");
  if (dl * dr != sigma.dim()) throw DimensionError("quantum_box: state dimension does not match the POVMs");
  const std::vector<std::size_t> dims{dl, dr};
  std::vector<double> t;
  t.reserve(left.size() * right.size() * na * nb);
  for (std::size_t x = 0; x < left.size(); ++x)
    for (std::size_t y = 0; y < right.size(); ++y)
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < nb; ++b) {
          const double v = quantum::detail::expectation_of_product(sigma.matrix(), dims,
                                                                   {&left[x].effect(a), &right[y].effect(b)});
          t.push_back(std::clamp(v, 0.0, 1.0));
        }
  const std::size_t nx = left.size(), ny = right.size();
  return QuantumBox(nx, ny, na, nb, std::move(t), BoxRealization{sigma, std::move(left), std::move(right)});
}

/// Deterministic local box alpha = f(X), beta = g(Y).
inline QuantumBox deterministic_box(const std::vector<std::size_t>& f, const std::vector<std::size_t>& g,
                                    std::size_t na, std::size_t nb) {
  std::vector<double> t(f.size() * g.size() * na * nb, 0.0);
  for (std::size_t x = 0; x < f.size(); ++x)
    for (std::size_t y = 0; y < g.size(); ++y) t[((x * g.size() + y) * na + f[x]) * nb + g[y]] = 1.0;
  return QuantumBox(f.size(), g.size(), na, nb, std::move(t));
}

/// Phi+ with sigma_z, sigma_x on the left and (sigma_z +- sigma_x)/sqrt2 on the right.
inline QuantumBox tsirelson_box() {
  using quantum::Axis;
  using quantum::Observable;
  const double h = std::numbers::sqrt2 / 2.0;
  const CMat x = quantum::pauli_matrix(Axis::X), z = quantum::pauli_matrix(Axis::Z);
  return quantum_box(DensityMatrix::pure(quantum::bell_state(0, 0)),
                     quantum::povms_of({Observable(z), Observable(x)}),
                     quantum::povms_of({Observable(h * (z + x)), Observable(h * (z - x))}));
}

// ---------------------------------------------------------------------------
// Sources, terminals, programs

struct SourceResource {
  std::string name;
  std::array<std::size_t, 2> endpoints{};  // party indices; endpoint 0 holds the left side of every box
  std::vector<double> shares{1.0};         // p(share value)
  // boxes[s][i]: box i when the share equals s. A single row means the boxes ignore the share.
  std::vector<std::vector<QuantumBox>> boxes{{}};

  std::size_t box_count() const { return boxes.front().size(); }
  const QuantumBox& box(std::size_t share, std::size_t i) const {
    return boxes.size() == 1 ? boxes.front()[i] : boxes[share][i];
  }
};

/// One party's end of one box.
struct Terminal {
  std::size_t source = 0;
  std::size_t box = 0;
  std::size_t side = 0;  // 0 = left endpoint, 1 = right endpoint
};

struct StepChoice {
  std::size_t terminal = 0;  // index into the party's terminal list
  std::size_t input = 0;
};

/// Table-driven local program.
///
/// The history before step k is the digit string (party input, visible share values in
/// source order, outputs of steps 0..k-1), encoded mixed-radix with the first digit most
/// significant. Step outputs use a common radix, the largest terminal output alphabet of
/// the party. steps[k][history] picks the terminal and its input; output[history] after
/// the last step gives the party's output.
struct WiringProgram {
  std::vector<std::vector<StepChoice>> steps;
  std::vector<std::size_t> output;
};

class WiredScenario {
 public:
  WiredScenario() = default;
  WiredScenario(std::vector<PartyShape> parties, std::vector<SourceResource> sources, std::vector<WiringProgram> programs)
      : parties_(std::move(parties)), sources_(std::move(sources)), programs_(std::move(programs)) {
    index();
    validate();
  }

  const std::vector<PartyShape>& parties() const { return parties_; }
  const std::vector<SourceResource>& sources() const { return sources_; }
  const std::vector<WiringProgram>& programs() const { return programs_; }

  /// Terminals delivered to a party, in source order then box order.
  const std::vector<Terminal>& terminals(std::size_t party) const { return terminals_.at(party); }
  /// Sources incident to a party, in source order.
  const std::vector<std::size_t>& visible_sources(std::size_t party) const { return visible_.at(party); }

  std::size_t terminal_inputs(const Terminal& t) const { return sources_[t.source].box(0, t.box).inputs(t.side); }
  std::size_t terminal_outputs(const Terminal& t) const { return sources_[t.source].box(0, t.box).outputs(t.side); }

  /// Common radix of step-output digits for a party.
  std::size_t output_radix(std::size_t party) const {
    std::size_t r = 1;
    for (const auto& t : terminals_[party]) r = std::max(r, terminal_outputs(t));
    return r;
  }

  /// Radices of the history digits before step k.
  std::vector<std::size_t> history_radices(std::size_t party, std::size_t k) const {
    std::vector<std::size_t> r{parties_[party].inputs};
    for (std::size_t s : visible_[party]) r.push_back(sources_[s].shares.size());
    for (std::size_t i = 0; i < k; ++i) r.push_back(output_radix(party));
    return r;
  }

 private:
  void index() {
    if (programs_.size() != parties_.size()) throw ProgramError("wired scenario: one program per party required");
    terminals_.assign(parties_.size(), {});
    visible_.assign(parties_.size(), {});
    for (std::size_t s = 0; s < sources_.size(); ++s) {
      const auto& src = sources_[s];
      const std::string where = "source '" + src.name + "'";
      for (std::size_t e = 0; e < 2; ++e)
        if (src.endpoints[e] >= parties_.size()) throw ValidationError(where + ": endpoint out of range");
      if (src.endpoints[0] == src.endpoints[1]) throw ValidationError(where + ": endpoints must differ");
      if (src.shares.empty()) throw ValidationError(where + ": empty share distribution");
      double total = 0.0;
      for (double w : src.shares) {
        if (!(w >= -kProbabilityTol)) throw ValidationError(where + ": negative share probability");
        total += w;
      }
      if (std::abs(total - 1.0) > kNormalizationTol) throw ValidationError(where + ": shares do not sum to 1");
      if (src.boxes.empty() || (src.boxes.size() != 1 && src.boxes.size() != src.shares.size())) {
        throw ValidationError(where + ": need one box list, or one per share value");
      }
      for (const auto& row : src.boxes) {
        if (row.size() != src.box_count()) throw ValidationError(where + ": box count depends on the share");
        for (std::size_t i = 0; i < row.size(); ++i)
          if (!row[i].same_alphabets(src.boxes.front()[i])) {
            throw ValidationError(where + ": box " + std::to_string(i) + " alphabets depend on the share");
          }
      }
      for (std::size_t e = 0; e < 2; ++e) {
        visible_[src.endpoints[e]].push_back(s);
        for (std::size_t i = 0; i < src.box_count(); ++i) terminals_[src.endpoints[e]].push_back({s, i, e});
      }
    }
  }

  void validate() const {
    for (std::size_t p = 0; p < parties_.size(); ++p) validate_program(p);
  }

  [[noreturn]] void program_error(std::size_t party, std::size_t step, const std::string& what) const {
    std::ostringstream msg;
    msg << "program of party '" << parties_[party].name << "' step " << step << ": " << what;
    throw ProgramError(msg.str());
  }

  void validate_program(std::size_t party) const {
    const auto& prog = programs_[party];
    const std::size_t n_steps = prog.steps.size();
    if (n_steps > terminals_[party].size()) {
      program_error(party, n_steps, "more steps than terminals (" + std::to_string(terminals_[party].size()) + ")");
    }
    for (std::size_t k = 0; k <= n_steps; ++k) {
      const std::size_t want = MixedRadix(history_radices(party, k)).size();
      const std::size_t have = k < n_steps ? prog.steps[k].size() : prog.output.size();
      if (have != want) {
        program_error(party, k,
                      (k < n_steps ? std::string("step table") : std::string("output table")) + " has " +
                          std::to_string(have) + " entries; the history space has " + std::to_string(want));
      }
    }
    // Walk every reachable history.
    std::vector<bool> used(terminals_[party].size(), false);
    const MixedRadix head_radix(history_radices(party, 0));
    for (std::size_t h = 0; h < head_radix.size(); ++h) {
      auto digits = head_radix.decode(h);
      walk(party, 0, digits, used);
    }
  }

  void walk(std::size_t party, std::size_t k, std::vector<std::size_t>& digits, std::vector<bool>& used) const {
    const auto& prog = programs_[party];
    const MixedRadix radix(history_radices(party, k));
    const std::size_t key = radix.encode(digits);
    if (k == prog.steps.size()) {
      if (prog.output[key] >= parties_[party].outputs) {
        program_error(party, k, "output " + std::to_string(prog.output[key]) + " out of range on history " +
                                    tuple_string(digits));
      }
      return;
    }
    const StepChoice c = prog.steps[k][key];
    if (c.terminal >= terminals_[party].size()) {
      program_error(party, k, "terminal " + std::to_string(c.terminal) + " does not exist (history " +
                                  tuple_string(digits) + ")");
    }
    if (used[c.terminal]) {
      program_error(party, k, "terminal " + std::to_string(c.terminal) + " reused on history " + tuple_string(digits));
    }
    const Terminal& t = terminals_[party][c.terminal];
    if (c.input >= terminal_inputs(t)) {
      program_error(party, k, "input " + std::to_string(c.input) + " out of range for terminal " +
                                  std::to_string(c.terminal) + " (history " + tuple_string(digits) + ")");
    }
    used[c.terminal] = true;
    for (std::size_t o = 0; o < terminal_outputs(t); ++o) {
      digits.push_back(o);
      walk(party, k + 1, digits, used);
      digits.pop_back();
    }
    used[c.terminal] = false;
  }

  std::vector<PartyShape> parties_;
  std::vector<SourceResource> sources_;
  std::vector<WiringProgram> programs_;
  std::vector<std::vector<Terminal>> terminals_;
  std::vector<std::vector<std::size_t>> visible_;
};

// ---------------------------------------------------------------------------
// Exact evaluation

/// Sum over share tuples and joint box outcomes of the product of share and box probabilities.
inline NetworkBehavior evaluate_wired(const WiredScenario& w, std::size_t assignment_cap = kDefaultAssignmentCap) {
  const auto& parties = w.parties();
  const auto& sources = w.sources();
  const std::size_t n = parties.size();

  // Flatten boxes: global id of box i in source s is box_offset[s] + i.
  std::vector<std::size_t> box_offset;
  std::vector<std::size_t> outcome_radices;  // per global box, alpha * n_beta + beta
  for (const auto& src : sources) {
    box_offset.push_back(outcome_radices.size());
    for (std::size_t i = 0; i < src.box_count(); ++i) {
      const auto& b = src.box(0, i);
      outcome_radices.push_back(b.outputs(0) * b.outputs(1));
    }
  }
  double count = 1.0;
  for (std::size_t r : outcome_radices) count *= static_cast<double>(r);
  if (count > static_cast<double>(assignment_cap)) {
    std::ostringstream msg;
    msg << "evaluate_wired: " << count << " joint box-outcome assignments exceed the cap of " << assignment_cap;
    throw CapacityError(msg.str());
  }
  const MixedRadix outcome_space(outcome_radices);
  std::vector<std::size_t> share_sizes;
  for (const auto& src : sources) share_sizes.push_back(src.shares.size());
  const MixedRadix share_space(share_sizes);

  struct PartyPlan {
    std::vector<MixedRadix> radix;  // per step, then the output
  };
  std::vector<PartyPlan> plans(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t k = 0; k <= w.programs()[p].steps.size(); ++k) plans[p].radix.emplace_back(w.history_radices(p, k));

  auto out = NetworkBehavior::zeros(parties);
  std::vector<double> acc(out.data().size(), 0.0);
  const std::size_t n_boxes = outcome_radices.size();
  std::vector<std::size_t> box_in[2] = {std::vector<std::size_t>(n_boxes), std::vector<std::size_t>(n_boxes)};
  std::vector<std::size_t> outputs(n);
  std::vector<std::size_t> digits;

  for (std::size_t si = 0; si < share_space.size(); ++si) {
    const auto share = share_space.decode(si);
    double share_weight = 1.0;
    for (std::size_t s = 0; s < sources.size(); ++s) share_weight *= sources[s].shares[share[s]];
    if (share_weight == 0.0) continue;
    for (std::size_t xi = 0; xi < out.input_radix().size(); ++xi) {
      const auto x = out.input_radix().decode(xi);
      for (std::size_t ai = 0; ai < outcome_space.size(); ++ai) {
        const auto outcome = outcome_space.decode(ai);
        std::fill(box_in[0].begin(), box_in[0].end(), 0);
        std::fill(box_in[1].begin(), box_in[1].end(), 0);
        for (std::size_t p = 0; p < n; ++p) {
          const auto& prog = w.programs()[p];
          digits.assign(1, x[p]);
          for (std::size_t s : w.visible_sources(p)) digits.push_back(share[s]);
          for (std::size_t k = 0; k < prog.steps.size(); ++k) {
            const StepChoice c = prog.steps[k][plans[p].radix[k].encode(digits)];
            const Terminal& t = w.terminals(p)[c.terminal];
            const std::size_t g = box_offset[t.source] + t.box;
            box_in[t.side][g] = c.input;
            const std::size_t nb = sources[t.source].box(0, t.box).outputs(1);
            digits.push_back(t.side == 0 ? outcome[g] / nb : outcome[g] % nb);
          }
          outputs[p] = prog.output[plans[p].radix.back().encode(digits)];
        }
        double weight = share_weight;
        for (std::size_t s = 0; s < sources.size() && weight != 0.0; ++s)
          for (std::size_t i = 0; i < sources[s].box_count(); ++i) {
            const std::size_t g = box_offset[s] + i;
            const auto& b = sources[s].box(share[s], i);
            const std::size_t nb = b.outputs(1);
            weight *= b(box_in[0][g], box_in[1][g], outcome[g] / nb, outcome[g] % nb);
            if (weight == 0.0) break;
          }
        if (weight == 0.0) continue;
        acc[xi * out.output_radix().size() + out.output_radix().encode(outputs)] += weight;
      }
    }
  }
  return NetworkBehavior(parties, std::move(acc));
}

// ---------------------------------------------------------------------------
// Conditional-marginal locality witness

struct ConditionalVerdict {
  std::size_t input = 0;
  std::size_t outcome = 0;
  double weight = 0.0;
  bool local = false;
  std::optional<double> chsh;  // when the conditional behavior is 2-input / 2-output per party
  classical::LocalityCertificate certificate;
};

struct WitnessReport {
  std::size_t conditioning_party = 1;
  std::vector<ConditionalVerdict> conditionals;

  /// False certifies that the behavior has no wirable decomposition.
  bool all_local() const {
    return std::all_of(conditionals.begin(), conditionals.end(), [](const auto& c) { return c.local; });
  }
  double max_chsh() const {
    double m = 0.0;
    for (const auto& c : conditionals)
      if (c.chsh) m = std::max(m, *c.chsh);
    return m;
  }
};

/// Runs the Bell-locality LP on every p(others | inputs, y, b) with p(b|y) > 0.
inline WitnessReport conditional_locality_witness(const NetworkBehavior& p, std::size_t party = 1,
                                                  std::size_t strategy_cap = classical::kDefaultStrategyCap) {
  WitnessReport report;
  report.conditioning_party = party;
  for (std::size_t y = 0; y < p.party(party).inputs; ++y)
    for (std::size_t b = 0; b < p.party(party).outputs; ++b) {
      ConditionalBipartiteBehavior cond;
      try {
        cond = condition_on(p, party, y, b);
      } catch (const UndefinedConditionalError&) {
        continue;
      }
      ConditionalVerdict v;
      v.input = y;
      v.outcome = b;
      v.weight = cond.weight;
      v.certificate = classical::is_bell_local(cond.behavior, strategy_cap);
      v.local = v.certificate.feasible;
      const auto& q = cond.behavior;
      if (q.party_count() == 2 && q.party(0).inputs == 2 && q.party(0).outputs == 2 && q.party(1).inputs == 2 &&
          q.party(1).outputs == 2) {
        v.chsh = classical::chsh(q);
      }
      report.conditionals.push_back(std::move(v));
    }
  return report;
}

inline nlohmann::json to_json(const WitnessReport& r) {
  nlohmann::json doc;
  doc["conditioning_party"] = r.conditioning_party;
  doc["all_local"] = r.all_local();
  doc["conditionals"] = nlohmann::json::array();
  for (const auto& c : r.conditionals) {
    nlohmann::json e{{"input", c.input}, {"outcome", c.outcome}, {"weight", c.weight}, {"local", c.local}};
    if (c.chsh) e["chsh"] = *c.chsh;
    if (!c.local) e["witness_gap"] = c.certificate.witness_gap();
    doc["conditionals"].push_back(std::move(e));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Fritz triangle

/// Triangle A, B, C with sources S_AB, S_AC (perfectly correlated uniform bits) and S_BC (Phi+).
///
/// A outputs 2y + z where y, z are the bits from S_AB, S_AC. B reads y and measures
/// sigma_z (y = 0) or sigma_x (y = 1) on its qubit, outputting 2y + b; C reads z and
/// measures (sigma_z +- sigma_x)/sqrt2, outputting 2z + c.
inline quantum::NetworkScenario fritz_triangle() {
  using quantum::Axis;
  const double h = std::numbers::sqrt2 / 2.0;
  const CMat x = quantum::pauli_matrix(Axis::X), z = quantum::pauli_matrix(Axis::Z);
  CMat classical_bits(4, 4);
  classical_bits(0, 0) = 0.5;
  classical_bits(3, 3) = 0.5;
  const DensityMatrix shared(classical_bits);
  std::vector<quantum::Source> sources{{"S_AB", {0, 1}, {2, 2}, shared},
                                       {"S_AC", {0, 2}, {2, 2}, shared},
                                       {"S_BC", {1, 2}, {2, 2}, DensityMatrix::pure(quantum::bell_state(0, 0))}};
  auto controlled = [](const std::vector<CMat>& obs) {
    std::vector<CMat> effects;
    for (std::size_t bit = 0; bit < 2; ++bit) {
      CMat sel(2, 2);
      sel(bit, bit) = 1.0;
      const auto povm = quantum::observable_to_povm(quantum::Observable(obs[bit]));
      for (std::size_t o = 0; o < 2; ++o) effects.push_back(linalg::kron(sel, povm.effect(o)));
    }
    return Povm(std::move(effects));
  };
  std::vector<std::vector<Povm>> meas{{quantum::computational_povm(4)},
                                      {controlled({z, x})},
                                      {controlled({h * (z + x), h * (z - x)})}};
  return quantum::NetworkScenario({{"A", 1, 4}, {"B", 1, 4}, {"C", 1, 4}}, std::move(sources), std::move(meas));
}

inline NetworkBehavior fritz_behavior() { return quantum::network_behavior(fritz_triangle()); }

/// The same behavior from shares lambda = y, mu = z and one Tsirelson box on S_BC.
inline WiredScenario fritz_wiring() {
  SourceResource ab{"S_AB", {0, 1}, {0.5, 0.5}, {{}}};
  SourceResource ac{"S_AC", {0, 2}, {0.5, 0.5}, {{}}};
  SourceResource bc{"S_BC", {1, 2}, {1.0}, {{tsirelson_box()}}};
  // A: history (x, lambda, mu); no terminals.
  WiringProgram alice{{}, {0, 1, 2, 3}};
  // B: history (x, lambda, share_bc[, alpha]); feeds lambda to the box, outputs 2 lambda + alpha.
  WiringProgram bob{{{{0, 0}, {0, 1}}}, {0, 1, 2, 3}};
  WiringProgram charlie{{{{0, 0}, {0, 1}}}, {0, 1, 2, 3}};
  return WiredScenario({{"A", 1, 4}, {"B", 1, 4}, {"C", 1, 4}}, {ab, ac, bc}, {alice, bob, charlie});
}

/// p(b c | y z) read off a Fritz-shaped behavior: p(A = 2y+z, B = 2y+b, C = 2z+c) / p(A = 2y+z).
inline NetworkBehavior embedded_bc(const NetworkBehavior& p) {
  if (p.party_count() != 3 || !p.has_no_inputs())
    throw ContractError("embedded_bc: expected a three-party behavior without inputs");
  for (const auto& s : p.parties())
    if (s.outputs != 4) throw ContractError("embedded_bc: expected four outputs per party");
  std::vector<double> q(16, 0.0);
  for (std::size_t y = 0; y < 2; ++y)
    for (std::size_t z = 0; z < 2; ++z) {
      double pa = 0.0;
      for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t c = 0; c < 4; ++c) pa += p.at({0, 0, 0}, {2 * y + z, b, c});
      if (pa <= kZeroWeight) throw UndefinedConditionalError("embedded_bc: p(A) vanishes");
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t c = 0; c < 2; ++c)
          q[((y * 2 + z) * 2 + b) * 2 + c] = p.at({0, 0, 0}, {2 * y + z, 2 * y + b, 2 * z + c}) / pa;
    }
  return NetworkBehavior({{"B", 2, 2}, {"C", 2, 2}}, std::move(q));
}

// ---------------------------------------------------------------------------
// Random wired scenarios

struct RandomLimits {
  std::size_t max_boxes_per_source = 2;
  std::size_t max_share_support = 4;
};

namespace detail {

inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> v(n);
  double total = 0.0;
  for (double& e : v) total += (e = expo(rng));
  for (double& e : v) e /= total;
  return v;
}

inline QuantumBox random_qubit_box(std::mt19937_64& rng) {
  const auto sigma = quantum::random_density_matrix(rng, 4);
  std::vector<Povm> left, right;
  for (int k = 0; k < 2; ++k) left.push_back(quantum::observable_to_povm(quantum::random_qubit_observable(rng)));
  for (int k = 0; k < 2; ++k) right.push_back(quantum::observable_to_povm(quantum::random_qubit_observable(rng)));
  return quantum_box(sigma, std::move(left), std::move(right));
}

/// Fills reachable histories with random unused terminals and inputs.
inline void fill_program(std::mt19937_64& rng, const WiredScenario& shell, std::size_t party, std::size_t n_steps,
                         WiringProgram& prog, const std::vector<std::size_t>& term_in,
                         const std::vector<std::size_t>& term_out, std::size_t party_outputs) {
  std::vector<MixedRadix> radix;
  for (std::size_t k = 0; k <= n_steps; ++k) radix.emplace_back(shell.history_radices(party, k));
  prog.steps.assign(n_steps, {});
  for (std::size_t k = 0; k < n_steps; ++k) prog.steps[k].assign(radix[k].size(), StepChoice{});
  prog.output.assign(radix[n_steps].size(), 0);
  std::uniform_int_distribution<std::size_t> out_pick(0, party_outputs - 1);
  for (auto& o : prog.output) o = out_pick(rng);

  std::vector<bool> used(term_in.size(), false);
  std::vector<std::size_t> digits;
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == n_steps) return;
    std::vector<std::size_t> free;
    for (std::size_t t = 0; t < used.size(); ++t)
      if (!used[t]) free.push_back(t);
    const std::size_t t = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    const std::size_t in = std::uniform_int_distribution<std::size_t>(0, term_in[t] - 1)(rng);
    prog.steps[k][radix[k].encode(digits)] = {t, in};
    used[t] = true;
    for (std::size_t o = 0; o < term_out[t]; ++o) {
      digits.push_back(o);
      self(self, k + 1);
      digits.pop_back();
    }
    used[t] = false;
  };
  for (std::size_t h = 0; h < radix[0].size(); ++h) {
    digits = radix[0].decode(h);
    rec(rec, 0);
  }
}

}  // namespace detail

/// Random bilocality-network wiring: A (2 inputs, 2 outputs), B (2 inputs, 4 outputs),
/// C (2 inputs, 2 outputs); sources S_AB, S_BC with random shares, random qubit boxes
/// (possibly indexed by the share) and random adaptive programs. Deterministic in `seed`.
inline WiredScenario random_wired_scenario(std::uint64_t seed, const RandomLimits& limits = {}) {
  std::mt19937_64 rng(seed);
  const std::vector<PartyShape> parties{{"A", 2, 2}, {"B", 2, 4}, {"C", 2, 2}};
  std::vector<SourceResource> sources;
  const std::array<std::array<std::size_t, 2>, 2> ends{{{0, 1}, {1, 2}}};
  const char* names[] = {"S_AB", "S_BC"};
  for (std::size_t s = 0; s < 2; ++s) {
    SourceResource src;
    src.name = names[s];
    src.endpoints = ends[s];
    const std::size_t support = std::uniform_int_distribution<std::size_t>(1, limits.max_share_support)(rng);
    src.shares = detail::random_distribution(rng, support);
    const std::size_t n_boxes = std::uniform_int_distribution<std::size_t>(1, limits.max_boxes_per_source)(rng);
    const bool indexed = support > 1 && std::bernoulli_distribution(0.5)(rng);
    src.boxes.assign(indexed ? support : 1, {});
    for (auto& row : src.boxes)
      for (std::size_t i = 0; i < n_boxes; ++i) row.push_back(detail::random_qubit_box(rng));
    sources.push_back(std::move(src));
  }
  // Shell with empty programs to obtain terminal lists and history layouts.
  std::vector<WiringProgram> empty(parties.size());
  for (std::size_t p = 0; p < parties.size(); ++p) {
    std::size_t heads = parties[p].inputs;
    for (const auto& src : sources)
      if (src.endpoints[0] == p || src.endpoints[1] == p) heads *= src.shares.size();
    empty[p].output.assign(heads, 0);
  }
  const WiredScenario shell(parties, sources, empty);
  std::vector<WiringProgram> programs(parties.size());
  for (std::size_t p = 0; p < parties.size(); ++p) {
    const auto& terms = shell.terminals(p);
    std::vector<std::size_t> tin, tout;
    for (const auto& t : terms) {
      tin.push_back(shell.terminal_inputs(t));
      tout.push_back(shell.terminal_outputs(t));
    }
    // Bob always uses every terminal; outer parties sometimes leave one unused.
    std::size_t n_steps = terms.size();
    if (p != 1 && n_steps > 0) n_steps = std::uniform_int_distribution<std::size_t>(n_steps - 1, n_steps)(rng);
    detail::fill_program(rng, shell, p, n_steps, programs[p], tin, tout, parties[p].outputs);
  }
  return WiredScenario(parties, std::move(sources), std::move(programs));
}

// ---------------------------------------------------------------------------
// Document format

inline nlohmann::json to_json(const WiredScenario& w) {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = "wired_scenario";
  doc["parties"] = nlohmann::json::array();
  for (const auto& party : w.parties())
    doc["parties"].push_back({{"name", party.name}, {"inputs", party.inputs}, {"outputs", party.outputs}});
  doc["sources"] = nlohmann::json::array();
  for (const auto& src : w.sources()) {
    nlohmann::json s{{"name", src.name}, {"endpoints", src.endpoints}, {"shares", src.shares}};
    s["boxes"] = nlohmann::json::array();
    for (const auto& row : src.boxes) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& b : row) {
        r.push_back({{"inputs", {b.inputs(0), b.inputs(1)}},
                     {"outputs", {b.outputs(0), b.outputs(1)}},
                     {"table", b.table()}});
      }
      s["boxes"].push_back(std::move(r));
    }
    doc["sources"].push_back(std::move(s));
  }
  doc["programs"] = nlohmann::json::array();
  for (const auto& prog : w.programs()) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& step : prog.steps) {
      nlohmann::json t = nlohmann::json::array();
      for (const auto& c : step) t.push_back({c.terminal, c.input});
      steps.push_back(std::move(t));
    }
    doc["programs"].push_back({{"steps", steps}, {"output", prog.output}});
  }
  return doc;
}

namespace detail {

inline void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) throw ParseError(where + ": " + what);
}

inline std::size_t get_size(const nlohmann::json& v, const std::string& where) {
  require(v.is_number_unsigned(), where, "expected a non-negative integer");
  return v.get<std::size_t>();
}

inline std::vector<double> get_reals(const nlohmann::json& v, const std::string& where) {
  require(v.is_array(), where, "expected an array");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    require(v[k].is_number(), where + "[" + std::to_string(k) + "]", "not a number");
    out.push_back(v[k].get<double>());
  }
  return out;
}

inline std::vector<std::size_t> get_sizes(const nlohmann::json& v, const std::string& where) {
  require(v.is_array(), where, "expected an array");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(get_size(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

}  // namespace detail

inline WiredScenario wired_from_json(const nlohmann::json& doc) {
  using detail::require;
  require(doc.is_object(), "$", "expected an object");
  require(doc.value("kind", "") == "wired_scenario", "$.kind", "expected \"wired_scenario\"");
  require(doc.contains("format_version") && doc["format_version"] == kFormatVersion, "$.format_version",
          "missing or unsupported");
  require(doc.contains("parties") && doc["parties"].is_array(), "$.parties", "missing or not an array");
  std::vector<PartyShape> parties;
  for (std::size_t k = 0; k < doc["parties"].size(); ++k) {
    const auto& e = doc["parties"][k];
    const std::string where = "$.parties[" + std::to_string(k) + "]";
    require(e.is_object() && e.contains("name") && e["name"].is_string(), where + ".name", "missing or not a string");
    parties.push_back({e["name"].get<std::string>(), detail::get_size(e.value("inputs", nlohmann::json()), where + ".inputs"),
                       detail::get_size(e.value("outputs", nlohmann::json()), where + ".outputs")});
  }
  require(doc.contains("sources") && doc["sources"].is_array(), "$.sources", "missing or not an array");
  std::vector<SourceResource> sources;
  for (std::size_t s = 0; s < doc["sources"].size(); ++s) {
    const auto& e = doc["sources"][s];
    const std::string where = "$.sources[" + std::to_string(s) + "]";
    require(e.is_object(), where, "expected an object");
    SourceResource src;
    require(e.contains("name") && e["name"].is_string(), where + ".name", "missing or not a string");
    src.name = e["name"].get<std::string>();
    const auto ends = detail::get_sizes(e.value("endpoints", nlohmann::json()), where + ".endpoints");
    require(ends.size() == 2, where + ".endpoints", "expected two parties");
    src.endpoints = {ends[0], ends[1]};
    src.shares = detail::get_reals(e.value("shares", nlohmann::json()), where + ".shares");
    require(e.contains("boxes") && e["boxes"].is_array(), where + ".boxes", "missing or not an array");
    src.boxes.clear();
    for (std::size_t r = 0; r < e["boxes"].size(); ++r) {
      const std::string rw = where + ".boxes[" + std::to_string(r) + "]";
      require(e["boxes"][r].is_array(), rw, "expected an array");
      std::vector<QuantumBox> row;
      for (std::size_t i = 0; i < e["boxes"][r].size(); ++i) {
        const auto& b = e["boxes"][r][i];
        const std::string bw = rw + "[" + std::to_string(i) + "]";
        require(b.is_object(), bw, "expected an object");
        const auto in = detail::get_sizes(b.value("inputs", nlohmann::json()), bw + ".inputs");
        const auto out = detail::get_sizes(b.value("outputs", nlohmann::json()), bw + ".outputs");
        require(in.size() == 2 && out.size() == 2, bw, "inputs and outputs need two entries");
        try {
          row.emplace_back(in[0], in[1], out[0], out[1], detail::get_reals(b.value("table", nlohmann::json()), bw + ".table"));
        } catch (const ValidationError& err) {
          throw ParseError(bw + ": " + err.what());
        }
      }
      src.boxes.push_back(std::move(row));
    }
    sources.push_back(std::move(src));
  }
  require(doc.contains("programs") && doc["programs"].is_array(), "$.programs", "missing or not an array");
  std::vector<WiringProgram> programs;
  for (std::size_t p = 0; p < doc["programs"].size(); ++p) {
    const auto& e = doc["programs"][p];
    const std::string where = "$.programs[" + std::to_string(p) + "]";
    require(e.is_object() && e.contains("steps") && e["steps"].is_array(), where + ".steps", "missing or not an array");
    WiringProgram prog;
    for (std::size_t k = 0; k < e["steps"].size(); ++k) {
      const std::string sw = where + ".steps[" + std::to_string(k) + "]";
      require(e["steps"][k].is_array(), sw, "expected an array");
      std::vector<StepChoice> step;
      for (std::size_t h = 0; h < e["steps"][k].size(); ++h) {
        const auto pair = detail::get_sizes(e["steps"][k][h], sw + "[" + std::to_string(h) + "]");
        require(pair.size() == 2, sw + "[" + std::to_string(h) + "]", "expected [terminal, input]");
        step.push_back({pair[0], pair[1]});
      }
      prog.steps.push_back(std::move(step));
    }
    prog.output = detail::get_sizes(e.value("output", nlohmann::json()), where + ".output");
    programs.push_back(std::move(prog));
  }
  return WiredScenario(std::move(parties), std::move(sources), std::move(programs));
}

}  // namespace netnl::wiring
