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

// Network behaviors p(outputs | inputs).
//
// The probability tensor is stored flat, inputs-major then outputs, each
// block in lexicographic order over parties: for three parties the entry
// p(a b c | x y z) lives at ((x*Y + y)*Z + z) * (A*B*C) + (a*B + b)*C + c.
// A party with input cardinality 1 has no input.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "netnl/errors.hpp"

namespace netnl {

inline constexpr double kProbabilityTol = 1e-12;
inline constexpr double kNormalizationTol = 1e-10;
inline constexpr double kNoSignalingTol = 1e-10;
inline constexpr double kZeroWeight = 1e-12;
inline constexpr int kFormatVersion = 1;

struct PartyShape {
  std::string name;
  std::size_t inputs = 1;
  std::size_t outputs = 1;

  friend bool operator==(const PartyShape&, const PartyShape&) = default;
};

/// Mixed-radix encoding of index tuples, most significant digit first.
class MixedRadix {
 public:
  MixedRadix() = default;
  explicit MixedRadix(std::vector<std::size_t> radices) : radices_(std::move(radices)) {
    size_ = 1;
    for (std::size_t r : radices_) size_ *= r;
  }
  std::size_t size() const { return size_; }
  std::size_t digits() const { return radices_.size(); }
  std::size_t radix(std::size_t k) const { return radices_[k]; }

  std::size_t encode(const std::vector<std::size_t>& tuple) const {
    std::size_t v = 0;
    for (std::size_t k = 0; k < radices_.size(); ++k) v = v * radices_[k] + tuple[k];
    return v;
  }
  std::vector<std::size_t> decode(std::size_t v) const {
    std::vector<std::size_t> t(radices_.size());
    for (std::size_t k = radices_.size(); k-- > 0;) {
      t[k] = v % radices_[k];
      v /= radices_[k];
    }
    return t;
  }

 private:
  std::vector<std::size_t> radices_;
  std::size_t size_ = 1;
};

inline std::string tuple_string(const std::vector<std::size_t>& t) {
  std::ostringstream out;
  out << "(";
  for (std::size_t k = 0; k < t.size(); ++k) out << (k ? "," : "") << t[k];
  out << ")";
  return out.str();
}

class NetworkBehavior {
 public:
  NetworkBehavior() = default;

  /// Validates every invariant (range, normalization, no-signaling); throws ValidationError.
  NetworkBehavior(std::vector<PartyShape> parties, std::vector<double> p)
      : NetworkBehavior(std::move(parties), std::move(p), Unchecked{}) {
    validate();
  }

  struct Unchecked {};
  NetworkBehavior(std::vector<PartyShape> parties, std::vector<double> p, Unchecked)
      : parties_(std::move(parties)), p_(std::move(p)) {
    std::vector<std::size_t> in, out;
    for (const auto& party : parties_) {
      if (party.inputs == 0 || party.outputs == 0) throw ValidationError("party '" + party.name + "' has an empty alphabet");
      in.push_back(party.inputs);
      out.push_back(party.outputs);
    }
    inputs_ = MixedRadix(std::move(in));
    outputs_ = MixedRadix(std::move(out));
    if (p_.size() != inputs_.size() * outputs_.size()) {
      std::ostringstream msg;
      msg << "probability tensor has " << p_.size() << " entries, expected " << inputs_.size() * outputs_.size();
      throw ValidationError(msg.str());
    }
  }

  /// All-zero tensor of the given shape, for accumulation; not a valid behavior.
  static NetworkBehavior zeros(std::vector<PartyShape> parties) {
    std::size_t sz = 1;
    for (const auto& s : parties) sz *= s.inputs * s.outputs;
    return NetworkBehavior(std::move(parties), std::vector<double>(sz, 0.0), Unchecked{});
  }

  const std::vector<PartyShape>& parties() const { return parties_; }
  std::size_t party_count() const { return parties_.size(); }
  const PartyShape& party(std::size_t k) const { return parties_.at(k); }
  const MixedRadix& input_radix() const { return inputs_; }
  const MixedRadix& output_radix() const { return outputs_; }
  const std::vector<double>& data() const { return p_; }
  bool has_no_inputs() const { return inputs_.size() == 1; }

  std::size_t index(const std::vector<std::size_t>& inputs, const std::vector<std::size_t>& outputs) const {
    return inputs_.encode(inputs) * outputs_.size() + outputs_.encode(outputs);
  }
  double at(const std::vector<std::size_t>& inputs, const std::vector<std::size_t>& outputs) const {
    return p_[index(inputs, outputs)];
  }
  double at_flat(std::size_t input_index, std::size_t output_index) const {
    return p_[input_index * outputs_.size() + output_index];
  }

  bool same_shape(const NetworkBehavior& o) const { return parties_ == o.parties_; }

  /// Largest entrywise deviation between two behaviors of the same shape.
  double max_abs_diff(const NetworkBehavior& o) const {
    if (!same_shape(o)) throw ContractError("max_abs_diff: behaviors have different shapes");
    double m = 0.0;
    for (std::size_t k = 0; k < p_.size(); ++k) m = std::max(m, std::abs(p_[k] - o.p_[k]));
    return m;
  }

  /// Largest |p(outputs_S | inputs) - p(outputs_S | inputs')| over inputs differing only outside S.
  double max_signaling() const {
    const std::size_t n = parties_.size();
    double worst = 0.0;
    for (std::size_t removed = 1; removed + 1 < (std::size_t{1} << n); ++removed) {
      std::vector<std::size_t> keep;
      for (std::size_t k = 0; k < n; ++k)
        if (!(removed >> k & 1)) keep.push_back(k);
      // Marginal table indexed by (full input tuple, kept outputs).
      std::vector<std::size_t> kept_out;
      for (std::size_t k : keep) kept_out.push_back(parties_[k].outputs);
      MixedRadix kept_radix(kept_out);
      std::vector<double> marg(inputs_.size() * kept_radix.size(), 0.0);
      for (std::size_t xi = 0; xi < inputs_.size(); ++xi)
        for (std::size_t oi = 0; oi < outputs_.size(); ++oi) {
          const auto o = outputs_.decode(oi);
          std::vector<std::size_t> ko;
          for (std::size_t k : keep) ko.push_back(o[k]);
          marg[xi * kept_radix.size() + kept_radix.encode(ko)] += at_flat(xi, oi);
        }
      // Compare each input tuple with the one whose removed-party inputs are zero.
      for (std::size_t xi = 0; xi < inputs_.size(); ++xi) {
        auto x = inputs_.decode(xi);
        for (std::size_t k = 0; k < n; ++k)
          if (removed >> k & 1) x[k] = 0;
        const std::size_t ref = inputs_.encode(x);
        for (std::size_t ko = 0; ko < kept_radix.size(); ++ko)
          worst = std::max(worst, std::abs(marg[xi * kept_radix.size() + ko] - marg[ref * kept_radix.size() + ko]));
      }
    }
    return worst;
  }

  void validate() const {
    for (std::size_t k = 0; k < p_.size(); ++k) {
      if (!std::isfinite(p_[k]) || p_[k] < -kProbabilityTol || p_[k] > 1.0 + kProbabilityTol) {
        std::ostringstream msg;
        msg << "p[" << k << "] = " << p_[k] << " at inputs " << tuple_string(inputs_.decode(k / outputs_.size()))
            << ", outputs " << tuple_string(outputs_.decode(k % outputs_.size())) << " is not a probability";
        throw ValidationError(msg.str());
      }
    }
    for (std::size_t xi = 0; xi < inputs_.size(); ++xi) {
      double sum = 0.0;
      for (std::size_t oi = 0; oi < outputs_.size(); ++oi) sum += at_flat(xi, oi);
      if (std::abs(sum - 1.0) > kNormalizationTol) {
        std::ostringstream msg;
        msg << "distribution for input tuple " << tuple_string(inputs_.decode(xi)) << " sums to " << sum;
        throw ValidationError(msg.str());
      }
    }
    const double sig = max_signaling();
    if (sig > kNoSignalingTol) {
      std::ostringstream msg;
      msg << "behavior is signaling: marginal deviation " << sig;
      throw ValidationError(msg.str());
    }
  }

 private:
  std::vector<PartyShape> parties_;
  std::vector<double> p_;
  MixedRadix inputs_;
  MixedRadix outputs_;
};

/// Convex combination w*a + (1-w)*b of two behaviors of the same shape.
inline NetworkBehavior mix(const NetworkBehavior& a, const NetworkBehavior& b, double w) {
  if (!a.same_shape(b)) throw ContractError("mix: behaviors have different shapes");
  std::vector<double> p(a.data().size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = w * a.data()[k] + (1.0 - w) * b.data()[k];
  return NetworkBehavior(a.parties(), std::move(p));
}

/// Uniformly random outputs for every input tuple.
inline NetworkBehavior uniform_behavior(std::vector<PartyShape> parties) {
  std::size_t in = 1, out = 1;
  for (const auto& party : parties) {
    in *= party.inputs;
    out *= party.outputs;
  }
  return NetworkBehavior(std::move(parties), std::vector<double>(in * out, 1.0 / static_cast<double>(out)));
}

/// Fixes the inputs of some parties; those parties then have input cardinality 1.
inline NetworkBehavior fix_inputs(const NetworkBehavior& p, const std::map<std::size_t, std::size_t>& fixed) {
  auto parties = p.parties();
  for (const auto& [k, x] : fixed) {
    if (k >= parties.size() || x >= parties[k].inputs) throw ContractError("fix_inputs: party or input out of range");
    parties[k].inputs = 1;
  }
  const auto shape = NetworkBehavior::zeros(parties);
  std::vector<double> out(shape.data().size());
  for (std::size_t xi = 0; xi < shape.input_radix().size(); ++xi) {
    auto x = shape.input_radix().decode(xi);
    for (const auto& [k, v] : fixed) x[k] = v;
    const std::size_t src = p.input_radix().encode(x);
    for (std::size_t oi = 0; oi < p.output_radix().size(); ++oi) out[xi * p.output_radix().size() + oi] = p.at_flat(src, oi);
  }
  return NetworkBehavior(std::move(parties), std::move(out));
}

/// Marginal onto the parties in `keep` (ascending order preserved).
///
/// A removed party must either have no input or have its input fixed in `fixed_inputs`.
inline NetworkBehavior marginal(const NetworkBehavior& p, const std::vector<std::size_t>& keep,
                                const std::map<std::size_t, std::size_t>& fixed_inputs = {}) {
  const std::size_t n = p.party_count();
  std::vector<bool> kept(n, false);
  for (std::size_t k : keep) {
    if (k >= n) throw ContractError("marginal: party index out of range");
    kept[k] = true;
  }
  std::map<std::size_t, std::size_t> fix;
  for (std::size_t k = 0; k < n; ++k) {
    if (kept[k]) continue;
    auto it = fixed_inputs.find(k);
    if (it != fixed_inputs.end()) {
      fix[k] = it->second;
    } else if (p.party(k).inputs != 1) {
      throw ContractError("marginal: removing party '" + p.party(k).name + "' requires a fixed input");
    }
  }
  const NetworkBehavior q = fix.empty() ? p : fix_inputs(p, fix);
  std::vector<PartyShape> parties;
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < n; ++k)
    if (kept[k]) {
      parties.push_back(p.party(k));
      order.push_back(k);
    }
  const auto shape = NetworkBehavior::zeros(parties);
  std::vector<double> out(shape.data().size(), 0.0);
  for (std::size_t xi = 0; xi < q.input_radix().size(); ++xi) {
    const auto x = q.input_radix().decode(xi);
    std::vector<std::size_t> kx;
    for (std::size_t k : order) kx.push_back(x[k]);
    const std::size_t dst_x = shape.input_radix().encode(kx);
    // Each kept-input tuple appears once because all removed parties have a single input.
    for (std::size_t oi = 0; oi < q.output_radix().size(); ++oi) {
      const auto o = q.output_radix().decode(oi);
      std::vector<std::size_t> ko;
      for (std::size_t k : order) ko.push_back(o[k]);
      out[dst_x * shape.output_radix().size() + shape.output_radix().encode(ko)] += q.at_flat(xi, oi);
    }
  }
  return NetworkBehavior(std::move(parties), std::move(out));
}

/// The behavior of the remaining parties conditioned on one party's (input, outcome).
struct ConditionalBipartiteBehavior {
  std::size_t conditioning_party = 1;
  std::size_t input = 0;    // y
  std::size_t outcome = 0;  // b
  double weight = 0.0;      // p(b|y)
  NetworkBehavior behavior;
};

/// p(others | inputs, b) = p(..., b, ... | ..., y, ...) / p(b|y), conditioning on `party`.
inline ConditionalBipartiteBehavior condition_on(const NetworkBehavior& p, std::size_t party, std::size_t y,
                                                 std::size_t b) {
  const std::size_t n = p.party_count();
  if (party >= n) throw ContractError("condition_on: party index out of range");
  if (y >= p.party(party).inputs || b >= p.party(party).outputs) {
    throw ContractError("condition_on: input or outcome out of range");
  }
  std::vector<PartyShape> rest;
  for (std::size_t k = 0; k < n; ++k)
    if (k != party) rest.push_back(p.party(k));
  const auto shape = NetworkBehavior::zeros(rest);

  std::vector<double> out(shape.data().size(), 0.0);
  std::vector<double> weight_by_input(shape.input_radix().size(), 0.0);
  for (std::size_t ri = 0; ri < shape.input_radix().size(); ++ri) {
    const auto rx = shape.input_radix().decode(ri);
    std::vector<std::size_t> x;
    for (std::size_t k = 0, r = 0; k < n; ++k) x.push_back(k == party ? y : rx[r++]);
    for (std::size_t ro = 0; ro < shape.output_radix().size(); ++ro) {
      const auto rout = shape.output_radix().decode(ro);
      std::vector<std::size_t> o;
      for (std::size_t k = 0, r = 0; k < n; ++k) o.push_back(k == party ? b : rout[r++]);
      const double v = p.at(x, o);
      out[ri * shape.output_radix().size() + ro] = v;
      weight_by_input[ri] += v;
    }
  }
  const double w = weight_by_input[0];
  for (std::size_t ri = 1; ri < weight_by_input.size(); ++ri) {
    if (std::abs(weight_by_input[ri] - w) > kNoSignalingTol) {
      std::ostringstream msg;
      msg << "condition_on: p(b=" << b << "|y=" << y << ") depends on the other inputs (" << weight_by_input[ri]
          << " vs " << w << ")";
      throw NoSignalingViolation(msg.str());
    }
  }
  if (w <= kZeroWeight) {
    std::ostringstream msg;
    msg << "condition_on: outcome b=" << b << " for y=" << y << " has zero probability";
    throw UndefinedConditionalError(msg.str());
  }
  for (std::size_t ri = 0; ri < weight_by_input.size(); ++ri)
    for (std::size_t ro = 0; ro < shape.output_radix().size(); ++ro)
      out[ri * shape.output_radix().size() + ro] /= weight_by_input[ri];
  return ConditionalBipartiteBehavior{party, y, b, w, NetworkBehavior(std::move(rest), std::move(out))};
}

/// Conditions a three-party behavior on the middle party (Bob).
inline ConditionalBipartiteBehavior condition_on_b(const NetworkBehavior& p, std::size_t y, std::size_t b) {
  return condition_on(p, 1, y, b);
}

using SignFunction = std::function<double(std::size_t)>;

/// Sum over a,b,c of (-1)^a (-1)^c sign(b) p(a b c | x y z) for a three-party behavior.
inline double correlator(const NetworkBehavior& p, std::size_t x, std::size_t z, const SignFunction& sign,
                         std::size_t y = 0) {
  if (p.party_count() != 3) throw ContractError("correlator: expected a three-party behavior");
  if (p.party(0).outputs != 2 || p.party(2).outputs != 2) {
    throw ContractError("correlator: outer parties must have binary outputs");
  }
  if (x >= p.party(0).inputs || y >= p.party(1).inputs || z >= p.party(2).inputs) {
    throw ContractError("correlator: input out of range");
  }
  double e = 0.0;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < p.party(1).outputs; ++b)
      for (std::size_t c = 0; c < 2; ++c) {
        const double s = ((a + c) % 2 == 0 ? 1.0 : -1.0) * sign(b);
        e += s * p.at({x, y, z}, {a, b, c});
      }
  return e;
}

/// Two-point correlator E(x,z) = sum (-1)^{a+c} p(a c | x z) of a bipartite binary-output behavior.
inline double correlator2(const NetworkBehavior& p, std::size_t x, std::size_t z) {
  if (p.party_count() != 2 || p.party(0).outputs != 2 || p.party(1).outputs != 2) {
    throw ContractError("correlator2: expected a bipartite behavior with binary outputs");
  }
  double e = 0.0;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t c = 0; c < 2; ++c) e += ((a + c) % 2 == 0 ? 1.0 : -1.0) * p.at({x, z}, {a, c});
  return e;
}

/// Single-party expectation sum (-1)^a p(a | x) of party `k` in a bipartite behavior, other input fixed at 0.
inline double one_point(const NetworkBehavior& p, std::size_t k, std::size_t x) {
  if (p.party_count() != 2 || p.party(k).outputs != 2) throw ContractError("one_point: expected binary outputs");
  double e = 0.0;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t c = 0; c < p.party(1 - k).outputs; ++c) {
      std::vector<std::size_t> in(2, 0), out(2, 0);
      in[k] = x;
      out[k] = a;
      out[1 - k] = c;
      e += (a == 0 ? 1.0 : -1.0) * p.at(in, out);
    }
  return e;
}

// ---------------------------------------------------------------------------
// Behavior document format

inline nlohmann::json to_json(const NetworkBehavior& p) {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["parties"] = nlohmann::json::array();
  for (const auto& party : p.parties()) {
    doc["parties"].push_back({{"name", party.name}, {"inputs", party.inputs}, {"outputs", party.outputs}});
  }
  doc["p"] = p.data();
  return doc;
}

inline NetworkBehavior behavior_from_json(const nlohmann::json& doc) {
  auto require = [](bool ok, const std::string& where, const std::string& what) {
    if (!ok) throw ParseError(where + ": " + what);
  };
  require(doc.is_object(), "$", "expected an object");
  require(doc.contains("format_version") && doc["format_version"].is_number_integer(), "$.format_version",
          "missing or not an integer");
  require(doc["format_version"].get<int>() == kFormatVersion, "$.format_version", "unsupported version");
  require(doc.contains("parties") && doc["parties"].is_array(), "$.parties", "missing or not an array");
  std::vector<PartyShape> parties;
  for (std::size_t k = 0; k < doc["parties"].size(); ++k) {
    const auto& e = doc["parties"][k];
    const std::string where = "$.parties[" + std::to_string(k) + "]";
    require(e.is_object(), where, "expected an object");
    require(e.contains("name") && e["name"].is_string(), where + ".name", "missing or not a string");
    require(e.contains("inputs") && e["inputs"].is_number_unsigned(), where + ".inputs", "missing or not unsigned");
    require(e.contains("outputs") && e["outputs"].is_number_unsigned(), where + ".outputs", "missing or not unsigned");
    parties.push_back({e["name"].get<std::string>(), e["inputs"].get<std::size_t>(), e["outputs"].get<std::size_t>()});
  }
  require(doc.contains("p") && doc["p"].is_array(), "$.p", "missing or not an array");
  std::vector<double> p;
  p.reserve(doc["p"].size());
  for (std::size_t k = 0; k < doc["p"].size(); ++k) {
    require(doc["p"][k].is_number(), "$.p[" + std::to_string(k) + "]", "not a number");
    p.push_back(doc["p"][k].get<double>());
  }
  return NetworkBehavior(std::move(parties), std::move(p));
}

/// Text form; doubles are written in shortest round-trip form, so deserialize(serialize(p)) is bit-exact.
inline std::string serialize(const NetworkBehavior& p) { return to_json(p).dump(2); }

inline NetworkBehavior deserialize(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("behavior document: ") + e.what());
  }
  return behavior_from_json(doc);
}

}  // namespace netnl
