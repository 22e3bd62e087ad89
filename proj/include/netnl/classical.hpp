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

// Classical models of network behaviors.
//
//  * Bell locality: a single shared variable; membership in the local
//    polytope is decided by linear programming over deterministic strategies.
//  * Bilocality: two independent shared variables, one per source of the
//    bilocality network. Explicit models and the standard two-term
//    inequality sqrt|I| + sqrt|J| <= 1 are provided.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "netnl/behaviors.hpp"
#include "netnl/errors.hpp"
#include "netnl/simplex.hpp"

namespace netnl::classical {

inline constexpr std::size_t kDefaultStrategyCap = 10000;
inline constexpr double kLpResidualTol = 1e-8;
inline constexpr double kWitnessMargin = 1e-9;

// ---------------------------------------------------------------------------
// Deterministic strategies

/// Number of response tables input -> output for one party.
inline std::size_t table_count(const PartyShape& s) {
  std::size_t n = 1;
  for (std::size_t x = 0; x < s.inputs; ++x) n *= s.outputs;
  return n;
}

/// Response of table `t` to input `x`; input 0 is the most significant digit.
inline std::size_t table_response(const PartyShape& s, std::size_t t, std::size_t x) {
  for (std::size_t k = s.inputs - 1; k > x; --k) t /= s.outputs;
  return t % s.outputs;
}

/// Strategies are indexed lexicographically: party 0's table is the most significant digit.
struct DeterministicStrategy {
  std::vector<std::size_t> tables;  // one response-table index per party

  std::size_t response(const std::vector<PartyShape>& parties, std::size_t party, std::size_t input) const {
    return table_response(parties[party], tables[party], input);
  }
};

inline MixedRadix strategy_radix(const std::vector<PartyShape>& parties) {
  std::vector<std::size_t> r;
  for (const auto& s : parties) r.push_back(table_count(s));
  return MixedRadix(std::move(r));
}

inline DeterministicStrategy strategy_at(const std::vector<PartyShape>& parties, std::size_t index) {
  return {strategy_radix(parties).decode(index)};
}

inline NetworkBehavior deterministic_behavior(const std::vector<PartyShape>& parties, const DeterministicStrategy& d) {
  auto shape = NetworkBehavior::zeros(parties);
  std::vector<double> p(shape.data().size(), 0.0);
  for (std::size_t xi = 0; xi < shape.input_radix().size(); ++xi) {
    const auto x = shape.input_radix().decode(xi);
    std::vector<std::size_t> o(parties.size());
    for (std::size_t k = 0; k < parties.size(); ++k) o[k] = d.response(parties, k, x[k]);
    p[xi * shape.output_radix().size() + shape.output_radix().encode(o)] = 1.0;
  }
  return NetworkBehavior(parties, std::move(p));
}

// ---------------------------------------------------------------------------
// Bell-locality linear program

struct LocalityCertificate {
  std::vector<PartyShape> parties;
  bool feasible = false;
  std::vector<double> weights;  // over strategy indices, when feasible
  double residual = 0.0;        // max |sum_j w_j d_j - p|, when feasible
  // Separating inequality <witness, q> <= witness_bound on the local polytope, violated by p.
  std::vector<double> witness;
  double witness_bound = 0.0;
  double witness_value = 0.0;  // <witness, p>
  std::size_t pivots = 0;

  double witness_gap() const { return witness_value - witness_bound; }
};

/// Decides whether p is a convex mixture of deterministic strategy products.
inline LocalityCertificate is_bell_local(const NetworkBehavior& p, std::size_t strategy_cap = kDefaultStrategyCap) {
  const auto& parties = p.parties();
  const MixedRadix radix = strategy_radix(parties);
  if (radix.size() > strategy_cap) {
    std::ostringstream msg;
    msg << "is_bell_local: " << radix.size() << " deterministic strategies exceed the cap of " << strategy_cap;
    throw CapacityError(msg.str());
  }
  const std::size_t n_entries = p.data().size();
  const std::size_t cols = radix.size();
  const std::size_t rows = n_entries + 1;
  const std::size_t out_size = p.output_radix().size();

  // Column j holds the deterministic behavior of strategy j; the last row is the simplex sum.
  std::vector<double> a(rows * cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    const auto d = strategy_at(parties, j);
    for (std::size_t xi = 0; xi < p.input_radix().size(); ++xi) {
      const auto x = p.input_radix().decode(xi);
      std::vector<std::size_t> o(parties.size());
      for (std::size_t k = 0; k < parties.size(); ++k) o[k] = d.response(parties, k, x[k]);
      a[(xi * out_size + p.output_radix().encode(o)) * cols + j] = 1.0;
    }
    a[n_entries * cols + j] = 1.0;
  }
  std::vector<double> b(p.data());
  b.push_back(1.0);

  const auto lp = simplex::solve_feasibility(a, rows, cols, b);
  LocalityCertificate cert;
  cert.parties = parties;
  cert.feasible = lp.feasible;
  cert.pivots = lp.pivots;
  if (lp.feasible) {
    cert.weights = lp.x;
    double residual = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) s += a[i * cols + j] * cert.weights[j];
      residual = std::max(residual, std::abs(s - b[i]));
    }
    cert.residual = residual;
    if (residual > kLpResidualTol) {
      std::ostringstream msg;
      msg << "is_bell_local: feasible basis reconstructs p only to " << residual << " after " << lp.pivots
          << " pivots (tolerance " << kLpResidualTol << ")";
      throw SolverError(msg.str());
    }
  } else {
    cert.witness.assign(lp.dual.begin(), lp.dual.begin() + static_cast<std::ptrdiff_t>(n_entries));
    double value = 0.0;
    for (std::size_t i = 0; i < n_entries; ++i) value += cert.witness[i] * p.data()[i];
    double bound = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n_entries; ++i) s += cert.witness[i] * a[i * cols + j];
      bound = std::max(bound, s);
    }
    cert.witness_value = value;
    cert.witness_bound = bound;
    if (cert.witness_gap() <= kWitnessMargin) {
      std::ostringstream msg;
      msg << "is_bell_local: infeasible with phase-1 value " << lp.infeasibility
          << " but the dual witness separates only by " << cert.witness_gap();
      throw SolverError(msg.str());
    }
  }
  return cert;
}

/// Weighted mixture of deterministic strategies recorded in a feasible certificate.
inline NetworkBehavior certificate_mixture(const LocalityCertificate& cert) {
  if (!cert.feasible) throw ContractError("certificate_mixture: certificate is infeasible");
  auto shape = NetworkBehavior::zeros(cert.parties);
  std::vector<double> p(shape.data().size(), 0.0);
  for (std::size_t j = 0; j < cert.weights.size(); ++j) {
    if (cert.weights[j] == 0.0) continue;
    const auto d = deterministic_behavior(cert.parties, strategy_at(cert.parties, j));
    for (std::size_t k = 0; k < p.size(); ++k) p[k] += cert.weights[j] * d.data()[k];
  }
  return NetworkBehavior(cert.parties, std::move(p));
}

inline nlohmann::json to_json(const LocalityCertificate& cert) {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["parties"] = nlohmann::json::array();
  for (const auto& party : cert.parties) {
    doc["parties"].push_back({{"name", party.name}, {"inputs", party.inputs}, {"outputs", party.outputs}});
  }
  doc["feasible"] = cert.feasible;
  if (cert.feasible) {
    nlohmann::json w = nlohmann::json::object();
    for (std::size_t j = 0; j < cert.weights.size(); ++j)
      if (cert.weights[j] > 0.0) w[std::to_string(j)] = cert.weights[j];
    doc["weights"] = w;
    doc["residual"] = cert.residual;
  } else {
    doc["witness"] = cert.witness;
    doc["witness_bound"] = cert.witness_bound;
    doc["witness_value"] = cert.witness_value;
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Fine parent distribution

/// Pushforward of the strategy weights to joint outcome tuples.
///
/// The result has no inputs; party k's output is the tuple (o_k(0), ..., o_k(I_k - 1))
/// encoded with input 0 most significant, so it has O_k^{I_k} values.
inline NetworkBehavior fine_parent(const LocalityCertificate& cert) {
  if (!cert.feasible) throw ContractError("fine_parent: certificate is infeasible");
  std::vector<PartyShape> parties;
  for (const auto& s : cert.parties) parties.push_back({s.name, 1, table_count(s)});
  std::vector<double> p(cert.weights);
  double total = 0.0;
  for (double w : p) total += w;
  for (double& w : p) w /= total;
  return NetworkBehavior(std::move(parties), std::move(p));
}

/// Selects a_x from the parent tuples: the inverse of fine_parent.
inline NetworkBehavior select_from_parent(const NetworkBehavior& parent, const std::vector<PartyShape>& shape) {
  if (parent.party_count() != shape.size() || !parent.has_no_inputs()) {
    throw ContractError("select_from_parent: parent must be a no-input behavior over the same parties");
  }
  for (std::size_t k = 0; k < shape.size(); ++k)
    if (parent.party(k).outputs != table_count(shape[k])) throw ContractError("select_from_parent: tuple size mismatch");
  auto out = NetworkBehavior::zeros(shape);
  std::vector<double> p(out.data().size(), 0.0);
  for (std::size_t t = 0; t < parent.output_radix().size(); ++t) {
    const double w = parent.at_flat(0, t);
    if (w == 0.0) continue;
    const DeterministicStrategy d{parent.output_radix().decode(t)};
    for (std::size_t xi = 0; xi < out.input_radix().size(); ++xi) {
      const auto x = out.input_radix().decode(xi);
      std::vector<std::size_t> o(shape.size());
      for (std::size_t k = 0; k < shape.size(); ++k) o[k] = d.response(shape, k, x[k]);
      p[xi * out.output_radix().size() + out.output_radix().encode(o)] += w;
    }
  }
  return NetworkBehavior(shape, std::move(p));
}

// ---------------------------------------------------------------------------
// CHSH

/// max over the 8 relabelings of |E00 + E01 + E10 - E11|.
inline double chsh(const NetworkBehavior& p) {
  if (p.party_count() != 2) throw ContractError("chsh: expected a bipartite behavior");
  for (const auto& s : p.parties())
    if (s.inputs != 2 || s.outputs != 2) throw ContractError("chsh: expected two inputs and two outputs per party");
  const double e[4] = {correlator2(p, 0, 0), correlator2(p, 0, 1), correlator2(p, 1, 0), correlator2(p, 1, 1)};
  const double total = e[0] + e[1] + e[2] + e[3];
  double best = 0.0;
  for (double ek : e) best = std::max(best, std::abs(total - 2.0 * ek));
  return best;
}

// ---------------------------------------------------------------------------
// Bilocality

struct BilocalityScore {
  double i = 0.0;
  double j = 0.0;
  double s = 0.0;  // sqrt|I| + sqrt|J|
};

inline void require_bilocality_shape(const NetworkBehavior& p, const char* who) {
  if (p.party_count() != 3 || p.party(0).inputs != 2 || p.party(0).outputs != 2 || p.party(1).inputs != 1 ||
      p.party(1).outputs != 4 || p.party(2).inputs != 2 || p.party(2).outputs != 2) {
    throw ContractError(std::string(who) + ": expected A, C with 2 inputs/2 outputs and B with no input, 4 outputs");
  }
}

/// Bob's outcome b = 2*b1 + b2; B0 = (-1)^{b1}, B1 = (-1)^{b2}.
inline double bob_sign_b1(std::size_t b) { return (b >> 1 & 1) ? -1.0 : 1.0; }
inline double bob_sign_b2(std::size_t b) { return (b & 1) ? -1.0 : 1.0; }

inline BilocalityScore bilocality_score(const NetworkBehavior& p) {
  require_bilocality_shape(p, "bilocality_score");
  BilocalityScore out;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t z = 0; z < 2; ++z) {
      out.i += 0.25 * correlator(p, x, z, bob_sign_b1);
      out.j += 0.25 * ((x + z) % 2 == 0 ? 1.0 : -1.0) * correlator(p, x, z, bob_sign_b2);
    }
  out.s = std::sqrt(std::abs(out.i)) + std::sqrt(std::abs(out.j));
  return out;
}

/// Finite bilocal model: lambda ~ p(lambda) shared by A and B, mu ~ q(mu) shared by B and C.
struct BilocalModel {
  std::vector<PartyShape> parties;  // A, B, C
  std::vector<double> lambda;       // p(lambda)
  std::vector<double> mu;           // q(mu)
  // alice[l][x][a], bob[l][m][y][b], charlie[m][z][c]
  std::vector<std::vector<std::vector<double>>> alice;
  std::vector<std::vector<std::vector<std::vector<double>>>> bob;
  std::vector<std::vector<std::vector<double>>> charlie;
};

/// Exact sum over lambda and mu of p(l) q(m) p(a|x,l) p(b|y,l,m) p(c|z,m).
inline NetworkBehavior evaluate_bilocal_model(const BilocalModel& m) {
  if (m.parties.size() != 3) throw ContractError("evaluate_bilocal_model: expected three parties");
  auto out = NetworkBehavior::zeros(m.parties);
  std::vector<double> p(out.data().size(), 0.0);
  const auto& A = m.parties[0];
  const auto& B = m.parties[1];
  const auto& C = m.parties[2];
  for (std::size_t l = 0; l < m.lambda.size(); ++l)
    for (std::size_t u = 0; u < m.mu.size(); ++u) {
      const double w = m.lambda[l] * m.mu[u];
      if (w == 0.0) continue;
      for (std::size_t x = 0; x < A.inputs; ++x)
        for (std::size_t y = 0; y < B.inputs; ++y)
          for (std::size_t z = 0; z < C.inputs; ++z)
            for (std::size_t a = 0; a < A.outputs; ++a) {
              const double pa = m.alice[l][x][a];
              if (pa == 0.0) continue;
              for (std::size_t b = 0; b < B.outputs; ++b) {
                const double pb = m.bob[l][u][y][b];
                if (pb == 0.0) continue;
                for (std::size_t c = 0; c < C.outputs; ++c)
                  p[out.index({x, y, z}, {a, b, c})] += w * pa * pb * m.charlie[u][z][c];
              }
            }
    }
  return NetworkBehavior(m.parties, std::move(p));
}

/// Max |p(a,c) - p(a) p(c)| of a no-input three-party behavior.
inline double outer_dependence(const NetworkBehavior& p) {
  const auto ac = marginal(p, {0, 2});
  const auto a = marginal(p, {0});
  const auto c = marginal(p, {2});
  double worst = 0.0;
  for (std::size_t i = 0; i < p.party(0).outputs; ++i)
    for (std::size_t k = 0; k < p.party(2).outputs; ++k)
      worst = std::max(worst, std::abs(ac.at({0, 0}, {i, k}) - a.at({0}, {i}) * c.at({0}, {k})));
  return worst;
}

/// The p(a) p(c) p(b|a,c) model of a no-input behavior whose outer marginals are independent.
///
/// Source S_AB samples lambda from p(a) and Alice outputs it; S_BC samples mu from p(c)
/// and Charlie outputs it; Bob answers with p(b | a = lambda, c = mu).
inline BilocalModel bilocal_model_no_input(const NetworkBehavior& p) {
  if (p.party_count() != 3 || !p.has_no_inputs()) {
    throw ContractError("bilocal_model_no_input: expected a three-party behavior without inputs");
  }
  const double dep = outer_dependence(p);
  if (dep > kNormalizationTol) {
    std::ostringstream msg;
    msg << "bilocal_model_no_input: p(a,c) differs from p(a)p(c) by " << dep;
    throw InapplicableError(msg.str());
  }
  const std::size_t na = p.party(0).outputs, nb = p.party(1).outputs, nc = p.party(2).outputs;
  const auto a = marginal(p, {0});
  const auto c = marginal(p, {2});
  BilocalModel m;
  m.parties = p.parties();
  for (std::size_t i = 0; i < na; ++i) m.lambda.push_back(a.at({0}, {i}));
  for (std::size_t k = 0; k < nc; ++k) m.mu.push_back(c.at({0}, {k}));
  m.alice.assign(na, std::vector<std::vector<double>>(1, std::vector<double>(na, 0.0)));
  for (std::size_t l = 0; l < na; ++l) m.alice[l][0][l] = 1.0;
  m.charlie.assign(nc, std::vector<std::vector<double>>(1, std::vector<double>(nc, 0.0)));
  for (std::size_t u = 0; u < nc; ++u) m.charlie[u][0][u] = 1.0;
  m.bob.assign(na, std::vector<std::vector<std::vector<double>>>(
                       nc, std::vector<std::vector<double>>(1, std::vector<double>(nb, 0.0))));
  for (std::size_t l = 0; l < na; ++l)
    for (std::size_t u = 0; u < nc; ++u) {
      const double w = m.lambda[l] * m.mu[u];
      auto& row = m.bob[l][u][0];
      if (w <= 0.0) {
        // Never sampled; any normalized response will do.
        row[0] = 1.0;
        continue;
      }
      double total = 0.0;
      for (std::size_t b = 0; b < nb; ++b) {
        row[b] = std::max(0.0, p.at({0, 0, 0}, {l, b, u})) / w;
        total += row[b];
      }
      for (double& v : row) v /= total;
    }
  return m;
}

/// Bilocal model for a behavior with inputs, given a no-input parent distribution over
/// response tuples whose A and C components are independent.
///
/// The no-input model is built on the parent, then Alice (Charlie) answers input x with
/// the x-th entry of the tuple carried by lambda (mu), and Bob selects the y-th entry of his.
inline BilocalModel bilocal_model_from_parent(const NetworkBehavior& parent, const std::vector<PartyShape>& shape) {
  if (shape.size() != 3) throw ContractError("bilocal_model_from_parent: expected three parties");
  const BilocalModel base = bilocal_model_no_input(parent);
  BilocalModel m;
  m.parties = shape;
  m.lambda = base.lambda;
  m.mu = base.mu;
  const auto &A = shape[0], &B = shape[1], &C = shape[2];
  m.alice.assign(m.lambda.size(), std::vector<std::vector<double>>(A.inputs, std::vector<double>(A.outputs, 0.0)));
  for (std::size_t l = 0; l < m.lambda.size(); ++l)
    for (std::size_t x = 0; x < A.inputs; ++x) m.alice[l][x][table_response(A, l, x)] = 1.0;
  m.charlie.assign(m.mu.size(), std::vector<std::vector<double>>(C.inputs, std::vector<double>(C.outputs, 0.0)));
  for (std::size_t u = 0; u < m.mu.size(); ++u)
    for (std::size_t z = 0; z < C.inputs; ++z) m.charlie[u][z][table_response(C, u, z)] = 1.0;
  m.bob.assign(m.lambda.size(),
               std::vector<std::vector<std::vector<double>>>(
                   m.mu.size(), std::vector<std::vector<double>>(B.inputs, std::vector<double>(B.outputs, 0.0))));
  for (std::size_t l = 0; l < m.lambda.size(); ++l)
    for (std::size_t u = 0; u < m.mu.size(); ++u)
      for (std::size_t t = 0; t < base.bob[l][u][0].size(); ++t)
        for (std::size_t y = 0; y < B.inputs; ++y) m.bob[l][u][y][table_response(B, t, y)] += base.bob[l][u][0][t];
  return m;
}

/// Bilocal model via the p(a)p(c)p(b|a,c) construction.
///
/// Behaviors without inputs are handled directly. With inputs, the behavior is first
/// certified Bell-local and its Fine parent is used; the construction applies only when
/// that parent has independent A and C tuples.
inline BilocalModel bilocal_model(const NetworkBehavior& p, std::size_t strategy_cap = kDefaultStrategyCap) {
  if (p.has_no_inputs()) return bilocal_model_no_input(p);
  const auto cert = is_bell_local(p, strategy_cap);
  if (!cert.feasible) throw InapplicableError("bilocal_model: behavior is not Bell-local");
  return bilocal_model_from_parent(fine_parent(cert), p.parties());
}

/// Random finite bilocal model with stochastic response tables.
inline BilocalModel random_bilocal_model(std::mt19937_64& rng, const std::vector<PartyShape>& shape,
                                         std::size_t lambda_size, std::size_t mu_size) {
  std::exponential_distribution<double> expo(1.0);
  auto simplex_point = [&](std::size_t n) {
    std::vector<double> v(n);
    double total = 0.0;
    for (double& e : v) total += (e = expo(rng));
    for (double& e : v) e /= total;
    return v;
  };
  BilocalModel m;
  m.parties = shape;
  m.lambda = simplex_point(lambda_size);
  m.mu = simplex_point(mu_size);
  const auto &A = shape[0], &B = shape[1], &C = shape[2];
  m.alice.resize(lambda_size);
  for (auto& tab : m.alice)
    for (std::size_t x = 0; x < A.inputs; ++x) tab.push_back(simplex_point(A.outputs));
  m.charlie.resize(mu_size);
  for (auto& tab : m.charlie)
    for (std::size_t z = 0; z < C.inputs; ++z) tab.push_back(simplex_point(C.outputs));
  m.bob.assign(lambda_size, std::vector<std::vector<std::vector<double>>>(mu_size));
  for (auto& row : m.bob)
    for (auto& tab : row)
      for (std::size_t y = 0; y < B.inputs; ++y) tab.push_back(simplex_point(B.outputs));
  return m;
}

}  // namespace netnl::classical
