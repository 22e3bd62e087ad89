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

// netnl command-line tool.
//
//   netnl simulate --scenario NAME [--noise W] [--out FILE]
//   netnl classify --behavior FILE [--expect VERDICT ...] [--out FILE]
//   netnl selftest (--scenario NAME | --behavior FILE) [--tol T] [--out FILE]
//   netnl wiring   (--demo fritz|random | --wired FILE) [--seed S] [--count N] [--save FILE] [--out FILE]
//
// Exit status: 0 when every check passes, 1 when a declared expectation or verdict
// fails, 2 on usage or input errors. NETNL_CAP overrides the strategy and enumeration caps.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "netnl/behaviors.hpp"
#include "netnl/classical.hpp"
#include "netnl/quantum.hpp"
#include "netnl/selftest.hpp"
#include "netnl/wiring.hpp"

namespace {

using namespace netnl;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : Error {
  using Error::Error;
};

struct Caps {
  std::size_t strategies = classical::kDefaultStrategyCap;
  std::size_t assignments = wiring::kDefaultAssignmentCap;
};

Caps caps_from_env() {
  Caps caps;
  if (const char* env = std::getenv("NETNL_CAP")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used != std::string(env).size() || v == 0) throw std::invalid_argument("trailing characters");
      caps.strategies = caps.assignments = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw UsageError(std::string("NETNL_CAP must be a positive integer, got '") + env + "'");
    }
  }
  return caps;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text << "\n";
  if (!out) throw UsageError("write to '" + path + "' failed");
}

nlohmann::json parse_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Scenarios

/// "0.5pi" -> pi/2; plain numbers are radians.
double parse_angle(std::string text) {
  double scale = 1.0;
  if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    text.resize(text.size() - 2);
    if (text.empty()) text = "1";
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError("bad angle '" + text + "'");
  return v * scale;
}

std::vector<double> parse_angles(const std::string& list) {
  std::vector<double> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_angle(item));
  if (out.empty()) throw UsageError("empty angle list");
  return out;
}

/// "jordan:T1,T2;P1,P2" gives Alice's and Charlie's block angles; without ';' both parties
/// use the same list.
selftest::JordanFamily parse_jordan(const std::string& text) {
  const std::string body = text.substr(std::string("jordan:").size());
  const auto split = body.find(';');
  const auto thetas = parse_angles(body.substr(0, split));
  const auto phis = split == std::string::npos ? thetas : parse_angles(body.substr(split + 1));
  return selftest::JordanFamily::uniform(thetas, phis);
}

const char* kScenarioHelp =
    "reference | swap-event-ready | fritz | junk | commuting | jordan:T1,..;P1,.. (angles in radians, "
    "or with a 'pi' suffix such as 0.5pi)";

bool is_bilocality_scenario(const std::string& name) { return name != "fritz"; }

/// Quantum scenario by name. Bob never has an input in these scenarios.
quantum::NetworkScenario scenario_by_name(const std::string& name) {
  if (name == "reference") return quantum::reference_experiment();
  if (name == "swap-event-ready") return quantum::swap_event_ready_experiment();
  if (name == "fritz") return wiring::fritz_triangle();
  if (name == "junk") return selftest::junk_augmented_reference();
  if (name == "commuting") {
    return selftest::jordan_scenario(selftest::JordanFamily::uniform({std::numbers::pi}, {std::numbers::pi}));
  }
  if (name.rfind("jordan:", 0) == 0) return selftest::jordan_scenario(parse_jordan(name));
  throw UsageError("unknown scenario '" + name + "'; expected " + kScenarioHelp);
}

std::string fmt(double v, int digits = 8) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void print_summary(const NetworkBehavior& p) {
  std::cout << "parties:";
  for (const auto& s : p.parties()) std::cout << " " << s.name << "(" << s.inputs << " in, " << s.outputs << " out)";
  std::cout << "\n";
  if (p.party_count() == 3 && p.party(1).inputs == 1 && p.party(1).outputs == 4) {
    const auto b = marginal(p, {1}, {{0, 0}, {2, 0}});
    std::cout << "p(b):";
    for (std::size_t k = 0; k < 4; ++k) std::cout << " " << fmt(b.at({0}, {k}));
    std::cout << "\n";
  }
  if (p.party_count() == 3 && p.party(0).outputs == 2 && p.party(2).outputs == 2 && p.party(1).inputs == 1) {
    std::cout << "E(x,z | b):\n";
    for (std::size_t b = 0; b < p.party(1).outputs; ++b) {
      try {
        const auto c = condition_on_b(p, 0, b);
        std::cout << "  b=" << b << ":";
        for (std::size_t x = 0; x < p.party(0).inputs; ++x)
          for (std::size_t z = 0; z < p.party(2).inputs; ++z)
            std::cout << " E" << x << z << "=" << fmt(correlator2(c.behavior, x, z), 6);
        std::cout << "\n";
      } catch (const UndefinedConditionalError&) {
        std::cout << "  b=" << b << ": zero probability\n";
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Commands

int cmd_simulate(const std::string& scenario, double noise, const std::string& out) {
  if (noise < 0.0 || noise > 1.0) throw UsageError("--noise must lie in [0, 1]");
  const auto s = scenario_by_name(scenario);
  NetworkBehavior p = quantum::network_behavior(s);
  if (noise > 0.0) p = mix(p, uniform_behavior(p.parties()), 1.0 - noise);
  std::cout << "scenario: " << scenario << (noise > 0.0 ? " (noise " + fmt(noise, 4) + ")" : "") << "\n";
  print_summary(p);
  if (!out.empty()) {
    write_file(out, serialize(p));
    std::cout << "behavior written to " << out << "\n";
  } else {
    std::cout << serialize(p) << "\n";
  }
  return kExitOk;
}

struct Classification {
  nlohmann::json doc;
  bool bell_local = false;
  std::optional<double> s;
  std::optional<bool> wirable_compatible;
};

Classification classify(const NetworkBehavior& p, const Caps& caps) {
  Classification c;
  const auto cert = classical::is_bell_local(p, caps.strategies);
  c.bell_local = cert.feasible;
  c.doc["bell_local"] = classical::to_json(cert);
  const bool bilocal_shape = p.party_count() == 3 && p.party(0).inputs == 2 && p.party(0).outputs == 2 &&
                             p.party(1).inputs == 1 && p.party(1).outputs == 4 && p.party(2).inputs == 2 &&
                             p.party(2).outputs == 2;
  if (bilocal_shape) {
    const auto sc = classical::bilocality_score(p);
    c.s = sc.s;
    c.doc["bilocality"] = {{"I", sc.i}, {"J", sc.j}, {"S", sc.s}};
  }
  if (p.party_count() == 3) {
    const auto w = wiring::conditional_locality_witness(p, 1, caps.strategies);
    c.wirable_compatible = w.all_local();
    c.doc["conditional_witness"] = wiring::to_json(w);
  }
  const bool genuine = c.wirable_compatible && !*c.wirable_compatible && c.s && *c.s > 1.0 + 1e-9;
  c.doc["genuine_network_nonlocal_evidence"] = genuine;
  return c;
}

int cmd_classify(const std::string& path, const std::vector<std::string>& expect, const std::string& out,
                 const Caps& caps) {
  const auto p = behavior_from_json(parse_json(path));
  const auto c = classify(p, caps);
  std::cout << "local: " << (c.bell_local ? "yes" : "no") << "\n";
  if (c.s) {
    const auto& b = c.doc["bilocality"];
    std::cout << "bilocality: I = " << fmt(b["I"]) << ", J = " << fmt(b["J"]) << ", S = " << fmt(*c.s) << "\n";
  } else {
    std::cout << "bilocality: not applicable to this shape\n";
  }
  if (c.wirable_compatible) {
    std::cout << "conditionals on " << p.party(1).name << ":\n";
    for (const auto& e : c.doc["conditional_witness"]["conditionals"]) {
      std::cout << "  y=" << e["input"] << " b=" << e["outcome"] << " p=" << fmt(e["weight"], 6)
                << (e["local"].get<bool>() ? " local" : " NONLOCAL");
      if (e.contains("chsh")) std::cout << " CHSH=" << fmt(e["chsh"]);
      std::cout << "\n";
    }
    std::cout << "conditionals: " << (*c.wirable_compatible ? "all local" : "some nonlocal (not quantum-wirable)")
              << "\n";
  }
  const bool genuine = c.doc["genuine_network_nonlocal_evidence"].get<bool>();
  std::cout << "genuineness: " << (genuine ? "genuine network nonlocality evidenced" : "no genuineness evidence")
            << " (not wirable by witness and S > 1)\n";

  int status = kExitOk;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& token : expect) {
    std::optional<bool> ok;
    if (token == "bell-local") ok = c.bell_local;
    else if (token == "bell-nonlocal") ok = !c.bell_local;
    else if (token == "bilocal-compatible") ok = c.s && *c.s <= 1.0 + 1e-9;
    else if (token == "non-bilocal") ok = c.s && *c.s > 1.0 + 1e-9;
    else if (token == "wirable-compatible") ok = c.wirable_compatible && *c.wirable_compatible;
    else if (token == "not-wirable") ok = c.wirable_compatible && !*c.wirable_compatible;
    else if (token == "genuine") ok = genuine;
    else if (token == "not-genuine") ok = !genuine;
    else throw UsageError("unknown --expect verdict '" + token + "'");
    std::cout << "expect " << token << ": " << (*ok ? "ok" : "FAILED") << "\n";
    checks.push_back({{"verdict", token}, {"ok", *ok}});
    if (!*ok) status = kExitFailed;
  }
  if (!out.empty()) {
    nlohmann::json doc = c.doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = "classification_report";
    doc["expectations"] = checks;
    write_file(out, doc.dump(2));
  }
  return status;
}

int cmd_selftest(const std::string& scenario, const std::string& behavior, double tol, const std::string& out) {
  if (!(tol > 0.0)) throw UsageError("--tol must be positive");
  if (scenario.empty() == behavior.empty()) throw UsageError("selftest needs exactly one of --scenario, --behavior");
  selftest::SelfTestReport r;
  if (!scenario.empty()) {
    if (!is_bilocality_scenario(scenario)) throw UsageError("selftest applies to bilocality scenarios only");
    r = selftest::certify_theorem(scenario_by_name(scenario), tol);
  } else {
    r = selftest::verify_reference_correlations(behavior_from_json(parse_json(behavior)), tol);
  }
  std::cout << "p(b): " << fmt(r.bob_marginal[0]) << " " << fmt(r.bob_marginal[1]) << " " << fmt(r.bob_marginal[2])
            << " " << fmt(r.bob_marginal[3]) << "\n";
  std::cout << "max deviation: marginal " << r.bob_marginal_deviation << ", single-party " << r.single_party_deviation
            << ", correlators " << r.correlator_deviation << "\n";
  if (r.anticommutator_a) {
    std::cout << "anticommutator norms on support: A " << *r.anticommutator_a << ", C " << *r.anticommutator_c << "\n";
    std::cout << "extracted Bell fidelities:";
    for (double f : *r.fidelities) std::cout << " " << fmt(f, 10);
    std::cout << "\nPPT minima:";
    for (double m : *r.ppt_minima) std::cout << " " << fmt(m, 10);
    std::cout << "\n";
  }
  std::cout << "verdict: " << (r.pass() ? "pass" : "fail") << " (tol " << tol << ")\n";
  if (!out.empty()) write_file(out, selftest::to_json(r).dump(2));
  return r.pass() ? kExitOk : kExitFailed;
}

int cmd_wiring(const std::string& demo, const std::string& wired, std::uint64_t seed, std::size_t count,
               const std::string& save, const std::string& out, const Caps& caps) {
  if (demo.empty() == wired.empty()) throw UsageError("wiring needs exactly one of --demo, --wired");
  nlohmann::json report;
  report["format_version"] = kFormatVersion;
  report["kind"] = "wiring_report";
  int status = kExitOk;
  if (!wired.empty()) {
    wiring::WiredScenario w;
    try {
      w = wiring::wired_from_json(parse_json(wired));
    } catch (const ProgramError& e) {
      throw ParseError(wired + ": " + e.what());
    }
    const auto p = wiring::evaluate_wired(w, caps.assignments);
    print_summary(p);
    const auto witness = wiring::conditional_locality_witness(p, 1, caps.strategies);
    std::cout << "conditionals: " << (witness.all_local() ? "all local" : "some nonlocal") << "\n";
    report["behavior"] = to_json(p);
    report["conditional_witness"] = wiring::to_json(witness);
    if (!witness.all_local()) status = kExitFailed;
    if (!save.empty()) write_file(save, wiring::to_json(w).dump(2));
  } else if (demo == "fritz") {
    const auto w = wiring::fritz_wiring();
    const auto wired_p = wiring::evaluate_wired(w, caps.assignments);
    const auto quantum_p = wiring::fritz_behavior();
    const double gap = wired_p.max_abs_diff(quantum_p);
    const double chsh = classical::chsh(wiring::embedded_bc(quantum_p));
    const auto witness = wiring::conditional_locality_witness(wired_p, 1, caps.strategies);
    std::cout << "max elementwise gap (wired vs quantum triangle): " << gap << "\n";
    std::cout << "embedded CHSH of p(bc|yz): " << fmt(chsh) << "\n";
    std::cout << "conditionals of the wired behavior: " << (witness.all_local() ? "all local" : "some nonlocal")
              << "\n";
    report["max_gap"] = gap;
    report["embedded_chsh"] = chsh;
    report["conditional_witness"] = wiring::to_json(witness);
    if (gap > 1e-9 || std::abs(chsh - 2.0 * std::numbers::sqrt2) > 1e-9 || !witness.all_local()) status = kExitFailed;
    if (!save.empty()) write_file(save, wiring::to_json(w).dump(2));
  } else if (demo == "random") {
    if (count == 0) throw UsageError("--count must be positive");
    std::size_t failures = 0;
    double worst_signaling = 0.0;
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t k = 0; k < count; ++k) {
      const auto w = wiring::random_wired_scenario(seed + k);
      const auto p = wiring::evaluate_wired(w, caps.assignments);
      const auto witness = wiring::conditional_locality_witness(p, 1, caps.strategies);
      worst_signaling = std::max(worst_signaling, p.max_signaling());
      if (!witness.all_local()) ++failures;
      runs.push_back({{"seed", seed + k}, {"all_local", witness.all_local()}, {"max_chsh", witness.max_chsh()}});
      if (k == 0 && !save.empty()) write_file(save, wiring::to_json(w).dump(2));
    }
    std::cout << count << " random wired scenarios (seeds " << seed << ".." << seed + count - 1 << "): " << failures
              << " with a nonlocal conditional; max signaling " << worst_signaling << "\n";
    report["runs"] = runs;
    report["failures"] = failures;
    if (failures > 0) status = kExitFailed;
  } else {
    throw UsageError("unknown demo '" + demo + "'; expected fritz or random");
  }
  report["ok"] = status == kExitOk;
  if (!out.empty()) write_file(out, report.dump(2));
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum network nonlocality: simulation, classification and self-testing"};
  app.require_subcommand(1);

  std::string scenario, behavior, out, demo, wired, save;
  std::vector<std::string> expect;
  double noise = 0.0, tol = selftest::kDefaultTol;
  std::uint64_t seed = 1;
  std::size_t count = 100;

  auto* sim = app.add_subcommand("simulate", "Evaluate a quantum network scenario and write its behavior");
  sim->add_option("--scenario", scenario, kScenarioHelp)->required();
  sim->add_option("--noise", noise, "Weight of uniform noise mixed into the behavior");
  sim->add_option("--out", out, "Behavior document path (default: standard output)");

  auto* cls = app.add_subcommand("classify", "Classify a behavior against classical and wirable models");
  cls->add_option("--behavior", behavior, "Behavior document")->required();
  cls->add_option("--expect", expect,
                  "Expected verdicts: bell-local, bell-nonlocal, bilocal-compatible, non-bilocal, "
                  "wirable-compatible, not-wirable, genuine, not-genuine");
  cls->add_option("--out", out, "Report path");

  auto* st = app.add_subcommand("selftest", "Check the self-testing conclusions");
  st->add_option("--scenario", scenario, kScenarioHelp);
  st->add_option("--behavior", behavior, "Behavior document (correlation checks only)");
  st->add_option("--tol", tol, "Tolerance (default 1e-9)");
  st->add_option("--out", out, "Report path");

  auto* wr = app.add_subcommand("wiring", "Wired-scenario demos and replay");
  wr->add_option("--demo", demo, "fritz | random");
  wr->add_option("--wired", wired, "Wired scenario document to evaluate");
  wr->add_option("--seed", seed, "First seed for random scenarios");
  wr->add_option("--count", count, "Number of random scenarios");
  wr->add_option("--save", save, "Write the (first) wired scenario document here");
  wr->add_option("--out", out, "Report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Caps caps = caps_from_env();
    if (*sim) return cmd_simulate(scenario, noise, out);
    if (*cls) return cmd_classify(behavior, expect, out, caps);
    if (*st) return cmd_selftest(scenario, behavior, tol, out);
    if (*wr) return cmd_wiring(demo, wired, seed, count, save, out, caps);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << " (raise NETNL_CAP to allow more)\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
