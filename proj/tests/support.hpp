#ifndef CPSR_TESTS_SUPPORT_HPP
#define CPSR_TESTS_SUPPORT_HPP

// Fixtures, random generators and brute-force oracles shared by the unit
// tests and the acceptance runner. The oracles restate the definitions
// directly and share no code with the engine's search routines.

#include "cpsr/concern_eval.hpp"
#include "cpsr/theory.hpp"
#include "cpsr/theory_io.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace cpsr::testing {

inline std::string fixture_path(const std::string& name) { return std::string(CPSR_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Theory load_fixture(const std::string& name) { return load_theory(read_fixture(name)); }

inline State state_with(const Theory& t, const std::set<std::string>& true_atoms) {
  State s(t.fluent_count());
  for (const auto& a : true_atoms) s.set(*t.find_fluent(a), true);
  return s;
}

inline std::set<std::string> atoms_of(const Theory& t, const State& s) {
  auto v = t.true_atoms(s);
  return {v.begin(), v.end()};
}

// ---------------------------------------------------------------------------
// Transition oracle.

using OracleLits = std::set<std::pair<FluentIndex, bool>>;

inline bool oracle_body(const OracleLits& set, const std::vector<Lit>& body) {
  for (auto l : body) {
    if (!set.count({l.fluent, l.positive})) return false;
  }
  return true;
}

inline bool oracle_is_state(const State& s, const std::vector<CompiledLaw>& laws) {
  for (const auto& law : laws) {
    bool body = true;
    for (auto l : law.body) body = body && (s[l.fluent] == l.positive);
    if (!body) continue;
    int heads = 0;
    for (auto l : law.heads) heads += s[l.fluent] == l.positive;
    if (heads != 1) return false;
  }
  return true;
}

// Least set containing u closed under the laws, where a triggered law with
// several heads contributes the head true in `target` and the negation of
// the others. nullopt if inconsistent.
inline std::optional<OracleLits> oracle_closure(OracleLits u, const std::vector<CompiledLaw>& laws,
                                                const State& target) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& law : laws) {
      if (!oracle_body(u, law.body)) continue;
      for (auto h : law.heads) {
        bool chosen = law.heads.size() == 1 || target[h.fluent] == h.positive;
        std::pair<FluentIndex, bool> lit{h.fluent, chosen ? h.positive : !h.positive};
        if (u.insert(lit).second) changed = true;
      }
    }
  }
  for (const auto& [f, v] : u) {
    if (u.count({f, !v})) return std::nullopt;
  }
  return u;
}

inline State decode(std::size_t n, std::uint64_t bits) {
  State s(n);
  for (std::size_t f = 0; f < n; ++f) s.set(static_cast<FluentIndex>(f), (bits >> (n - 1 - f)) & 1U);
  return s;
}

inline std::vector<State> oracle_states(const Dynamics& d) {
  std::vector<State> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << d.fluent_count); ++bits) {
    auto s = decode(d.fluent_count, bits);
    if (oracle_is_state(s, d.laws)) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Phi(a,s) by testing every total assignment against the fixpoint equation.
inline std::vector<State> oracle_step(const Dynamics& d, std::size_t action, const State& s) {
  const auto& a = d.actions[action];
  bool exec = a.executable_if.empty();
  for (const auto& cond : a.executable_if) {
    bool all = true;
    for (auto l : cond) all = all && s[l.fluent] == l.positive;
    exec = exec || all;
  }
  if (!exec) return {};
  OracleLits e;
  for (const auto& c : a.causes) {
    bool all = true;
    for (auto l : c.conditions) all = all && s[l.fluent] == l.positive;
    if (all) e.insert({c.effect.fluent, c.effect.positive});
  }
  std::vector<State> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << d.fluent_count); ++bits) {
    auto next = decode(d.fluent_count, bits);
    if (!oracle_is_state(next, d.laws)) continue;
    OracleLits base = e;
    for (std::size_t f = 0; f < d.fluent_count; ++f) {
      if (s[f] == next[f]) base.insert({static_cast<FluentIndex>(f), s[f]});
    }
    auto closed = oracle_closure(base, d.laws, next);
    if (!closed || closed->size() != d.fluent_count) continue;
    bool equal = true;
    for (const auto& [f, v] : *closed) equal = equal && next[f] == v;
    if (equal) out.push_back(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Phi-hat on top of oracle_step.
inline std::vector<State> oracle_run(const Dynamics& d, const std::vector<std::size_t>& plan, const State& s) {
  std::set<State> frontier{s};
  for (auto a : plan) {
    std::set<State> next;
    for (const auto& u : frontier) {
      auto succ = oracle_step(d, a, u);
      if (succ.empty()) return {};
      next.insert(succ.begin(), succ.end());
    }
    frontier = std::move(next);
  }
  return {frontier.begin(), frontier.end()};
}

// ---------------------------------------------------------------------------
// Random dynamic systems: up to `max_fluents` fluents, 1..5 actions, up to 4
// static laws of which exactly one is disjunctive.

inline Lit random_lit(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> f(0, n - 1);
  std::bernoulli_distribution sign(0.5);
  return {static_cast<FluentIndex>(f(rng)), sign(rng)};
}

inline std::vector<Lit> random_lits(std::mt19937& rng, std::size_t n, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::vector<Lit> out;
  std::set<FluentIndex> used;
  for (std::size_t i = len(rng); i > 0; --i) {
    auto l = random_lit(rng, n);
    if (used.insert(l.fluent).second) out.push_back(l);
  }
  return out;
}

inline Dynamics random_dynamics(std::mt19937& rng, std::size_t max_fluents = 10) {
  Dynamics d;
  d.fluent_count = std::uniform_int_distribution<std::size_t>(3, max_fluents)(rng);
  const auto n = d.fluent_count;
  std::size_t laws = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
  for (std::size_t i = 0; i < laws; ++i) {
    CompiledLaw law;
    if (i == 0) {
      std::size_t heads = std::uniform_int_distribution<std::size_t>(2, 3)(rng);
      std::set<FluentIndex> used;
      while (law.heads.size() < heads) {
        auto l = random_lit(rng, n);
        if (used.insert(l.fluent).second) law.heads.push_back(l);
      }
      for (auto l : random_lits(rng, n, 2)) {
        if (!used.count(l.fluent)) law.body.push_back(l);
      }
    } else {
      law.heads.push_back(random_lit(rng, n));
      for (auto l : random_lits(rng, n, 2)) {
        if (l.fluent != law.heads.front().fluent) law.body.push_back(l);
      }
    }
    d.laws.push_back(std::move(law));
  }
  std::size_t actions = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
  for (std::size_t i = 0; i < actions; ++i) {
    CompiledAction a;
    a.id = "a" + std::to_string(i);
    if (std::bernoulli_distribution(0.5)(rng)) a.executable_if.push_back(random_lits(rng, n, 2));
    std::size_t causes = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    for (std::size_t k = 0; k < causes; ++k) a.causes.push_back({random_lit(rng, n), random_lits(rng, n, 1)});
    d.actions.push_back(std::move(a));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Random static theories (no actions, no laws) for the ranking and LoS
// properties. Every assignment is a state.

inline CpsTheory random_static_theory(std::mt19937& rng, std::size_t max_components = 6) {
  CpsTheory t;
  std::uniform_int_distribution<std::size_t> concerns_n(1, 7), props_n(1, 6), comps_n(1, max_components);
  std::bernoulli_distribution coin(0.5), often(0.7);
  const std::size_t nc = concerns_n(rng);
  for (std::size_t i = 0; i < nc; ++i) t.ontology.concerns.push_back({"c" + std::to_string(i), false, {}});
  for (std::size_t i = 1; i < nc; ++i) {
    if (coin(rng)) {
      auto parent = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
      t.ontology.concerns[parent].subconcerns.push_back(t.ontology.concerns[i].id);
    }
  }
  std::set<std::string> children;
  for (const auto& c : t.ontology.concerns) children.insert(c.subconcerns.begin(), c.subconcerns.end());
  for (auto& c : t.ontology.concerns) c.is_aspect = !children.count(c.id) && coin(rng);

  const std::size_t np = props_n(rng);
  std::vector<std::string> props;
  for (std::size_t i = 0; i < np; ++i) props.push_back("p" + std::to_string(i));
  t.ontology.properties = {props.begin(), props.end()};
  for (const auto& c : t.ontology.concerns) {
    for (const auto& p : props) {
      if (coin(rng)) {
        t.ontology.addressed_by[c.id].insert(p);
        if (coin(rng)) t.ontology.positive_impact.emplace(p, c.id);
      }
    }
  }
  const std::size_t ncomp = comps_n(rng);
  for (std::size_t i = 0; i < ncomp; ++i) {
    auto& rel = t.system.components["x" + std::to_string(i)];
    for (const auto& p : props) {
      if (coin(rng)) rel.insert(p);
    }
  }
  for (const auto& c : t.ontology.concerns) {
    if (!coin(rng)) continue;
    auto it = t.ontology.addressed_by.find(c.id);
    if (it == t.ontology.addressed_by.end()) continue;
    std::vector<Formula> parts;
    for (const auto& p : it->second) {
      if (coin(rng)) parts.push_back(coin(rng) ? Formula::make_atom(p) : Formula::make_not(Formula::make_atom(p)));
    }
    t.system.gamma.push_back({c.id, "f", coin(rng) ? Formula::make_or(parts) : Formula::make_and(parts)});
  }
  for (const auto& atom : fluent_universe(t)) {
    (often(rng) ? t.initial.true_atoms : t.initial.false_atoms).insert(atom);
  }
  return t;
}

inline State random_state(std::mt19937& rng, std::size_t n) {
  State s(n);
  std::bernoulli_distribution coin(0.6);
  for (std::size_t f = 0; f < n; ++f) s.set(static_cast<FluentIndex>(f), coin(rng));
  return s;
}

// ---------------------------------------------------------------------------
// Trust oracle: counts (c,p) pairs for which some descendant-or-self concern
// c0 has a direct positive (resp. non-positive) pair (x,p,c0).

struct PairCounts {
  std::int64_t pos = 0;
  std::int64_t npos = 0;
};

inline std::map<std::string, PairCounts> oracle_trust_pairs(const Theory& t, const State& s, EvaluationMode mode) {
  const auto& src = t.source();
  ConcernEvaluator eval(t, mode);
  auto descends = [&](const std::string& c0, const std::string& c) {
    for (std::optional<std::size_t> cur = t.require_concern(c0); cur; cur = t.concerns()[*cur].parent) {
      if (t.concerns()[*cur].id == c) return true;
    }
    return false;
  };
  std::map<std::string, PairCounts> out;
  for (const auto& [x, props] : src.system.components) {
    auto& counts = out[x];
    for (const auto& c : src.ontology.concerns) {
      for (const auto& p : src.ontology.properties) {
        bool pos = false, npos = false;
        for (const auto& c0 : src.ontology.concerns) {
          if (!descends(c0.id, c.id)) continue;
          auto ab = src.ontology.addressed_by.find(c0.id);
          bool r = props.count(p) && s[*t.find_fluent(active_atom(x, p))] && s[*t.find_fluent(p)] &&
                   ab != src.ontology.addressed_by.end() && ab->second.count(p);
          if (!r) continue;
          bool good = src.ontology.positive_impact.count({p, c0.id}) && eval.satisfied(t.require_concern(c0.id), s);
          (good ? pos : npos) = true;
        }
        counts.pos += pos;
        counts.npos += npos;
      }
    }
  }
  return out;
}

}  // namespace cpsr::testing

#endif  // CPSR_TESTS_SUPPORT_HPP
