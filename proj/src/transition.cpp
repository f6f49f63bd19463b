#include "cpsr/transition.hpp"

#include <algorithm>
#include <cstdint>

namespace cpsr {

namespace {

// Partial assignment: -1 unknown, 0 false, 1 true.
using Partial = std::vector<std::int8_t>;

bool holds(const Partial& p, Lit l) { return p[l.fluent] == static_cast<std::int8_t>(l.positive); }

bool holds_all(const Partial& p, const std::vector<Lit>& ls) {
  return std::all_of(ls.begin(), ls.end(), [&](Lit l) { return holds(p, l); });
}

// Sets l; false on conflict.
bool assign(Partial& p, Lit l, bool& changed) {
  auto v = static_cast<std::int8_t>(l.positive);
  if (p[l.fluent] == v) return true;
  if (p[l.fluent] != -1) return false;
  p[l.fluent] = v;
  changed = true;
  return true;
}

// Forward chaining. `choice[i]` is the selected head of disjunctive law i or
// -1 to skip it. False on inconsistency.
bool chain(Partial& p, const std::vector<CompiledLaw>& laws, const std::vector<int>& choice) {
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < laws.size(); ++i) {
      const auto& law = laws[i];
      if (!holds_all(p, law.body)) continue;
      if (!law.disjunctive()) {
        if (!assign(p, law.heads.front(), changed)) return false;
        continue;
      }
      if (choice[i] < 0) continue;
      for (std::size_t h = 0; h < law.heads.size(); ++h) {
        Lit l = static_cast<int>(h) == choice[i] ? law.heads[h] : law.heads[h].negated();
        if (!assign(p, l, changed)) return false;
      }
    }
  }
  return true;
}

void branch_closure(Partial p, std::vector<int> choice, const std::vector<CompiledLaw>& laws,
                    std::vector<Partial>& out) {
  if (!chain(p, laws, choice)) return;
  for (std::size_t i = 0; i < laws.size(); ++i) {
    if (!laws[i].disjunctive() || choice[i] >= 0 || !holds_all(p, laws[i].body)) continue;
    for (std::size_t h = 0; h < laws[i].heads.size(); ++h) {
      auto next = choice;
      next[i] = static_cast<int>(h);
      branch_closure(p, std::move(next), laws, out);
    }
    return;
  }
  out.push_back(std::move(p));
}

std::size_t max_fluent(const std::vector<CompiledLaw>& laws) {
  std::size_t n = 0;
  for (const auto& law : laws) {
    for (auto l : law.heads) n = std::max<std::size_t>(n, l.fluent + 1);
    for (auto l : law.body) n = std::max<std::size_t>(n, l.fluent + 1);
  }
  return n;
}

bool law_ok(const State& s, const CompiledLaw& law) {
  if (!s.holds_all(law.body)) return true;
  return std::count_if(law.heads.begin(), law.heads.end(), [&](Lit l) { return s.holds(l); }) == 1;
}

void sort_unique(std::vector<State>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

class Successors {
 public:
  Successors(const Dynamics& d, const State& s, const Partial& effects)
      : d_(d), s_(s), effects_(effects), n_(d.fluent_count), val_(effects), kept_(n_, false) {
    for (FluentIndex f = 0; f < n_; ++f) {
      if (effects_[f] == -1) {
        free_.push_back(f);
      } else if (effects_[f] == static_cast<std::int8_t>(s[f])) {
        kept_[f] = true;
      }
    }
  }

  std::vector<State> run() {
    search(0);
    sort_unique(out_);
    return std::move(out_);
  }

 private:
  // e ∪ kept literals as a partial assignment.
  Partial base() const {
    Partial p = effects_;
    for (FluentIndex f = 0; f < n_; ++f) {
      if (kept_[f]) p[f] = static_cast<std::int8_t>(s_[f]);
    }
    return p;
  }

  bool viable(std::size_t decided) const {
    // Lower bound: single-head consequences must agree with every decision.
    Partial lower = base();
    std::vector<int> skip(d_.laws.size(), -1);
    if (!chain(lower, d_.laws, skip)) return false;
    for (FluentIndex f = 0; f < n_; ++f) {
      if (lower[f] != -1 && val_[f] != -1 && lower[f] != val_[f]) return false;
    }
    // Upper bound: every flipped literal must be derivable from e, kept
    // literals and the still-undecided literals of s.
    std::vector<char> pos(n_, 0), neg(n_, 0);
    auto add = [&](Lit l, bool& changed) {
      auto& slot = l.positive ? pos[l.fluent] : neg[l.fluent];
      if (!slot) {
        slot = 1;
        changed = true;
      }
    };
    bool unused = false;
    for (FluentIndex f = 0; f < n_; ++f) {
      if (effects_[f] != -1) add({f, effects_[f] == 1}, unused);
      if (kept_[f]) add({f, s_[f]}, unused);
    }
    for (std::size_t i = decided; i < free_.size(); ++i) add({free_[i], s_[free_[i]]}, unused);
    auto has = [&](Lit l) { return (l.positive ? pos[l.fluent] : neg[l.fluent]) != 0; };
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& law : d_.laws) {
        if (!std::all_of(law.body.begin(), law.body.end(), has)) continue;
        for (auto h : law.heads) {
          add(h, changed);
          if (law.disjunctive()) add(h.negated(), changed);
        }
      }
    }
    for (std::size_t i = 0; i < decided; ++i) {
      FluentIndex f = free_[i];
      if (!kept_[f] && !has({f, !s_[f]})) return false;
    }
    return true;
  }

  void search(std::size_t i) {
    if (!viable(i)) return;
    if (i == free_.size()) {
      verify();
      return;
    }
    FluentIndex f = free_[i];
    for (bool keep : {true, false}) {
      kept_[f] = keep;
      val_[f] = static_cast<std::int8_t>(keep ? s_[f] : !s_[f]);
      search(i + 1);
    }
    kept_[f] = false;
    val_[f] = -1;
  }

  void verify() {
    State next(n_);
    for (FluentIndex f = 0; f < n_; ++f) next.set(f, val_[f] == 1);
    std::vector<int> choice(d_.laws.size(), -1);
    for (std::size_t i = 0; i < d_.laws.size(); ++i) {
      const auto& law = d_.laws[i];
      if (!law_ok(next, law)) return;
      if (!law.disjunctive() || !next.holds_all(law.body)) continue;
      for (std::size_t h = 0; h < law.heads.size(); ++h) {
        if (next.holds(law.heads[h])) choice[i] = static_cast<int>(h);
      }
    }
    Partial closed = base();
    if (!chain(closed, d_.laws, choice)) return;
    for (FluentIndex f = 0; f < n_; ++f) {
      if (closed[f] != val_[f]) return;
    }
    out_.push_back(std::move(next));
  }

  const Dynamics& d_;
  const State& s_;
  const Partial& effects_;
  std::size_t n_;
  Partial val_;
  std::vector<bool> kept_;
  std::vector<FluentIndex> free_;
  std::vector<State> out_;
};

}  // namespace

std::vector<LiteralSet> closure(const LiteralSet& u, const std::vector<CompiledLaw>& laws) {
  std::size_t n = max_fluent(laws);
  for (auto l : u) n = std::max<std::size_t>(n, l.fluent + 1);
  Partial p(n, -1);
  bool unused = false;
  for (auto l : u) {
    if (!assign(p, l, unused)) return {};
  }
  std::vector<Partial> found;
  branch_closure(p, std::vector<int>(laws.size(), -1), laws, found);

  std::vector<LiteralSet> sets;
  for (const auto& q : found) {
    LiteralSet s;
    for (FluentIndex f = 0; f < n; ++f) {
      if (q[f] != -1) s.insert({f, q[f] == 1});
    }
    sets.push_back(std::move(s));
  }
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::vector<LiteralSet> minimal;
  for (const auto& s : sets) {
    bool dominated = std::any_of(sets.begin(), sets.end(), [&](const LiteralSet& o) {
      return o.size() < s.size() && std::includes(s.begin(), s.end(), o.begin(), o.end());
    });
    if (!dominated) minimal.push_back(s);
  }
  return minimal;
}

bool is_state(const State& s, const std::vector<CompiledLaw>& laws) {
  return std::all_of(laws.begin(), laws.end(), [&](const CompiledLaw& law) { return law_ok(s, law); });
}

bool executable_in(const CompiledAction& a, const State& s) {
  if (a.executable_if.empty()) return true;
  return std::any_of(a.executable_if.begin(), a.executable_if.end(),
                     [&](const std::vector<Lit>& cond) { return s.holds_all(cond); });
}

bool executable_in(const Theory& t, std::string_view action, const State& s) {
  return executable_in(t.actions()[t.require_action(action)], s);
}

std::vector<Lit> direct_effects(const CompiledAction& a, const State& s) {
  std::vector<Lit> e;
  for (const auto& c : a.causes) {
    if (s.holds_all(c.conditions)) e.push_back(c.effect);
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

std::vector<State> step(const Dynamics& d, std::size_t action, const State& s) {
  const auto& a = d.actions.at(action);
  if (!executable_in(a, s)) return {};
  Partial effects(d.fluent_count, -1);
  bool unused = false;
  for (auto l : direct_effects(a, s)) {
    if (!assign(effects, l, unused)) return {};
  }
  return Successors(d, s, effects).run();
}

std::vector<State> step(const Theory& t, std::string_view action, const State& s) {
  return step(t.dynamics(), t.require_action(action), s);
}

std::vector<State> run(const Dynamics& d, const std::vector<std::size_t>& plan, const State& s) {
  std::vector<State> frontier{s};
  for (auto a : plan) {
    std::vector<State> next;
    for (const auto& u : frontier) {
      auto succ = step(d, a, u);
      if (succ.empty()) return {};
      next.insert(next.end(), succ.begin(), succ.end());
    }
    sort_unique(next);
    frontier = std::move(next);
  }
  return frontier;
}

std::vector<State> run(const Theory& t, const std::vector<std::string>& plan, const State& s) {
  std::vector<std::size_t> ids;
  for (const auto& a : plan) ids.push_back(t.require_action(a));
  return run(t.dynamics(), ids, s);
}

std::vector<State> enumerate_states(const Dynamics& d, std::size_t bound) {
  const std::size_t n = d.fluent_count;
  if (n > bound) {
    throw Error(ErrorCode::UniverseTooLarge,
                std::to_string(n) + " fluents exceed the state enumeration bound of " + std::to_string(bound));
  }
  // Laws are checked as soon as their last fluent is assigned.
  std::vector<std::vector<const CompiledLaw*>> due(n + 1);
  for (const auto& law : d.laws) {
    std::size_t last = 0;
    for (auto l : law.heads) last = std::max<std::size_t>(last, l.fluent);
    for (auto l : law.body) last = std::max<std::size_t>(last, l.fluent);
    due[last].push_back(&law);
  }
  std::vector<State> out;
  State s(n);
  auto rec = [&](auto&& self, std::size_t f) -> void {
    if (f == n) {
      out.push_back(s);
      return;
    }
    for (bool v : {false, true}) {
      s.set(static_cast<FluentIndex>(f), v);
      bool ok = std::all_of(due[f].begin(), due[f].end(), [&](const CompiledLaw* law) { return law_ok(s, *law); });
      if (ok) self(self, f + 1);
    }
    s.set(static_cast<FluentIndex>(f), false);
  };
  if (n == 0) {
    out.push_back(s);
  } else {
    rec(rec, 0);
  }
  return out;
}

const std::vector<State>& Stepper::step(std::size_t action, const State& s) {
  Key key{action, s};
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  auto result = cpsr::step(d_, action, s);
  return memo_.emplace(std::move(key), std::move(result)).first->second;
}

}  // namespace cpsr
