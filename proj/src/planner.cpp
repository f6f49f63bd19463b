#include "cpsr/planner.hpp"

#include <algorithm>
#include <set>

namespace cpsr {

namespace {

class Budget {
 public:
  explicit Budget(std::size_t limit) : limit_(limit) {}

  void spend() {
    if (++used_ > limit_) {
      throw Error(ErrorCode::BudgetExceeded, "search exceeded the budget of " + std::to_string(limit_) + " nodes");
    }
  }

 private:
  std::size_t limit_;
  std::size_t used_ = 0;
};

// Successor frontier of every state in `frontier`; empty if any branch dies.
std::vector<State> advance(Stepper& stepper, std::size_t action, const std::vector<State>& frontier) {
  std::vector<State> next;
  for (const auto& u : frontier) {
    const auto& succ = stepper.step(action, u);
    if (succ.empty()) return {};
    next.insert(next.end(), succ.begin(), succ.end());
  }
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());
  return next;
}

std::vector<std::size_t> concern_indices(const Theory& t, const std::vector<std::string>& ids) {
  std::vector<std::size_t> out;
  for (const auto& id : ids) out.push_back(t.require_concern(id));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<Plan> find_mitigations(const Theory& t, const State& start, const std::vector<std::string>& sigma,
                                   EvaluationMode mode, const MitigationOptions& options) {
  if (options.horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be at least 1");
  auto goal = concern_indices(t, sigma);
  ConcernEvaluator eval(t, mode);
  Stepper stepper(t.dynamics());
  Budget budget(options.budget);
  const auto& actions = t.actions();

  auto achieves = [&](const std::vector<State>& frontier) {
    return std::all_of(frontier.begin(), frontier.end(), [&](const State& s) {
      return std::all_of(goal.begin(), goal.end(), [&](std::size_t c) { return eval.satisfied(c, s); });
    });
  };

  std::vector<Plan> out;
  std::vector<std::string> prefix;
  auto dfs = [&](auto&& self, const std::vector<State>& frontier) -> void {
    for (std::size_t a = 0; a < actions.size(); ++a) {
      budget.spend();
      auto next = advance(stepper, a, frontier);
      if (next.empty()) continue;
      prefix.push_back(actions[a].id);
      bool done = achieves(next);
      if (done && (!options.exact_length || prefix.size() == options.horizon)) out.push_back({prefix, next});
      if (!(done && options.minimal) && prefix.size() < options.horizon) self(self, next);
      prefix.pop_back();
    }
  };
  dfs(dfs, std::vector<State>{start});

  std::stable_sort(out.begin(), out.end(), [](const Plan& a, const Plan& b) {
    if (a.length() != b.length()) return a.length() < b.length();
    return a.actions < b.actions;
  });
  return out;
}

Rational success_probability(const CompiledAction& a, const State& s) {
  for (const auto& entry : a.success) {
    if (s.holds_all(entry.conditions)) return entry.p;
  }
  return Rational(1);
}

Rational plan_success_probability(const Theory& t, const std::vector<std::string>& plan, const State& start) {
  std::vector<std::size_t> ids;
  for (const auto& a : plan) ids.push_back(t.require_action(a));
  Stepper stepper(t.dynamics());

  // Distinct per-branch products from step i onwards.
  auto products = [&](auto&& self, std::size_t i, const State& s) -> std::set<Rational> {
    if (i == ids.size()) return {Rational(1)};
    const auto& succ = stepper.step(ids[i], s);
    if (succ.empty()) {
      throw Error(ErrorCode::NotExecutable, "action '" + plan[i] + "' cannot be executed at step " + std::to_string(i));
    }
    Rational pr = success_probability(t.actions()[ids[i]], s);
    std::set<Rational> out;
    for (const auto& next : succ) {
      for (const auto& rest : self(self, i + 1, next)) out.insert(pr * rest);
    }
    return out;
  };
  auto all = products(products, 0, start);
  if (all.size() > 1) {
    throw Error(ErrorCode::BranchAmbiguous, "branches of the plan succeed with different probabilities");
  }
  return *all.begin();
}

std::string_view to_string(PreferencePolicy::Kind kind) {
  switch (kind) {
    case PreferencePolicy::Kind::Weighted: return "weighted";
    case PreferencePolicy::Kind::Lexicographic: return "lexicographic";
    case PreferencePolicy::Kind::MaxProbability: return "max_probability";
  }
  return "weighted";
}

Selection select_preferred(const Theory& t, const std::vector<Plan>& plans, const PreferencePolicy& policy,
                           const State& start) {
  using Kind = PreferencePolicy::Kind;
  if (policy.kind == Kind::Weighted) check_weights(t, policy.weights);
  if (policy.kind == Kind::Lexicographic) check_priority(t, policy.priority);

  LosCalculator calc(t);
  Selection sel;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    PlanScore score;
    score.plan = i;
    switch (policy.kind) {
      case Kind::Weighted:
        for (const auto& s : plans[i].final_states) {
          auto w = weighted_los(t, calc.entries(s), policy.weights);
          if (!score.value || *score.value < w) score.value = w;
        }
        break;
      case Kind::Lexicographic:
        for (std::size_t k = 0; k < plans[i].final_states.size(); ++k) {
          auto v = los_vector(t, calc.entries(plans[i].final_states[k]), policy.priority);
          if (k == 0 || score.vector < v) score.vector = std::move(v);
        }
        break;
      case Kind::MaxProbability:
        try {
          score.value = plan_success_probability(t, plans[i].actions, start);
        } catch (const Error& e) {
          score.error = std::string(to_string(e.code()));
        }
        break;
    }
    sel.scoreboard.push_back(std::move(score));
  }

  auto better = [&](const PlanScore& a, const PlanScore& b) {
    if (policy.kind == Kind::Lexicographic) return b.vector < a.vector;
    return *b.value < *a.value;
  };
  auto same = [&](const PlanScore& a, const PlanScore& b) {
    if (policy.kind == Kind::Lexicographic) return a.vector == b.vector;
    return *a.value == *b.value;
  };
  const PlanScore* top = nullptr;
  for (const auto& sc : sel.scoreboard) {
    if (sc.error || (policy.kind != Kind::Lexicographic && !sc.value)) continue;
    if (!top || better(sc, *top)) top = &sc;
  }
  if (top) {
    for (const auto& sc : sel.scoreboard) {
      if (!sc.error && (policy.kind == Kind::Lexicographic || sc.value) && same(sc, *top)) sel.best.push_back(sc.plan);
    }
  }
  return sel;
}

std::string_view to_string(NoncomplianceMode mode) { return mode == NoncomplianceMode::Weak ? "weak" : "strong"; }

NoncomplianceReport detect_noncompliance(const Theory& t, const std::vector<std::string>& sa,
                                         const std::vector<std::string>& sc, std::size_t n,
                                         NoncomplianceMode mode, EvaluationMode eval_mode,
                                         const NoncomplianceOptions& options) {
  std::vector<std::size_t> actions;
  for (const auto& a : sa) actions.push_back(t.require_action(a));
  std::sort(actions.begin(), actions.end());
  actions.erase(std::unique(actions.begin(), actions.end()), actions.end());
  auto concerns = concern_indices(t, sc);

  const auto states = enumerate_states(t.dynamics(), options.state_bound);
  ConcernEvaluator eval(t, eval_mode);
  Stepper stepper(t.dynamics());
  Budget budget(options.budget);

  auto first_violation = [&](const std::vector<State>& frontier) -> std::optional<std::size_t> {
    for (auto c : concerns) {
      for (const auto& s : frontier) {
        if (!eval.satisfied(c, s)) return c;
      }
    }
    return std::nullopt;
  };

  std::optional<NoncomplianceWitness> preferred;  // compliant start, non-empty plan
  std::optional<NoncomplianceWitness> violation;
  std::optional<NoncomplianceWitness> compliant;

  auto done = [&] {
    return mode == NoncomplianceMode::Weak ? preferred.has_value() : compliant.has_value();
  };

  std::vector<std::size_t> plan;
  for (const auto& init : states) {
    const bool start_ok = !first_violation({init});
    for (std::size_t len = 0; len <= n && !done(); ++len) {
      // Sequences of exactly `len` actions, in lexicographic order.
      auto dfs = [&](auto&& self, const std::vector<State>& frontier) -> void {
        if (done()) return;
        if (plan.size() == len) {
          auto bad = first_violation(frontier);
          NoncomplianceWitness w{init, {}, std::nullopt};
          for (auto a : plan) w.plan.push_back(t.actions()[a].id);
          if (bad) {
            w.violated = t.concerns()[*bad].id;
            if (!violation) violation = w;
            if (!preferred && start_ok && len > 0) preferred = w;
          } else if (!compliant) {
            compliant = w;
          }
          return;
        }
        for (auto a : actions) {
          budget.spend();
          auto next = advance(stepper, a, frontier);
          if (next.empty()) continue;
          plan.push_back(a);
          self(self, next);
          plan.pop_back();
        }
      };
      dfs(dfs, std::vector<State>{init});
    }
    if (done()) break;
  }

  NoncomplianceReport report;
  report.mode = mode;
  report.horizon = n;
  if (mode == NoncomplianceMode::Weak) {
    report.verdict = violation.has_value();
    report.witness = preferred ? preferred : violation;
  } else {
    report.verdict = !compliant && violation;
    report.witness = compliant ? compliant : violation;
  }
  return report;
}

}  // namespace cpsr
