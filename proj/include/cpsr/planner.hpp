#ifndef CPSR_PLANNER_HPP
#define CPSR_PLANNER_HPP

#include "cpsr/concern_eval.hpp"
#include "cpsr/los_metrics.hpp"
#include "cpsr/transition.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cpsr {

struct Plan {
  std::vector<std::string> actions;
  std::vector<State> final_states;

  [[nodiscard]] std::size_t length() const { return actions.size(); }
  friend bool operator==(const Plan&, const Plan&) = default;
};

inline constexpr std::size_t kDefaultNodeBudget = 1'000'000;

struct MitigationOptions {
  std::size_t horizon = 1;
  /// Drop plans that extend a plan already achieving the goal.
  bool minimal = false;
  /// Only report plans of length exactly `horizon`.
  bool exact_length = false;
  std::size_t budget = kDefaultNodeBudget;
};

/// Plans of length 1..horizon whose execution from `start` reaches only
/// states satisfying every concern in `sigma`. Ordered by length, then by
/// action ids. Throws Error(BudgetExceeded) past `budget` expanded nodes.
std::vector<Plan> find_mitigations(const Theory& t, const State& start, const std::vector<std::string>& sigma,
                                   EvaluationMode mode, const MitigationOptions& options);

/// pr(a,s): p of the first applicable success_with entry, else 1.
Rational success_probability(const CompiledAction& a, const State& s);

/// Product of pr along the trajectory. Throws Error(NotExecutable) when the
/// plan dies and Error(BranchAmbiguous) when branches disagree.
Rational plan_success_probability(const Theory& t, const std::vector<std::string>& plan, const State& start);

struct PreferencePolicy {
  enum class Kind { Weighted, Lexicographic, MaxProbability };
  Kind kind = Kind::Weighted;
  std::map<std::string, Rational> weights;
  std::vector<std::string> priority;
};

std::string_view to_string(PreferencePolicy::Kind kind);

struct PlanScore {
  std::size_t plan = 0;
  /// Weighted LoS or success probability.
  std::optional<Rational> value;
  /// Lexicographic policy: los values along the priority list.
  std::vector<Rational> vector;
  /// Set when the score could not be computed (e.g. BRANCH_AMBIGUOUS).
  std::optional<std::string> error;
};

struct Selection {
  /// Indices into the plan list, ascending.
  std::vector<std::size_t> best;
  std::vector<PlanScore> scoreboard;
};

/// Weighted and lexicographic scores take the best final state of a plan.
Selection select_preferred(const Theory& t, const std::vector<Plan>& plans, const PreferencePolicy& policy,
                           const State& start);

enum class NoncomplianceMode { Weak, Strong };

std::string_view to_string(NoncomplianceMode mode);

struct NoncomplianceWitness {
  State initial;
  std::vector<std::string> plan;
  /// First concern of SC that fails; empty for a compliant witness.
  std::optional<std::string> violated;
};

struct NoncomplianceReport {
  NoncomplianceMode mode = NoncomplianceMode::Weak;
  std::size_t horizon = 0;
  bool verdict = false;
  std::optional<NoncomplianceWitness> witness;
};

struct NoncomplianceOptions {
  std::size_t state_bound = kDefaultStateBound;
  std::size_t budget = kDefaultNodeBudget;
};

/// Exhaustive search over every state I and every executable sequence over
/// `sa` of length at most `n`. Weak: some (I, plan) leaves a concern of `sc`
/// unsatisfied. Strong: every (I, plan) does.
NoncomplianceReport detect_noncompliance(const Theory& t, const std::vector<std::string>& sa,
                                         const std::vector<std::string>& sc, std::size_t n,
                                         NoncomplianceMode mode, EvaluationMode eval_mode,
                                         const NoncomplianceOptions& options = {});

}  // namespace cpsr

#endif  // CPSR_PLANNER_HPP
