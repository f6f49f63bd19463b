#ifndef CPSR_CONCERN_EVAL_HPP
#define CPSR_CONCERN_EVAL_HPP

#include "cpsr/theory.hpp"

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cpsr {

/// and[ addressed properties of c absent from every Gamma formula of c (sorted),
///      Gamma formulas of c in document order ].
/// Throws Error(UnknownConcern).
Formula lambda_formula(const Theory& t, std::string_view concern);

/// Throws Error(UnknownAtom) for atoms outside the fluent universe.
bool eval_formula(const Theory& t, const Formula& f, const State& s, EvaluationMode mode);

struct ConcernStatus {
  bool satisfied = false;
  bool formula_value = false;
  /// Direct subconcerns that are not satisfied, sorted.
  std::vector<std::string> failing_subconcerns;

  friend bool operator==(const ConcernStatus&, const ConcernStatus&) = default;
};

using SatisfactionMap = std::map<std::string, ConcernStatus>;

/// Satisfaction of every concern for one theory and mode, memoized per state.
class ConcernEvaluator {
 public:
  ConcernEvaluator(const Theory& t, EvaluationMode mode);

  [[nodiscard]] EvaluationMode mode() const { return mode_; }

  /// Indexed like Theory::concerns().
  const std::vector<bool>& satisfied(const State& s);
  bool satisfied(std::size_t concern, const State& s) { return satisfied(s)[concern]; }
  bool formula_value(std::size_t concern, const State& s) const;
  SatisfactionMap satisfaction(const State& s);

 private:
  struct Node {
    Formula::Kind kind = Formula::Kind::And;
    FluentIndex fluent = 0;
    bool property = false;
    std::vector<Node> children;
  };

  Node compile(const Formula& f) const;
  bool eval(const Node& n, const State& s) const;

  const Theory& t_;
  EvaluationMode mode_;
  std::vector<Node> lambda_;
  std::unordered_map<State, std::vector<bool>, StateHash> memo_;
};

bool concern_satisfied(const Theory& t, std::string_view concern, const State& s, EvaluationMode mode);

/// Phi-hat(plan, start) is non-empty and every reached state satisfies c.
/// Throws Error(UnknownConcern) or Error(UnknownAction).
bool satisfied_after(const Theory& t, const std::vector<std::string>& plan, std::string_view concern,
                     EvaluationMode mode, const State& start);
bool satisfied_after(const Theory& t, const std::vector<std::string>& plan, std::string_view concern,
                     EvaluationMode mode);

}  // namespace cpsr

#endif  // CPSR_CONCERN_EVAL_HPP
