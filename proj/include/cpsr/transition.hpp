#ifndef CPSR_TRANSITION_HPP
#define CPSR_TRANSITION_HPP

#include "cpsr/theory.hpp"

#include <cstddef>
#include <set>
#include <unordered_map>
#include <vector>

namespace cpsr {

using LiteralSet = std::set<Lit>;

/// Least consistent supersets of `u` closed under `laws`, one per choice of
/// head for each triggered disjunctive law; non-minimal results are dropped.
/// Empty when no consistent closure exists.
std::vector<LiteralSet> closure(const LiteralSet& u, const std::vector<CompiledLaw>& laws);

/// Every triggered law has exactly one true head.
bool is_state(const State& s, const std::vector<CompiledLaw>& laws);

bool executable_in(const CompiledAction& a, const State& s);
bool executable_in(const Theory& t, std::string_view action, const State& s);

/// e(a,s). May contain a complementary pair.
std::vector<Lit> direct_effects(const CompiledAction& a, const State& s);

/// Phi(a,s) in canonical order. Empty when `a` is not executable in `s`.
std::vector<State> step(const Dynamics& d, std::size_t action, const State& s);
std::vector<State> step(const Theory& t, std::string_view action, const State& s);

/// Phi-hat: empty as soon as any branch dies.
std::vector<State> run(const Dynamics& d, const std::vector<std::size_t>& plan, const State& s);
std::vector<State> run(const Theory& t, const std::vector<std::string>& plan, const State& s);

inline constexpr std::size_t kDefaultStateBound = 24;

/// All states in canonical order. Throws Error(UniverseTooLarge) when the
/// fluent count exceeds `bound`.
std::vector<State> enumerate_states(const Dynamics& d, std::size_t bound = kDefaultStateBound);

/// Memoizing wrapper around step() for search.
class Stepper {
 public:
  explicit Stepper(const Dynamics& d) : d_(d) {}

  const std::vector<State>& step(std::size_t action, const State& s);
  [[nodiscard]] const Dynamics& dynamics() const { return d_; }

 private:
  struct Key {
    std::size_t action;
    State state;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return k.state.hash() * 31 + k.action; }
  };

  const Dynamics& d_;
  std::unordered_map<Key, std::vector<State>, KeyHash> memo_;
};

}  // namespace cpsr

#endif  // CPSR_TRANSITION_HPP
