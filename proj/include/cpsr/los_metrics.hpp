#ifndef CPSR_LOS_METRICS_HPP
#define CPSR_LOS_METRICS_HPP

#include "cpsr/theory.hpp"

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cpsr {

struct LosEntry {
  Rational deg_pos;
  Rational los;

  friend bool operator==(const LosEntry&, const LosEntry&) = default;
};

using LosTable = std::map<std::string, LosEntry>;

/// Precomputed (property, component) pairs per concern.
class LosCalculator {
 public:
  explicit LosCalculator(const Theory& t);

  /// Active pairs over all pairs (p, co) with positive_impact(p,c),
  /// p addressing c and p in R(co); 1 when there are none.
  [[nodiscard]] Rational deg_pos(std::size_t concern, const State& s) const;
  /// Indexed like Theory::concerns().
  [[nodiscard]] std::vector<LosEntry> entries(const State& s) const;
  [[nodiscard]] LosTable table(const State& s) const;

  /// Number of pairs in the denominator of deg_pos.
  [[nodiscard]] std::size_t pair_count(std::size_t concern) const { return pairs_.at(concern).size(); }

 private:
  const Theory& t_;
  std::vector<std::vector<FluentIndex>> pairs_;
};

Rational deg_pos(const Theory& t, std::string_view concern, const State& s);
Rational los_value(const Theory& t, std::string_view concern, const State& s);
LosTable los_table(const Theory& t, const State& s);

/// Checks weight keys are aspects and values non-negative. Throws
/// Error(UnknownAspect) or Error(NegativeWeight).
void check_weights(const Theory& t, const std::map<std::string, Rational>& weights);
/// Checks priority entries are distinct aspects. Throws Error(UnknownAspect)
/// or Error(DuplicatePriority).
void check_priority(const Theory& t, const std::vector<std::string>& priority);

/// Sum of los(aspect) * weight(aspect); missing weights count as 0.
Rational weighted_los(const Theory& t, const State& s, const std::map<std::string, Rational>& weights);
Rational weighted_los(const Theory& t, const std::vector<LosEntry>& entries,
                      const std::map<std::string, Rational>& weights);

/// los values of the listed aspects, in order.
std::vector<Rational> los_vector(const Theory& t, const std::vector<LosEntry>& entries,
                                 const std::vector<std::string>& priority);

/// `greater` when s1 is preferred.
std::weak_ordering lex_compare(const Theory& t, const State& s1, const State& s2,
                               const std::vector<std::string>& priority);

}  // namespace cpsr

#endif  // CPSR_LOS_METRICS_HPP
