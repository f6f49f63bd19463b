#ifndef CPSR_TRUST_RANK_HPP
#define CPSR_TRUST_RANK_HPP

#include "cpsr/concern_eval.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace cpsr {

struct TrustScore {
  std::string component;
  std::int64_t pos_pairs = 0;
  std::int64_t npos_pairs = 0;
  Rational tw;
  std::int64_t impact = 0;

  friend bool operator==(const TrustScore&, const TrustScore&) = default;
};

/// One score per component, sorted by component id.
std::vector<TrustScore> trust_scores(const Theory& t, const State& s, ConcernEvaluator& eval);
std::vector<TrustScore> trust_scores(const Theory& t, const State& s, EvaluationMode mode);

/// `greater` means `a` is more trustworthy than `b`.
std::weak_ordering compare_trust(const TrustScore& a, const TrustScore& b);
std::weak_ordering compare_trust(const Theory& t, std::string_view x1, std::string_view x2, const State& s,
                                 EvaluationMode mode);

struct TrustRanking {
  std::vector<TrustScore> scores;
  std::vector<std::string> most;
  std::vector<std::string> least;
  /// Equivalence classes from most to least trustworthy, ids sorted inside.
  std::vector<std::vector<std::string>> ranking;
};

TrustRanking rank_components(const Theory& t, const State& s, EvaluationMode mode);

}  // namespace cpsr

#endif  // CPSR_TRUST_RANK_HPP
