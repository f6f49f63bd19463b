#include "cpsr/trust_rank.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace cpsr {

std::vector<TrustScore> trust_scores(const Theory& t, const State& s, ConcernEvaluator& eval) {
  const auto& onto = t.source().ontology;
  const auto& concerns = t.concerns();
  const auto& sat = eval.satisfied(s);

  std::map<std::string, std::vector<std::size_t>> addressing;
  for (const auto& [c, props] : onto.addressed_by) {
    auto ci = t.require_concern(c);
    for (const auto& p : props) addressing[p].push_back(ci);
  }

  std::vector<TrustScore> out;
  for (const auto& comp : t.components()) {
    std::set<std::pair<std::size_t, std::string>> pos;
    std::set<std::pair<std::size_t, std::string>> npos;
    for (const auto& rel : comp.relations) {
      if (!s[rel.active] || !s[rel.prop]) continue;
      auto it = addressing.find(rel.property);
      if (it == addressing.end()) continue;
      for (auto c : it->second) {
        bool positive = onto.positive_impact.count({rel.property, concerns[c].id}) && sat[c];
        auto& target = positive ? pos : npos;
        for (std::optional<std::size_t> up = c; up; up = concerns[*up].parent) target.emplace(*up, rel.property);
      }
    }
    TrustScore score;
    score.component = comp.id;
    score.pos_pairs = static_cast<std::int64_t>(pos.size());
    score.npos_pairs = static_cast<std::int64_t>(npos.size());
    score.tw = Rational(score.pos_pairs, score.npos_pairs + 1);
    score.impact = score.npos_pairs;
    out.push_back(std::move(score));
  }
  return out;
}

std::vector<TrustScore> trust_scores(const Theory& t, const State& s, EvaluationMode mode) {
  ConcernEvaluator eval(t, mode);
  return trust_scores(t, s, eval);
}

std::weak_ordering compare_trust(const TrustScore& a, const TrustScore& b) {
  if (auto c = a.tw <=> b.tw; c != 0) return c;
  if (a.tw.is_zero()) return b.impact <=> a.impact;
  return std::weak_ordering::equivalent;
}

std::weak_ordering compare_trust(const Theory& t, std::string_view x1, std::string_view x2, const State& s,
                                 EvaluationMode mode) {
  auto scores = trust_scores(t, s, mode);
  auto find = [&](std::string_view id) -> const TrustScore& {
    for (const auto& sc : scores) {
      if (sc.component == id) return sc;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown component '" + std::string(id) + "'");
  };
  return compare_trust(find(x1), find(x2));
}

TrustRanking rank_components(const Theory& t, const State& s, EvaluationMode mode) {
  TrustRanking r;
  r.scores = trust_scores(t, s, mode);
  std::vector<const TrustScore*> order;
  for (const auto& sc : r.scores) order.push_back(&sc);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return compare_trust(*a, *b) > 0; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || compare_trust(*order[i - 1], *order[i]) != 0) r.ranking.emplace_back();
    r.ranking.back().push_back(order[i]->component);
  }
  if (!r.ranking.empty()) {
    r.most = r.ranking.front();
    r.least = r.ranking.back();
  }
  return r;
}

}  // namespace cpsr
