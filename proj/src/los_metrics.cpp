#include "cpsr/los_metrics.hpp"

#include <algorithm>
#include <set>

namespace cpsr {

LosCalculator::LosCalculator(const Theory& t) : t_(t), pairs_(t.concerns().size()) {
  const auto& onto = t.source().ontology;
  for (const auto& [p, c] : onto.positive_impact) {
    auto addressed = onto.addressed_by.find(c);
    if (addressed == onto.addressed_by.end() || !addressed->second.count(p)) continue;
    auto ci = t.require_concern(c);
    auto prop = t.property_fluent(p);
    if (!prop) continue;
    for (auto active : t.active_fluents(*prop)) pairs_[ci].push_back(active);
  }
}

Rational LosCalculator::deg_pos(std::size_t concern, const State& s) const {
  const auto& pairs = pairs_.at(concern);
  if (pairs.empty()) return Rational(1);
  auto active = std::count_if(pairs.begin(), pairs.end(), [&](FluentIndex f) { return s[f]; });
  return Rational(active, static_cast<std::int64_t>(pairs.size()));
}

std::vector<LosEntry> LosCalculator::entries(const State& s) const {
  const auto& concerns = t_.concerns();
  std::vector<LosEntry> out(concerns.size());
  for (auto c : t_.bottom_up()) {
    out[c].deg_pos = deg_pos(c, s);
    out[c].los = out[c].deg_pos;
    for (auto child : concerns[c].children) out[c].los *= out[child].los;
  }
  return out;
}

LosTable LosCalculator::table(const State& s) const {
  auto e = entries(s);
  LosTable out;
  for (std::size_t c = 0; c < e.size(); ++c) out.emplace(t_.concerns()[c].id, e[c]);
  return out;
}

Rational deg_pos(const Theory& t, std::string_view concern, const State& s) {
  auto c = t.require_concern(concern);
  return LosCalculator(t).deg_pos(c, s);
}

Rational los_value(const Theory& t, std::string_view concern, const State& s) {
  auto c = t.require_concern(concern);
  return LosCalculator(t).entries(s)[c].los;
}

LosTable los_table(const Theory& t, const State& s) { return LosCalculator(t).table(s); }

namespace {

std::size_t require_aspect(const Theory& t, const std::string& id) {
  auto c = t.find_concern(id);
  if (!c || !t.concerns()[*c].is_aspect) {
    throw Error(ErrorCode::UnknownAspect, "'" + id + "' is not an aspect");
  }
  return *c;
}

}  // namespace

void check_weights(const Theory& t, const std::map<std::string, Rational>& weights) {
  for (const auto& [aspect, w] : weights) {
    require_aspect(t, aspect);
    if (w.sign() < 0) throw Error(ErrorCode::NegativeWeight, "negative weight for '" + aspect + "'");
  }
}

void check_priority(const Theory& t, const std::vector<std::string>& priority) {
  std::set<std::string> seen;
  for (const auto& a : priority) {
    require_aspect(t, a);
    if (!seen.insert(a).second) throw Error(ErrorCode::DuplicatePriority, "aspect '" + a + "' listed twice");
  }
}

Rational weighted_los(const Theory& t, const std::vector<LosEntry>& entries,
                      const std::map<std::string, Rational>& weights) {
  check_weights(t, weights);
  Rational sum;
  for (const auto& [aspect, w] : weights) sum += entries[require_aspect(t, aspect)].los * w;
  return sum;
}

Rational weighted_los(const Theory& t, const State& s, const std::map<std::string, Rational>& weights) {
  return weighted_los(t, LosCalculator(t).entries(s), weights);
}

std::vector<Rational> los_vector(const Theory& t, const std::vector<LosEntry>& entries,
                                 const std::vector<std::string>& priority) {
  check_priority(t, priority);
  std::vector<Rational> out;
  for (const auto& a : priority) out.push_back(entries[require_aspect(t, a)].los);
  return out;
}

std::weak_ordering lex_compare(const Theory& t, const State& s1, const State& s2,
                               const std::vector<std::string>& priority) {
  LosCalculator calc(t);
  auto v1 = los_vector(t, calc.entries(s1), priority);
  auto v2 = los_vector(t, calc.entries(s2), priority);
  return std::lexicographical_compare_three_way(v1.begin(), v1.end(), v2.begin(), v2.end());
}

}  // namespace cpsr
