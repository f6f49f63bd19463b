#include "cpsr/concern_eval.hpp"

#include "cpsr/transition.hpp"

#include <algorithm>
#include <set>

namespace cpsr {

Formula lambda_formula(const Theory& t, std::string_view concern) {
  const auto& id = t.concerns()[t.require_concern(concern)].id;
  const auto& src = t.source();

  std::vector<const Formula*> gamma;
  std::set<std::string> mentioned;
  for (const auto& g : src.system.gamma) {
    if (g.concern != id) continue;
    gamma.push_back(&g.formula);
    for_each_atom(g.formula, [&](const std::string& atom) { mentioned.insert(atom); });
  }

  std::vector<Formula> parts;
  if (auto it = src.ontology.addressed_by.find(id); it != src.ontology.addressed_by.end()) {
    for (const auto& p : it->second) {
      if (!mentioned.count(p)) parts.push_back(Formula::make_atom(p));
    }
  }
  for (const auto* f : gamma) parts.push_back(*f);
  return Formula::make_and(std::move(parts));
}

ConcernEvaluator::ConcernEvaluator(const Theory& t, EvaluationMode mode) : t_(t), mode_(mode) {
  for (const auto& c : t.concerns()) lambda_.push_back(compile(lambda_formula(t, c.id)));
}

ConcernEvaluator::Node ConcernEvaluator::compile(const Formula& f) const {
  Node n;
  n.kind = f.kind;
  if (f.kind == Formula::Kind::Atom) {
    auto fluent = t_.find_fluent(f.atom);
    if (!fluent) throw Error(ErrorCode::UnknownAtom, "unknown atom '" + f.atom + "' in formula");
    n.fluent = *fluent;
    n.property = t_.fluent(*fluent).kind == FluentKind::Property;
    return n;
  }
  for (const auto& c : f.children) n.children.push_back(compile(c));
  return n;
}

bool ConcernEvaluator::eval(const Node& n, const State& s) const {
  switch (n.kind) {
    case Formula::Kind::Atom: {
      if (!s[n.fluent]) return false;
      if (!n.property || mode_ == EvaluationMode::Plain) return true;
      const auto& actives = t_.active_fluents(n.fluent);
      return std::any_of(actives.begin(), actives.end(), [&](FluentIndex a) { return s[a]; });
    }
    case Formula::Kind::Not:
      return !eval(n.children.front(), s);
    case Formula::Kind::And:
      return std::all_of(n.children.begin(), n.children.end(), [&](const Node& c) { return eval(c, s); });
    case Formula::Kind::Or:
      return std::any_of(n.children.begin(), n.children.end(), [&](const Node& c) { return eval(c, s); });
  }
  return false;
}

const std::vector<bool>& ConcernEvaluator::satisfied(const State& s) {
  auto it = memo_.find(s);
  if (it != memo_.end()) return it->second;
  const auto& concerns = t_.concerns();
  std::vector<bool> sat(concerns.size(), false);
  for (auto c : t_.bottom_up()) {
    bool ok = eval(lambda_[c], s);
    for (auto child : concerns[c].children) ok = ok && sat[child];
    sat[c] = ok;
  }
  return memo_.emplace(s, std::move(sat)).first->second;
}

bool ConcernEvaluator::formula_value(std::size_t concern, const State& s) const {
  return eval(lambda_.at(concern), s);
}

SatisfactionMap ConcernEvaluator::satisfaction(const State& s) {
  const auto& sat = satisfied(s);
  const auto& concerns = t_.concerns();
  SatisfactionMap out;
  for (std::size_t c = 0; c < concerns.size(); ++c) {
    ConcernStatus st;
    st.satisfied = sat[c];
    st.formula_value = formula_value(c, s);
    for (auto child : concerns[c].children) {
      if (!sat[child]) st.failing_subconcerns.push_back(concerns[child].id);
    }
    std::sort(st.failing_subconcerns.begin(), st.failing_subconcerns.end());
    out.emplace(concerns[c].id, std::move(st));
  }
  return out;
}

bool eval_formula(const Theory& t, const Formula& f, const State& s, EvaluationMode mode) {
  switch (f.kind) {
    case Formula::Kind::Atom: {
      auto fluent = t.find_fluent(f.atom);
      if (!fluent) throw Error(ErrorCode::UnknownAtom, "unknown atom '" + f.atom + "' in formula");
      if (!s[*fluent]) return false;
      if (mode == EvaluationMode::Plain || t.fluent(*fluent).kind != FluentKind::Property) return true;
      const auto& actives = t.active_fluents(*fluent);
      return std::any_of(actives.begin(), actives.end(), [&](FluentIndex a) { return s[a]; });
    }
    case Formula::Kind::Not:
      return !eval_formula(t, f.children.front(), s, mode);
    case Formula::Kind::And:
      return std::all_of(f.children.begin(), f.children.end(),
                         [&](const Formula& c) { return eval_formula(t, c, s, mode); });
    case Formula::Kind::Or:
      return std::any_of(f.children.begin(), f.children.end(),
                         [&](const Formula& c) { return eval_formula(t, c, s, mode); });
  }
  return false;
}

bool concern_satisfied(const Theory& t, std::string_view concern, const State& s, EvaluationMode mode) {
  auto c = t.require_concern(concern);
  ConcernEvaluator ev(t, mode);
  return ev.satisfied(c, s);
}

bool satisfied_after(const Theory& t, const std::vector<std::string>& plan, std::string_view concern,
                     EvaluationMode mode, const State& start) {
  auto c = t.require_concern(concern);
  auto reached = run(t, plan, start);
  if (reached.empty()) return false;
  ConcernEvaluator ev(t, mode);
  return std::all_of(reached.begin(), reached.end(), [&](const State& s) { return ev.satisfied(c, s); });
}

bool satisfied_after(const Theory& t, const std::vector<std::string>& plan, std::string_view concern,
                     EvaluationMode mode) {
  return satisfied_after(t, plan, concern, mode, t.initial());
}

}  // namespace cpsr
