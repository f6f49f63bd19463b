#include "cpsr/model.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace cpsr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "SYNTAX";
    case ErrorCode::InvalidTheory: return "INVALID_THEORY";
    case ErrorCode::UnknownConcern: return "UNKNOWN_CONCERN";
    case ErrorCode::UnknownAction: return "UNKNOWN_ACTION";
    case ErrorCode::UnknownAtom: return "UNKNOWN_ATOM";
    case ErrorCode::UnknownAspect: return "UNKNOWN_ASPECT";
    case ErrorCode::NegativeWeight: return "NEGATIVE_WEIGHT";
    case ErrorCode::DuplicatePriority: return "DUPLICATE_PRIORITY";
    case ErrorCode::UniverseTooLarge: return "UNIVERSE_TOO_LARGE";
    case ErrorCode::BudgetExceeded: return "BUDGET_EXCEEDED";
    case ErrorCode::NotExecutable: return "NOT_EXECUTABLE";
    case ErrorCode::BranchAmbiguous: return "BRANCH_AMBIGUOUS";
    case ErrorCode::BranchRequired: return "BRANCH_REQUIRED";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

std::string_view to_string(EvaluationMode mode) {
  return mode == EvaluationMode::Plain ? "plain" : "grounded";
}

std::optional<EvaluationMode> parse_evaluation_mode(std::string_view text) {
  if (text == "plain") return EvaluationMode::Plain;
  if (text == "grounded") return EvaluationMode::Grounded;
  return std::nullopt;
}

bool is_valid_id(std::string_view id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string active_atom(std::string_view component, std::string_view property) {
  std::string s = "active ";
  s += component;
  s += ' ';
  s += property;
  return s;
}

std::optional<AtomParts> parse_atom(std::string_view text) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(text)};
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  for (const auto& tok : tokens) {
    if (!is_valid_id(tok)) return std::nullopt;
  }
  if (tokens.size() == 1 && tokens[0] != "active") return AtomParts{"", tokens[0]};
  if (tokens.size() == 3 && tokens[0] == "active") return AtomParts{tokens[1], tokens[2]};
  return std::nullopt;
}

std::optional<FluentLiteral> FluentLiteral::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  bool positive = true;
  if (!text.empty() && text.front() == '-') {
    positive = false;
    text.remove_prefix(1);
  }
  auto parts = parse_atom(text);
  if (!parts) return std::nullopt;
  std::string atom = parts->is_active() ? active_atom(parts->component, parts->name) : parts->name;
  return FluentLiteral{std::move(atom), positive};
}

Formula Formula::make_atom(std::string atom) {
  Formula f;
  f.kind = Kind::Atom;
  f.atom = std::move(atom);
  return f;
}

Formula Formula::make_not(Formula inner) {
  Formula f;
  f.kind = Kind::Not;
  f.children.push_back(std::move(inner));
  return f;
}

Formula Formula::make_and(std::vector<Formula> fs) {
  Formula f;
  f.kind = Kind::And;
  f.children = std::move(fs);
  return f;
}

Formula Formula::make_or(std::vector<Formula> fs) {
  Formula f;
  f.kind = Kind::Or;
  f.children = std::move(fs);
  return f;
}

std::string Formula::str() const {
  switch (kind) {
    case Kind::Atom: return atom;
    case Kind::Not: return "not[" + children.front().str() + "]";
    case Kind::And:
    case Kind::Or: {
      std::string s = kind == Kind::And ? "and[" : "or[";
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) s += ", ";
        s += children[i].str();
      }
      return s + "]";
    }
  }
  return {};
}

const Concern* Ontology::find_concern(std::string_view id) const {
  for (const auto& c : concerns) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::vector<std::string> fluent_universe(const CpsTheory& t) {
  std::set<std::string> atoms(t.ontology.properties.begin(), t.ontology.properties.end());
  for (const auto& [co, props] : t.system.components) {
    for (const auto& p : props) atoms.insert(active_atom(co, p));
  }
  atoms.insert(t.system.extra_fluents.begin(), t.system.extra_fluents.end());
  return {atoms.begin(), atoms.end()};
}

namespace {

class Reporter {
 public:
  void add(std::string code, std::vector<std::string> ids, std::string message, std::string where = {}) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    out_.push_back({std::move(code), std::move(ids), std::move(message), std::move(where)});
  }

  ValidationReport finish() {
    std::sort(out_.begin(), out_.end());
    out_.erase(std::unique(out_.begin(), out_.end()), out_.end());
    return std::move(out_);
  }

 private:
  ValidationReport out_;
};

std::string path(std::initializer_list<std::string> parts) {
  std::string s;
  for (const auto& p : parts) s += "/" + p;
  return s;
}

}  // namespace

ValidationReport validate_ontology(const Ontology& o) {
  Reporter r;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < o.concerns.size(); ++i) {
    const auto& c = o.concerns[i];
    if (!is_valid_id(c.id)) r.add("INVALID_ID", {c.id}, "invalid concern id '" + c.id + "'", path({"ontology", "concerns", std::to_string(i)}));
    if (!index.emplace(c.id, i).second) r.add("DUPLICATE_ID", {c.id}, "concern '" + c.id + "' declared twice");
  }
  for (const auto& p : o.properties) {
    if (!is_valid_id(p)) r.add("INVALID_ID", {p}, "invalid property id '" + p + "'", "/ontology/properties");
  }

  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& c : o.concerns) {
    for (const auto& sub : c.subconcerns) {
      if (!index.count(sub)) {
        r.add("UNKNOWN_ID", {sub}, "concern '" + c.id + "' lists undeclared subconcern '" + sub + "'");
        continue;
      }
      parents[sub].push_back(c.id);
    }
  }
  for (const auto& [child, ps] : parents) {
    std::set<std::string> distinct(ps.begin(), ps.end());
    if (ps.size() > 1) {
      std::vector<std::string> ids(distinct.begin(), distinct.end());
      ids.push_back(child);
      r.add("MULTIPLE_PARENTS", ids, "concern '" + child + "' has more than one parent");
    }
    const auto& c = o.concerns[index.at(child)];
    if (c.is_aspect) r.add("ASPECT_NOT_ROOT", {child}, "aspect '" + child + "' is a subconcern");
  }

  // Cycles: group concerns by mutual reachability along subconcern edges.
  const std::size_t n = o.concerns.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> stack;
    auto push_children = [&](std::size_t v) {
      for (const auto& sub : o.concerns[v].subconcerns) {
        auto it = index.find(sub);
        if (it != index.end() && !reach[i][it->second]) {
          reach[i][it->second] = true;
          stack.push_back(it->second);
        }
      }
    };
    push_children(i);
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      push_children(v);
    }
  }
  std::vector<bool> reported(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!reach[i][i] || reported[i]) continue;
    std::vector<std::string> ids;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j] && reach[j][i]) {
        ids.push_back(o.concerns[j].id);
        reported[j] = true;
      }
    }
    r.add("CYCLE", ids, "subconcern cycle");
  }

  for (const auto& [c, props] : o.addressed_by) {
    if (!index.count(c)) r.add("UNKNOWN_ID", {c}, "addressed_by names undeclared concern '" + c + "'", "/ontology/addressed_by");
    for (const auto& p : props) {
      if (!o.properties.count(p)) r.add("UNKNOWN_ID", {p}, "addressed_by names undeclared property '" + p + "'", "/ontology/addressed_by/" + c);
    }
  }
  for (const auto& [p, c] : o.positive_impact) {
    bool known = true;
    if (!o.properties.count(p)) {
      r.add("UNKNOWN_ID", {p}, "positive_impact names undeclared property '" + p + "'", "/ontology/positive_impact");
      known = false;
    }
    if (!index.count(c)) {
      r.add("UNKNOWN_ID", {c}, "positive_impact names undeclared concern '" + c + "'", "/ontology/positive_impact");
      known = false;
    }
    if (!known) continue;
    auto it = o.addressed_by.find(c);
    if (it == o.addressed_by.end() || !it->second.count(p)) {
      r.add("IMPACT_WITHOUT_ADDRESS", {p, c}, "positive_impact(" + p + ", " + c + ") without addressed_by");
    }
  }
  return r.finish();
}

namespace {

struct UniverseIndex {
  const CpsTheory& t;
  std::set<std::string> atoms;

  explicit UniverseIndex(const CpsTheory& theory) : t(theory) {
    auto u = fluent_universe(theory);
    atoms.insert(u.begin(), u.end());
  }

  // Reports why `atom` is not in the universe; returns true if it is.
  bool check(Reporter& r, const std::string& atom, const std::string& where) const {
    if (atoms.count(atom)) return true;
    auto parts = parse_atom(atom);
    if (!parts) {
      r.add("SYNTAX", {atom}, "malformed atom '" + atom + "'", where);
    } else if (parts->is_active()) {
      auto co = t.system.components.find(parts->component);
      if (co == t.system.components.end()) {
        r.add("UNKNOWN_ID", {parts->component}, "unknown component '" + parts->component + "'", where);
      } else if (!t.ontology.properties.count(parts->name)) {
        r.add("UNKNOWN_ID", {parts->name}, "unknown property '" + parts->name + "'", where);
      } else {
        r.add("ACTIVE_UNRELATED", {parts->component, parts->name},
              "property '" + parts->name + "' is not related to component '" + parts->component + "'", where);
      }
    } else {
      r.add("UNKNOWN_ID", {parts->name}, "unknown fluent '" + parts->name + "'", where);
    }
    return false;
  }

  void check_all(Reporter& r, const LiteralList& lits, const std::string& where) const {
    for (std::size_t i = 0; i < lits.size(); ++i) check(r, lits[i].atom, where + "/" + std::to_string(i));
  }
};

bool has_complementary_pair(const LiteralList& a, const LiteralList& b = {}) {
  std::set<FluentLiteral> all(a.begin(), a.end());
  all.insert(b.begin(), b.end());
  return std::any_of(all.begin(), all.end(), [&](const FluentLiteral& l) { return l.positive && all.count(l.negated()); });
}

bool holds(const std::set<std::string>& true_atoms, const FluentLiteral& l) {
  return true_atoms.count(l.atom) == static_cast<std::size_t>(l.positive);
}

void validate_success(Reporter& r, const ActionSpec& a, const std::string& where) {
  for (std::size_t i = 0; i < a.success_with.size(); ++i) {
    const auto& s = a.success_with[i];
    if (s.p < Rational(0) || Rational(1) < s.p) {
      r.add("PROB_RANGE", {a.id}, "success probability " + s.p.str() + " outside [0,1]", where + "/" + std::to_string(i));
    }
    if (has_complementary_pair(s.conditions)) {
      r.add("PROB_CONDITION_INCONSISTENT", {a.id}, "success_with condition set is inconsistent", where + "/" + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < a.success_with.size(); ++i) {
    for (std::size_t j = i + 1; j < a.success_with.size(); ++j) {
      const auto& x = a.success_with[i];
      const auto& y = a.success_with[j];
      if (x.p == y.p) continue;
      std::set<FluentLiteral> xs(x.conditions.begin(), x.conditions.end());
      std::set<FluentLiteral> ys(y.conditions.begin(), y.conditions.end());
      if (xs != ys && has_complementary_pair(x.conditions, y.conditions)) continue;
      r.add("PROB_INCONSISTENT", {a.id},
            "success_with entries " + std::to_string(i) + " and " + std::to_string(j) + " can both apply with different probabilities",
            where);
    }
  }
}

}  // namespace

ValidationReport validate_system(const CpsTheory& t) {
  Reporter r;
  const auto& o = t.ontology;
  const auto& sys = t.system;
  UniverseIndex universe(t);

  for (const auto& [co, props] : sys.components) {
    if (!is_valid_id(co)) r.add("INVALID_ID", {co}, "invalid component id '" + co + "'", "/system/components");
    for (const auto& p : props) {
      if (!o.properties.count(p)) r.add("UNKNOWN_ID", {p}, "component '" + co + "' relates undeclared property '" + p + "'", "/system/components/" + co);
    }
  }
  for (const auto& f : sys.extra_fluents) {
    if (!is_valid_id(f) || f == "active") r.add("INVALID_ID", {f}, "invalid fluent name '" + f + "'", "/system/fluents");
    if (o.properties.count(f)) r.add("FLUENT_NAME_CLASH", {f}, "extra fluent '" + f + "' shadows a property", "/system/fluents");
  }

  std::set<std::string> action_ids;
  for (std::size_t i = 0; i < sys.actions.size(); ++i) {
    const auto& a = sys.actions[i];
    const std::string where = "/system/actions/" + std::to_string(i);
    std::istringstream tokens(a.id);
    bool ok = !a.id.empty();
    for (std::string tok; tokens >> tok;) ok = ok && is_valid_id(tok);
    if (!ok) r.add("INVALID_ID", {a.id}, "invalid action id '" + a.id + "'", where);
    if (!action_ids.insert(a.id).second) r.add("DUPLICATE_ID", {a.id}, "action '" + a.id + "' declared twice", where);
    for (std::size_t k = 0; k < a.executable_if.size(); ++k) {
      universe.check_all(r, a.executable_if[k], where + "/executable_if/" + std::to_string(k));
    }
    for (std::size_t k = 0; k < a.causes.size(); ++k) {
      universe.check(r, a.causes[k].effect.atom, where + "/causes/" + std::to_string(k) + "/effect");
      universe.check_all(r, a.causes[k].conditions, where + "/causes/" + std::to_string(k) + "/if");
    }
    for (std::size_t k = 0; k < a.success_with.size(); ++k) {
      universe.check_all(r, a.success_with[k].conditions, where + "/success_with/" + std::to_string(k) + "/if");
    }
    validate_success(r, a, where + "/success_with");
  }

  for (std::size_t i = 0; i < sys.statics.size(); ++i) {
    const auto& law = sys.statics[i];
    const std::string where = "/system/statics/" + std::to_string(i);
    if (law.heads.empty()) r.add("EMPTY_HEADS", {}, "static law without heads", where);
    universe.check_all(r, law.heads, where + "/heads");
    universe.check_all(r, law.body, where + "/body");
  }

  for (std::size_t i = 0; i < sys.gamma.size(); ++i) {
    const auto& g = sys.gamma[i];
    const std::string where = "/system/gamma/" + std::to_string(i);
    if (!o.find_concern(g.concern)) {
      r.add("UNKNOWN_ID", {g.concern}, "decomposition for undeclared concern '" + g.concern + "'", where);
      continue;
    }
    if (!is_valid_id(g.function)) r.add("INVALID_ID", {g.function}, "invalid function id '" + g.function + "'", where);
    auto addressed = o.addressed_by.find(g.concern);
    for_each_atom(g.formula, [&](const std::string& atom) {
      if (!universe.check(r, atom, where + "/formula")) return;
      if (!o.properties.count(atom)) return;
      if (addressed == o.addressed_by.end() || !addressed->second.count(atom)) {
        r.add("GAMMA_UNADDRESSED", {g.concern, atom},
              "property '" + atom + "' in decomposition '" + g.function + "' does not address '" + g.concern + "'", where);
      }
    });
  }

  // Initial assignment must be total, consistent and closed.
  bool initial_ok = true;
  for (const auto& a : t.initial.true_atoms) {
    initial_ok &= universe.check(r, a, "/initial/true");
    if (t.initial.false_atoms.count(a)) {
      r.add("INITIAL_CONFLICT", {a}, "fluent '" + a + "' listed both true and false", "/initial");
      initial_ok = false;
    }
  }
  for (const auto& a : t.initial.false_atoms) initial_ok &= universe.check(r, a, "/initial/false");
  for (const auto& a : universe.atoms) {
    if (!t.initial.true_atoms.count(a) && !t.initial.false_atoms.count(a)) {
      r.add("INITIAL_MISSING", {a}, "fluent '" + a + "' has no initial value", "/initial");
      initial_ok = false;
    }
  }
  if (initial_ok) {
    for (std::size_t i = 0; i < sys.statics.size(); ++i) {
      const auto& law = sys.statics[i];
      bool body = std::all_of(law.body.begin(), law.body.end(), [&](const auto& l) { return holds(t.initial.true_atoms, l); });
      if (!body) continue;
      auto heads = std::count_if(law.heads.begin(), law.heads.end(), [&](const auto& l) { return holds(t.initial.true_atoms, l); });
      if (heads != 1) {
        r.add("INITIAL_NOT_STATE", {}, "initial assignment violates static law " + std::to_string(i), "/system/statics/" + std::to_string(i));
      }
    }
  }

  std::set<std::string> aspects;
  for (const auto& c : o.concerns) {
    if (c.is_aspect) aspects.insert(c.id);
  }
  for (const auto& [aspect, w] : t.analysis.weights) {
    if (!aspects.count(aspect)) r.add("UNKNOWN_ASPECT", {aspect}, "weight for '" + aspect + "', which is not an aspect", "/analysis/weights");
    if (w.sign() < 0) r.add("NEGATIVE_WEIGHT", {aspect}, "negative weight for '" + aspect + "'", "/analysis/weights");
  }
  std::set<std::string> seen;
  for (const auto& a : t.analysis.priority) {
    if (!aspects.count(a)) r.add("UNKNOWN_ASPECT", {a}, "priority names '" + a + "', which is not an aspect", "/analysis/priority");
    if (!seen.insert(a).second) r.add("DUPLICATE_PRIORITY", {a}, "aspect '" + a + "' appears twice in priority", "/analysis/priority");
  }
  return r.finish();
}

}  // namespace cpsr
