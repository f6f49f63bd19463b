#include "cpsr/theory_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace cpsr {

using nlohmann::json;

namespace {

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t offset = byte == 0 ? 0 : std::min(byte - 1, text.size());
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

class Reader {
 public:
  void fail(const std::string& where, const std::string& message, std::vector<std::string> ids = {}) {
    diags_.push_back({"SYNTAX", std::move(ids), message, where});
  }

  [[nodiscard]] bool ok() const { return diags_.empty(); }
  ValidationReport take() {
    std::sort(diags_.begin(), diags_.end());
    return std::move(diags_);
  }

  // Object with only the listed keys; null/absent counts as empty.
  const json* object(const json& parent, const std::string& key, const std::string& where) {
    auto it = parent.find(key);
    if (it == parent.end() || it->is_null()) return nullptr;
    if (!it->is_object()) {
      fail(where + "/" + key, "expected an object");
      return nullptr;
    }
    return &*it;
  }

  void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    for (const auto& [k, v] : obj.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* allowed) { return k == allowed; })) {
        fail(where + "/" + k, "unexpected key '" + k + "'", {k});
      }
    }
  }

  const json* array(const json& parent, const std::string& key, const std::string& where) {
    auto it = parent.find(key);
    if (it == parent.end() || it->is_null()) return nullptr;
    if (!it->is_array()) {
      fail(where + "/" + key, "expected an array");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> string(const json& v, const std::string& where) {
    if (!v.is_string()) {
      fail(where, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::vector<std::string> strings(const json* arr, const std::string& where) {
    std::vector<std::string> out;
    if (!arr) return out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      if (auto s = string((*arr)[i], where + "/" + std::to_string(i))) out.push_back(*s);
    }
    return out;
  }

  std::set<std::string> string_set(const json* arr, const std::string& where) {
    auto v = strings(arr, where);
    return {v.begin(), v.end()};
  }

  std::optional<FluentLiteral> literal(const json& v, const std::string& where) {
    auto s = string(v, where);
    if (!s) return std::nullopt;
    auto l = FluentLiteral::parse(*s);
    if (!l) fail(where, "malformed literal '" + *s + "'", {*s});
    return l;
  }

  LiteralList literals(const json* arr, const std::string& where) {
    LiteralList out;
    if (!arr) return out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      if (auto l = literal((*arr)[i], where + "/" + std::to_string(i))) out.push_back(*l);
    }
    return out;
  }

  std::optional<Rational> rational(const json& v, const std::string& where) {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) {
      auto r = Rational::parse(v.get<std::string>());
      if (!r) fail(where, "malformed rational '" + v.get<std::string>() + "'");
      return r;
    }
    fail(where, "expected an integer or a rational string such as \"0.2\" or \"3/5\"");
    return std::nullopt;
  }

  Formula formula(const json& v, const std::string& where) {
    if (v.is_string()) {
      auto l = literal(v, where);
      if (!l) return Formula::make_and({});
      auto atom = Formula::make_atom(l->atom);
      return l->positive ? atom : Formula::make_not(std::move(atom));
    }
    if (!v.is_object() || v.size() != 1) {
      fail(where, "expected a literal string or an object with one of and/or/not");
      return Formula::make_and({});
    }
    const auto& [key, inner] = *v.items().begin();
    if (key == "not") return Formula::make_not(formula(inner, where + "/not"));
    if (key != "and" && key != "or") {
      fail(where + "/" + key, "unknown connective '" + key + "'", {key});
      return Formula::make_and({});
    }
    if (!inner.is_array()) {
      fail(where + "/" + key, "expected an array");
      return Formula::make_and({});
    }
    std::vector<Formula> children;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      children.push_back(formula(inner[i], where + "/" + key + "/" + std::to_string(i)));
    }
    return key == "and" ? Formula::make_and(std::move(children)) : Formula::make_or(std::move(children));
  }

 private:
  ValidationReport diags_;
};

Ontology read_ontology(Reader& r, const json& o) {
  const std::string at = "/ontology";
  r.only_keys(o, {"concerns", "properties", "addressed_by", "positive_impact"}, at);
  Ontology out;
  if (const auto* cs = r.array(o, "concerns", at)) {
    for (std::size_t i = 0; i < cs->size(); ++i) {
      const auto& c = (*cs)[i];
      const std::string where = at + "/concerns/" + std::to_string(i);
      if (!c.is_object()) {
        r.fail(where, "expected an object");
        continue;
      }
      r.only_keys(c, {"id", "aspect", "subconcerns"}, where);
      Concern concern;
      if (auto id = c.find("id"); id != c.end()) {
        concern.id = r.string(*id, where + "/id").value_or("");
      } else {
        r.fail(where, "missing id");
      }
      if (auto a = c.find("aspect"); a != c.end()) {
        if (a->is_boolean()) {
          concern.is_aspect = a->get<bool>();
        } else {
          r.fail(where + "/aspect", "expected a boolean");
        }
      }
      concern.subconcerns = r.strings(r.array(c, "subconcerns", where), where + "/subconcerns");
      out.concerns.push_back(std::move(concern));
    }
  }
  std::stable_sort(out.concerns.begin(), out.concerns.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  out.properties = r.string_set(r.array(o, "properties", at), at + "/properties");
  if (const auto* ab = r.object(o, "addressed_by", at)) {
    for (const auto& [c, props] : ab->items()) {
      const std::string where = at + "/addressed_by/" + c;
      if (!props.is_array()) {
        r.fail(where, "expected an array");
        continue;
      }
      auto set = r.string_set(&props, where);
      if (!set.empty()) out.addressed_by[c] = std::move(set);
    }
  }
  if (const auto* pi = r.array(o, "positive_impact", at)) {
    for (std::size_t i = 0; i < pi->size(); ++i) {
      const auto& pair = (*pi)[i];
      const std::string where = at + "/positive_impact/" + std::to_string(i);
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
        r.fail(where, "expected a [property, concern] pair");
        continue;
      }
      out.positive_impact.emplace(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
  }
  return out;
}

ActionSpec read_action(Reader& r, const json& a, const std::string& where) {
  ActionSpec out;
  if (!a.is_object()) {
    r.fail(where, "expected an object");
    return out;
  }
  r.only_keys(a, {"id", "executable_if", "causes", "success_with"}, where);
  if (auto id = a.find("id"); id != a.end()) {
    out.id = r.string(*id, where + "/id").value_or("");
  } else {
    r.fail(where, "missing id");
  }
  if (const auto* ex = r.array(a, "executable_if", where)) {
    for (std::size_t i = 0; i < ex->size(); ++i) {
      const std::string at = where + "/executable_if/" + std::to_string(i);
      if (!(*ex)[i].is_array()) {
        r.fail(at, "expected an array of literals");
        continue;
      }
      out.executable_if.push_back(r.literals(&(*ex)[i], at));
    }
  }
  if (const auto* causes = r.array(a, "causes", where)) {
    for (std::size_t i = 0; i < causes->size(); ++i) {
      const auto& c = (*causes)[i];
      const std::string at = where + "/causes/" + std::to_string(i);
      if (!c.is_object() || !c.contains("effect")) {
        r.fail(at, "expected an object with an effect");
        continue;
      }
      r.only_keys(c, {"effect", "if"}, at);
      auto effect = r.literal(c["effect"], at + "/effect");
      auto cond = r.literals(r.array(c, "if", at), at + "/if");
      if (effect) out.causes.push_back({*effect, std::move(cond)});
    }
  }
  if (const auto* sw = r.array(a, "success_with", where)) {
    for (std::size_t i = 0; i < sw->size(); ++i) {
      const auto& s = (*sw)[i];
      const std::string at = where + "/success_with/" + std::to_string(i);
      if (!s.is_object() || !s.contains("p")) {
        r.fail(at, "expected an object with a probability p");
        continue;
      }
      r.only_keys(s, {"p", "if"}, at);
      auto p = r.rational(s["p"], at + "/p");
      auto cond = r.literals(r.array(s, "if", at), at + "/if");
      if (p) out.success_with.push_back({*p, std::move(cond)});
    }
  }
  return out;
}

CpsSystem read_system(Reader& r, const json& o) {
  const std::string at = "/system";
  r.only_keys(o, {"components", "fluents", "actions", "statics", "gamma"}, at);
  CpsSystem out;
  if (const auto* comps = r.object(o, "components", at)) {
    for (const auto& [co, props] : comps->items()) {
      if (!props.is_array()) {
        r.fail(at + "/components/" + co, "expected an array");
        continue;
      }
      out.components[co] = r.string_set(&props, at + "/components/" + co);
    }
  }
  out.extra_fluents = r.string_set(r.array(o, "fluents", at), at + "/fluents");
  if (const auto* actions = r.array(o, "actions", at)) {
    for (std::size_t i = 0; i < actions->size(); ++i) {
      out.actions.push_back(read_action(r, (*actions)[i], at + "/actions/" + std::to_string(i)));
    }
  }
  std::stable_sort(out.actions.begin(), out.actions.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  if (const auto* statics = r.array(o, "statics", at)) {
    for (std::size_t i = 0; i < statics->size(); ++i) {
      const auto& s = (*statics)[i];
      const std::string where = at + "/statics/" + std::to_string(i);
      if (!s.is_object()) {
        r.fail(where, "expected an object");
        continue;
      }
      r.only_keys(s, {"heads", "body"}, where);
      out.statics.push_back({r.literals(r.array(s, "heads", where), where + "/heads"),
                             r.literals(r.array(s, "body", where), where + "/body")});
    }
  }
  if (const auto* gamma = r.array(o, "gamma", at)) {
    for (std::size_t i = 0; i < gamma->size(); ++i) {
      const auto& g = (*gamma)[i];
      const std::string where = at + "/gamma/" + std::to_string(i);
      if (!g.is_object() || !g.contains("concern") || !g.contains("function") || !g.contains("formula")) {
        r.fail(where, "expected an object with concern, function and formula");
        continue;
      }
      r.only_keys(g, {"concern", "function", "formula"}, where);
      DecompositionEntry e;
      e.concern = r.string(g["concern"], where + "/concern").value_or("");
      e.function = r.string(g["function"], where + "/function").value_or("");
      e.formula = r.formula(g["formula"], where + "/formula");
      out.gamma.push_back(std::move(e));
    }
  }
  return out;
}

AnalysisDefaults read_analysis(Reader& r, const json& o) {
  const std::string at = "/analysis";
  r.only_keys(o, {"weights", "priority", "evaluation_mode"}, at);
  AnalysisDefaults out;
  if (const auto* w = r.object(o, "weights", at)) {
    for (const auto& [k, v] : w->items()) {
      if (auto q = r.rational(v, at + "/weights/" + k)) out.weights[k] = *q;
    }
  }
  out.priority = r.strings(r.array(o, "priority", at), at + "/priority");
  if (auto m = o.find("evaluation_mode"); m != o.end() && !m->is_null()) {
    auto text = r.string(*m, at + "/evaluation_mode");
    if (text) {
      out.evaluation_mode = parse_evaluation_mode(*text);
      if (!out.evaluation_mode) r.fail(at + "/evaluation_mode", "expected plain or grounded", {*text});
    }
  }
  return out;
}

json literal_json(const FluentLiteral& l) { return l.str(); }

json literals_json(const LiteralList& ls) {
  json arr = json::array();
  for (const auto& l : ls) arr.push_back(literal_json(l));
  return arr;
}

json sorted_array(const std::set<std::string>& s) { return json(std::vector<std::string>(s.begin(), s.end())); }

json formula_json(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      return f.atom;
    case Formula::Kind::Not:
      if (f.children.front().kind == Formula::Kind::Atom) return "-" + f.children.front().atom;
      return json{{"not", formula_json(f.children.front())}};
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      json arr = json::array();
      for (const auto& c : f.children) arr.push_back(formula_json(c));
      return json{{f.kind == Formula::Kind::And ? "and" : "or", arr}};
    }
  }
  return nullptr;
}

void put(json& obj, const char* key, json value) {
  if ((value.is_array() || value.is_object()) && value.empty()) return;
  obj[key] = std::move(value);
}

}  // namespace

CpsTheory parse_theory(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto where = line_col(text, e.byte);
    throw Error(ErrorCode::Syntax, "syntax error at " + where,
                {{"SYNTAX", {}, "malformed JSON", where}});
  }

  Reader r;
  CpsTheory t;
  if (!doc.is_object()) {
    r.fail("", "expected a JSON object at the top level");
  } else {
    r.only_keys(doc, {"ontology", "system", "initial", "analysis"}, "");
    if (const auto* o = r.object(doc, "ontology", "")) t.ontology = read_ontology(r, *o);
    if (const auto* s = r.object(doc, "system", "")) t.system = read_system(r, *s);
    if (const auto* i = r.object(doc, "initial", "")) {
      r.only_keys(*i, {"true", "false"}, "/initial");
      t.initial.true_atoms = r.string_set(r.array(*i, "true", "/initial"), "/initial/true");
      t.initial.false_atoms = r.string_set(r.array(*i, "false", "/initial"), "/initial/false");
    }
    if (const auto* a = r.object(doc, "analysis", "")) t.analysis = read_analysis(r, *a);
  }
  if (!r.ok()) {
    auto diags = r.take();
    auto msg = "malformed document at " + (diags.front().where.empty() ? std::string("/") : diags.front().where) +
               ": " + diags.front().message;
    throw Error(ErrorCode::Syntax, msg, std::move(diags));
  }

  auto report = validate_ontology(t.ontology);
  if (report.empty()) report = validate_system(t);
  if (!report.empty()) {
    auto message = "theory failed validation: " + report.front().message;
    throw Error(ErrorCode::InvalidTheory, message, std::move(report));
  }
  return t;
}

std::string serialize_theory(const CpsTheory& t) {
  json ontology = json::object();
  {
    std::vector<const Concern*> concerns;
    for (const auto& c : t.ontology.concerns) concerns.push_back(&c);
    std::stable_sort(concerns.begin(), concerns.end(), [](auto* a, auto* b) { return a->id < b->id; });
    json arr = json::array();
    for (const auto* c : concerns) {
      json obj{{"id", c->id}};
      if (c->is_aspect) obj["aspect"] = true;
      put(obj, "subconcerns", json(c->subconcerns));
      arr.push_back(std::move(obj));
    }
    put(ontology, "concerns", std::move(arr));
    put(ontology, "properties", sorted_array(t.ontology.properties));
    json ab = json::object();
    for (const auto& [c, props] : t.ontology.addressed_by) {
      if (!props.empty()) ab[c] = sorted_array(props);
    }
    put(ontology, "addressed_by", std::move(ab));
    json pi = json::array();
    for (const auto& [p, c] : t.ontology.positive_impact) pi.push_back({p, c});
    put(ontology, "positive_impact", std::move(pi));
  }

  json system = json::object();
  {
    json comps = json::object();
    for (const auto& [co, props] : t.system.components) comps[co] = sorted_array(props);
    put(system, "components", std::move(comps));
    put(system, "fluents", sorted_array(t.system.extra_fluents));
    std::vector<const ActionSpec*> actions;
    for (const auto& a : t.system.actions) actions.push_back(&a);
    std::stable_sort(actions.begin(), actions.end(), [](auto* a, auto* b) { return a->id < b->id; });
    json arr = json::array();
    for (const auto* a : actions) {
      json obj{{"id", a->id}};
      json ex = json::array();
      for (const auto& cond : a->executable_if) ex.push_back(literals_json(cond));
      put(obj, "executable_if", std::move(ex));
      json causes = json::array();
      for (const auto& c : a->causes) {
        json cj{{"effect", literal_json(c.effect)}};
        put(cj, "if", literals_json(c.conditions));
        causes.push_back(std::move(cj));
      }
      put(obj, "causes", std::move(causes));
      json sw = json::array();
      for (const auto& s : a->success_with) {
        json sj{{"p", s.p.str()}};
        put(sj, "if", literals_json(s.conditions));
        sw.push_back(std::move(sj));
      }
      put(obj, "success_with", std::move(sw));
      arr.push_back(std::move(obj));
    }
    put(system, "actions", std::move(arr));
    json statics = json::array();
    for (const auto& law : t.system.statics) {
      json lj{{"heads", literals_json(law.heads)}};
      put(lj, "body", literals_json(law.body));
      statics.push_back(std::move(lj));
    }
    put(system, "statics", std::move(statics));
    json gamma = json::array();
    for (const auto& g : t.system.gamma) {
      gamma.push_back({{"concern", g.concern}, {"function", g.function}, {"formula", formula_json(g.formula)}});
    }
    put(system, "gamma", std::move(gamma));
  }

  json initial = json::object();
  put(initial, "true", sorted_array(t.initial.true_atoms));
  put(initial, "false", sorted_array(t.initial.false_atoms));

  json analysis = json::object();
  {
    json w = json::object();
    for (const auto& [k, v] : t.analysis.weights) w[k] = v.str();
    put(analysis, "weights", std::move(w));
    put(analysis, "priority", json(t.analysis.priority));
    if (t.analysis.evaluation_mode) analysis["evaluation_mode"] = std::string(to_string(*t.analysis.evaluation_mode));
  }

  json doc = json::object();
  put(doc, "ontology", std::move(ontology));
  put(doc, "system", std::move(system));
  put(doc, "initial", std::move(initial));
  put(doc, "analysis", std::move(analysis));
  return doc.dump(2) + "\n";
}

Theory load_theory(std::string_view text) { return Theory::compile(parse_theory(text)); }

Theory load_theory_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_theory(buf.str());
}

}  // namespace cpsr
