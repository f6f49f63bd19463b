#include "cpsr/queries.hpp"

#include "cpsr/concern_eval.hpp"
#include "cpsr/los_metrics.hpp"
#include "cpsr/planner.hpp"
#include "cpsr/transition.hpp"
#include "cpsr/trust_rank.hpp"

#include <algorithm>
#include <initializer_list>

namespace cpsr {

std::string_view to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::Satisfaction: return "satisfaction";
    case QueryKind::Trust: return "trust";
    case QueryKind::Mitigate: return "mitigate";
    case QueryKind::Noncompliance: return "noncompliance";
    case QueryKind::Los: return "los";
  }
  return "satisfaction";
}

std::optional<QueryKind> parse_query_kind(std::string_view text) {
  for (auto k : {QueryKind::Satisfaction, QueryKind::Trust, QueryKind::Mitigate, QueryKind::Noncompliance,
                 QueryKind::Los}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

Json rational_json(const Rational& r) {
  Json out = Json::object();
  auto num = r.numerator_i64();
  auto den = r.denominator_i64();
  out["num"] = num ? Json(*num) : Json(r.numerator_string());
  out["den"] = den ? Json(*den) : Json(r.denominator_string());
  out["decimal"] = r.decimal();
  return out;
}

Json state_json(const Theory& t, const State& s) {
  return Json{{"true", t.true_atoms(s)}, {"false", t.false_atoms(s)}};
}

Json diagnostics_json(const ValidationReport& diags) {
  Json arr = Json::array();
  for (const auto& d : diags) {
    arr.push_back({{"code", d.code}, {"ids", d.ids}, {"message", d.message}, {"where", d.where}});
  }
  return arr;
}

Json error_json(const Error& e) {
  Json err{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (!e.diagnostics().empty()) err["diagnostics"] = diagnostics_json(e.diagnostics());
  return Json{{"engine", {{"name", kEngineName}, {"version", kEngineVersion}}}, {"error", err}};
}

Json envelope(std::string_view query, std::optional<EvaluationMode> mode, Json result) {
  return Json{{"engine", {{"name", kEngineName}, {"version", kEngineVersion}}},
              {"query", query},
              {"mode", mode ? Json(std::string(to_string(*mode))) : Json(nullptr)},
              {"result", std::move(result)}};
}

std::string render(const Json& body) { return body.dump(2) + "\n"; }

namespace {

[[noreturn]] void bad(const std::string& message) { throw Error(ErrorCode::InvalidArgument, message); }

void only_keys(const Json& req, std::initializer_list<std::string_view> keys) {
  for (const auto& [k, v] : req.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) bad("unexpected request field '" + k + "'");
  }
}

const Json* field(const Json& req, const char* key) {
  auto it = req.find(key);
  if (it == req.end() || it->is_null()) return nullptr;
  return &*it;
}

std::vector<std::string> string_list(const Json& req, const char* key, bool required) {
  const Json* v = field(req, key);
  if (!v) {
    if (required) bad(std::string("missing field '") + key + "'");
    return {};
  }
  if (!v->is_array()) bad(std::string("field '") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : *v) {
    if (!e.is_string()) bad(std::string("field '") + key + "' must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::optional<std::size_t> count(const Json& req, const char* key) {
  const Json* v = field(req, key);
  if (!v) return std::nullopt;
  if (!v->is_number_unsigned()) bad(std::string("field '") + key + "' must be a non-negative integer");
  return v->get<std::size_t>();
}

bool flag(const Json& req, const char* key) {
  const Json* v = field(req, key);
  if (!v) return false;
  if (!v->is_boolean()) bad(std::string("field '") + key + "' must be a boolean");
  return v->get<bool>();
}

Rational rational_value(const Json& v, const std::string& what) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) {
    if (auto r = Rational::parse(v.get<std::string>())) return *r;
  }
  bad(what + " must be an integer or a rational string");
}

EvaluationMode eval_mode(const Theory& t, const Json& req, const char* key, EvaluationMode fallback) {
  if (const Json* v = field(req, key)) {
    if (!v->is_string()) bad(std::string("field '") + key + "' must be plain or grounded");
    auto m = parse_evaluation_mode(v->get<std::string>());
    if (!m) bad(std::string("field '") + key + "' must be plain or grounded");
    return *m;
  }
  return t.source().analysis.evaluation_mode.value_or(fallback);
}

std::map<std::string, Rational> weights(const Theory& t, const Json& req) {
  if (const Json* v = field(req, "weights")) {
    if (!v->is_object()) bad("field 'weights' must be an object");
    std::map<std::string, Rational> out;
    for (const auto& [k, w] : v->items()) out[k] = rational_value(w, "weight '" + k + "'");
    check_weights(t, out);
    return out;
  }
  if (!t.source().analysis.weights.empty()) return t.source().analysis.weights;
  std::map<std::string, Rational> out;
  for (auto a : t.aspects()) out[t.concerns()[a].id] = Rational(1);
  return out;
}

std::vector<std::string> priority(const Theory& t, const Json& req) {
  if (field(req, "priority")) {
    auto p = string_list(req, "priority", false);
    check_priority(t, p);
    return p;
  }
  if (!t.source().analysis.priority.empty()) return t.source().analysis.priority;
  std::vector<std::string> out;
  for (auto a : t.aspects()) out.push_back(t.concerns()[a].id);
  return out;
}

Json weights_json(const std::map<std::string, Rational>& w) {
  Json out = Json::object();
  for (const auto& [k, v] : w) out[k] = rational_json(v);
  return out;
}

Json rationals_json(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(rational_json(r));
  return out;
}

Json satisfaction_query(const Theory& t, const State& s, EvaluationMode mode) {
  ConcernEvaluator eval(t, mode);
  Json concerns = Json::object();
  for (const auto& [id, st] : eval.satisfaction(s)) {
    concerns[id] = {{"satisfied", st.satisfied},
                    {"formula_value", st.formula_value},
                    {"failing_subconcerns", st.failing_subconcerns},
                    {"formula", lambda_formula(t, id).str()}};
  }
  return Json{{"state", state_json(t, s)}, {"concerns", concerns}};
}

Json trust_query(const Theory& t, const State& s, EvaluationMode mode) {
  auto r = rank_components(t, s, mode);
  Json scores = Json::array();
  for (const auto& sc : r.scores) {
    scores.push_back({{"component", sc.component},
                      {"pos_pairs", sc.pos_pairs},
                      {"npos_pairs", sc.npos_pairs},
                      {"tw", rational_json(sc.tw)},
                      {"impact", sc.impact}});
  }
  return Json{{"state", state_json(t, s)},
              {"scores", scores},
              {"most", r.most},
              {"least", r.least},
              {"ranking", r.ranking}};
}

Json los_query(const Theory& t, const State& s, const Json& req) {
  auto w = weights(t, req);
  auto p = priority(t, req);
  LosCalculator calc(t);
  auto entries = calc.entries(s);
  Json concerns = Json::object();
  for (std::size_t c = 0; c < entries.size(); ++c) {
    concerns[t.concerns()[c].id] = {{"deg_pos", rational_json(entries[c].deg_pos)},
                                    {"los", rational_json(entries[c].los)}};
  }
  return Json{{"state", state_json(t, s)},
              {"concerns", concerns},
              {"weights", weights_json(w)},
              {"weighted", rational_json(weighted_los(t, entries, w))},
              {"priority", p},
              {"lexicographic", rationals_json(los_vector(t, entries, p))}};
}

Json mitigate_query(const Theory& t, const State& s, const Json& req, EvaluationMode mode) {
  MitigationOptions opts;
  auto sigma = string_list(req, "concerns", true);
  if (sigma.empty()) bad("field 'concerns' must not be empty");
  opts.horizon = count(req, "horizon").value_or(0);
  if (opts.horizon < 1) bad("field 'horizon' must be at least 1");
  opts.minimal = flag(req, "minimal");
  opts.exact_length = flag(req, "exact_length");
  opts.budget = count(req, "budget").value_or(kDefaultNodeBudget);

  std::optional<PreferencePolicy> policy;
  if (const Json* p = field(req, "policy")) {
    if (!p->is_string()) bad("field 'policy' must be weighted, lexicographic or max_probability");
    PreferencePolicy pol;
    auto name = p->get<std::string>();
    if (name == "weighted") {
      pol.kind = PreferencePolicy::Kind::Weighted;
      pol.weights = weights(t, req);
    } else if (name == "lexicographic") {
      pol.kind = PreferencePolicy::Kind::Lexicographic;
      pol.priority = priority(t, req);
    } else if (name == "max_probability") {
      pol.kind = PreferencePolicy::Kind::MaxProbability;
    } else {
      bad("field 'policy' must be weighted, lexicographic or max_probability");
    }
    policy = std::move(pol);
  }

  auto plans = find_mitigations(t, s, sigma, mode, opts);
  Json plan_list = Json::array();
  for (const auto& p : plans) {
    Json finals = Json::array();
    for (const auto& f : p.final_states) finals.push_back(state_json(t, f));
    plan_list.push_back({{"actions", p.actions}, {"length", p.length()}, {"final_states", finals}});
  }
  Json out{{"start", state_json(t, s)},
           {"concerns", sigma},
           {"horizon", opts.horizon},
           {"minimal", opts.minimal},
           {"exact_length", opts.exact_length},
           {"plans", plan_list}};
  if (policy) {
    Json pj{{"kind", std::string(to_string(policy->kind))}};
    if (policy->kind == PreferencePolicy::Kind::Weighted) pj["weights"] = weights_json(policy->weights);
    if (policy->kind == PreferencePolicy::Kind::Lexicographic) pj["priority"] = policy->priority;
    out["policy"] = pj;
    if (plans.empty()) {
      out["best"] = Json::array();
      out["scoreboard"] = Json::array();
    } else {
      auto sel = select_preferred(t, plans, *policy, s);
      out["best"] = sel.best;
      Json board = Json::array();
      for (const auto& sc : sel.scoreboard) {
        Json e{{"plan", sc.plan}, {"actions", plans[sc.plan].actions}};
        if (sc.value) e["score"] = rational_json(*sc.value);
        if (policy->kind == PreferencePolicy::Kind::Lexicographic) e["vector"] = rationals_json(sc.vector);
        if (sc.error) e["error"] = *sc.error;
        board.push_back(std::move(e));
      }
      out["scoreboard"] = board;
    }
  }
  return out;
}

Json noncompliance_query(const Theory& t, const Json& req, EvaluationMode mode) {
  auto sa = string_list(req, "sa", true);
  auto sc = string_list(req, "sc", true);
  auto n = count(req, "n");
  if (!n) bad("missing field 'n'");
  NoncomplianceMode nm = NoncomplianceMode::Weak;
  if (const Json* m = field(req, "mode")) {
    if (!m->is_string() || (*m != "weak" && *m != "strong")) bad("field 'mode' must be weak or strong");
    nm = *m == "weak" ? NoncomplianceMode::Weak : NoncomplianceMode::Strong;
  }
  NoncomplianceOptions opts;
  opts.budget = count(req, "budget").value_or(kDefaultNodeBudget);
  auto r = detect_noncompliance(t, sa, sc, *n, nm, mode, opts);
  Json out{{"sa", sa}, {"sc", sc}, {"n", *n}, {"mode", std::string(to_string(nm))}, {"verdict", r.verdict}};
  if (r.witness) {
    out["witness"] = {{"initial", state_json(t, r.witness->initial)},
                      {"plan", r.witness->plan},
                      {"violated", r.witness->violated ? Json(*r.witness->violated) : Json(nullptr)}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

}  // namespace

State apply_overrides(const Theory& t, const State& s, const Json& literals) {
  if (!literals.is_array()) bad("what-if overrides must be an array of literals");
  State out = s;
  for (const auto& l : literals) {
    if (!l.is_string()) bad("what-if overrides must be an array of literals");
    Lit lit = t.parse_literal(l.get<std::string>());
    out.set(lit.fluent, lit.positive);
  }
  if (!is_state(out, t.laws())) {
    throw Error(ErrorCode::InvalidTheory, "the overridden assignment violates a static law",
                {{"NOT_A_STATE", {}, "the overridden assignment violates a static law", "/whatif"}});
  }
  return out;
}

Json run_query(QueryKind kind, const Theory& t, const State& state, const Json& request) {
  const Json req = request.is_null() ? Json::object() : request;
  if (!req.is_object()) bad("request body must be a JSON object");
  State s = state;
  if (const Json* w = field(req, "whatif")) s = apply_overrides(t, state, *w);

  switch (kind) {
    case QueryKind::Satisfaction: {
      only_keys(req, {"mode", "whatif"});
      auto mode = eval_mode(t, req, "mode", EvaluationMode::Plain);
      return envelope(to_string(kind), mode, satisfaction_query(t, s, mode));
    }
    case QueryKind::Trust: {
      only_keys(req, {"mode", "whatif"});
      auto mode = eval_mode(t, req, "mode", EvaluationMode::Plain);
      return envelope(to_string(kind), mode, trust_query(t, s, mode));
    }
    case QueryKind::Mitigate: {
      only_keys(req, {"concerns", "horizon", "mode", "minimal", "exact_length", "policy", "weights", "priority",
                      "budget", "whatif"});
      auto mode = eval_mode(t, req, "mode", EvaluationMode::Grounded);
      return envelope(to_string(kind), mode, mitigate_query(t, s, req, mode));
    }
    case QueryKind::Noncompliance: {
      only_keys(req, {"sa", "sc", "n", "mode", "evaluation_mode", "budget"});
      auto mode = eval_mode(t, req, "evaluation_mode", EvaluationMode::Grounded);
      return envelope(to_string(kind), mode, noncompliance_query(t, req, mode));
    }
    case QueryKind::Los: {
      only_keys(req, {"weights", "priority", "whatif"});
      return envelope(to_string(kind), std::nullopt, los_query(t, s, req));
    }
  }
  bad("unknown query");
}

}  // namespace cpsr
