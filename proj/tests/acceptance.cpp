// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "cpsr/api_service.hpp"
#include "cpsr/concern_eval.hpp"
#include "cpsr/los_metrics.hpp"
#include "cpsr/planner.hpp"
#include "cpsr/queries.hpp"
#include "cpsr/transition.hpp"
#include "cpsr/trust_rank.hpp"
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace cpsr;
using Seq = std::vector<std::string>;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (cond) return;
    if (ok) detail = what;
    ok = false;
  }
};

const Seq kA1 = {"tOn basic_mode"};
const Seq kA2 = {"switM cam advanced_mode", "switM sam advanced_mode"};
const Seq kA3 = {"switM sam advanced_mode", "switM cam advanced_mode"};
const Seq kA4 = {"switM sam advanced_mode", "tOn basic_mode"};
const Seq kA5 = {"switM cam advanced_mode", "tOn basic_mode"};

Theory mini() { return testing::load_fixture("lkas-mini.cpst.json"); }
State attacked() { return testing::load_fixture("lkas-mini-attacked.cpst.json").initial(); }

// 1 -------------------------------------------------------------------------
Outcome integrity_formula() {
  Outcome o;
  auto t = mini();
  auto atk = attacked();
  o.expect(lambda_formula(t, "integrity").str() ==
               "and[secure_boot, or[advanced_mode, basic_mode], or[saving_mode, normal_mode, powerful_mode]]",
           "lambda(integrity) differs");
  o.expect(concern_satisfied(t, "integrity", t.initial(), EvaluationMode::Plain), "I plain");
  o.expect(concern_satisfied(t, "integrity", t.initial(), EvaluationMode::Grounded), "I grounded");
  o.expect(!concern_satisfied(t, "integrity", atk, EvaluationMode::Grounded), "s_atk grounded");
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome transition_oracle() {
  Outcome o;
  std::mt19937 rng(20240601);
  std::size_t mismatches = 0, checks = 0, branching = 0;
  for (int i = 0; i < 1000; ++i) {
    auto d = testing::random_dynamics(rng, 10);
    auto states = testing::oracle_states(d);
    if (states.empty()) continue;
    for (int k = 0; k < 2; ++k) {
      const auto& s = states[std::uniform_int_distribution<std::size_t>(0, states.size() - 1)(rng)];
      for (std::size_t a = 0; a < d.actions.size(); ++a) {
        ++checks;
        auto got = step(d, a, s);
        branching += got.size() > 1;
        if (got != testing::oracle_step(d, a, s)) ++mismatches;
      }
    }
  }
  o.expect(mismatches == 0, std::to_string(mismatches) + " mismatches");
  o.detail = o.ok ? std::to_string(checks) + " steps, " + std::to_string(branching) + " branching" : o.detail;
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome example_mitigations() {
  Outcome o;
  auto t = mini();
  MitigationOptions opts;
  opts.horizon = 2;
  auto plans = find_mitigations(t, attacked(), {"integrity"}, EvaluationMode::Grounded, opts);
  std::vector<Seq> got;
  for (const auto& p : plans) got.push_back(p.actions);
  for (const auto& a : {kA1, kA2, kA3, kA4, kA5}) {
    o.expect(std::find(got.begin(), got.end(), a) != got.end(), "missing a reference strategy");
  }
  const std::vector<Seq> snapshot = {
      {"switM cam advanced_mode"},
      {"switM sam advanced_mode"},
      {"tOn basic_mode"},
      {"switM cam advanced_mode", "switM sam advanced_mode"},
      {"switM cam advanced_mode", "tOn basic_mode"},
      {"switM sam advanced_mode", "switM cam advanced_mode"},
      {"switM sam advanced_mode", "tOn basic_mode"},
      {"tOn basic_mode", "switM cam advanced_mode"},
      {"tOn basic_mode", "switM sam advanced_mode"},
  };
  o.expect(got == snapshot, "result list differs from snapshot");
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome example_degrees() {
  Outcome o;
  auto t = mini();
  auto atk = attacked();
  auto g1 = run(t, kA1, atk);
  if (g1.size() != 2) {
    o.expect(false, "alpha1 should have two outcomes");
    return o;
  }
  auto powerful = *t.find_fluent("active bat powerful_mode");
  if (!g1[0][powerful]) std::swap(g1[0], g1[1]);
  auto only = [&](const Seq& plan) { return run(t, plan, atk).at(0); };
  const std::vector<std::pair<State, Rational>> cases = {
      {g1[0], Rational(3, 5)},     {g1[1], Rational(2, 5)},     {only(kA2), Rational(4, 5)},
      {only(kA3), Rational(4, 5)}, {only(kA4), Rational(3, 5)}, {only(kA5), Rational(3, 5)},
  };
  for (const auto& [s, expected] : cases) o.expect(deg_pos(t, "integrity", s) == expected, "degree mismatch");
  o.expect(los_value(t, "integrity", only(kA2)) == Rational(4, 5), "LoS(integrity, G_alpha2)");
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome example_probabilities() {
  Outcome o;
  auto t = mini();
  auto atk = attacked();
  std::vector<Plan> plans;
  for (const auto& a : {kA1, kA2, kA3, kA4, kA5}) plans.push_back({a, run(t, a, atk)});
  PreferencePolicy policy;
  policy.kind = PreferencePolicy::Kind::MaxProbability;
  auto sel = select_preferred(t, plans, policy, atk);
  o.expect(sel.best == std::vector<std::size_t>{1, 2}, "best set is not {alpha2, alpha3}");
  for (auto b : sel.best) o.expect(sel.scoreboard[b].value == Rational(21, 50), "best score is not 21/50");
  return o;
}

// 6 -------------------------------------------------------------------------
bool oracle_geq(const testing::PairCounts& a, const testing::PairCounts& b) {
  Rational ta = Rational(a.pos) / Rational(a.npos + 1);
  Rational tb = Rational(b.pos) / Rational(b.npos + 1);
  if (ta != tb) return ta > tb;
  if (ta.is_zero()) return a.npos <= b.npos;
  return true;
}

Outcome trust_ordering() {
  Outcome o;
  std::mt19937 rng(77);
  for (int i = 0; i < 200; ++i) {
    auto t = Theory::compile(testing::random_static_theory(rng, 6));
    auto s = testing::random_state(rng, t.fluent_count());
    auto mode = i % 2 ? EvaluationMode::Plain : EvaluationMode::Grounded;
    auto scores = trust_scores(t, s, mode);
    auto oracle = testing::oracle_trust_pairs(t, s, mode);
    auto geq = [&](std::size_t a, std::size_t b) { return compare_trust(scores[a], scores[b]) >= 0; };
    for (std::size_t a = 0; a < scores.size(); ++a) {
      const auto& oa = oracle.at(scores[a].component);
      o.expect(oa.pos == scores[a].pos_pairs && oa.npos == scores[a].npos_pairs, "pair counts differ from oracle");
      for (std::size_t b = 0; b < scores.size(); ++b) {
        o.expect(geq(a, b) || geq(b, a), "not total");
        o.expect(geq(a, b) == oracle_geq(oa, oracle.at(scores[b].component)), "order differs from definition");
        for (std::size_t c = 0; c < scores.size(); ++c) {
          if (geq(a, b) && geq(b, c)) o.expect(geq(a, c), "not transitive");
        }
      }
    }
  }
  auto t = mini();
  auto r = rank_components(t, t.initial(), EvaluationMode::Plain);
  o.expect(r.most == Seq{"bat"}, "most != {bat}");
  o.expect(r.least == Seq{"cam", "sam"}, "least != {cam, sam}");
  auto oracle = testing::oracle_trust_pairs(t, t.initial(), EvaluationMode::Plain);
  for (const auto& sc : r.scores) {
    o.expect(oracle.at(sc.component).pos == sc.pos_pairs && oracle.at(sc.component).npos == sc.npos_pairs,
             "LKAS pair counts differ from oracle");
  }
  return o;
}

// 7 -------------------------------------------------------------------------
// Direct reading of the definition: every state, every executable sequence
// over SA of length 0..n. Uses the engine's run(), which criterion 2 checks
// against the fixpoint oracle.
std::pair<bool, bool> naive_noncompliance(const Theory& t, const Seq& sa, const Seq& sc, std::size_t n) {
  ConcernEvaluator eval(t, EvaluationMode::Grounded);
  bool some_bad = false, some_good = false;
  std::vector<Seq> seqs{{}};
  std::vector<Seq> layer{{}};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Seq> next;
    for (const auto& s : layer) {
      for (const auto& a : sa) {
        auto e = s;
        e.push_back(a);
        next.push_back(e);
      }
    }
    seqs.insert(seqs.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  for (const auto& init : testing::oracle_states(t.dynamics())) {
    for (const auto& plan : seqs) {
      auto finals = run(t, plan, init);
      if (finals.empty()) continue;
      bool good = true;
      for (const auto& f : finals) {
        for (const auto& c : sc) good = good && eval.satisfied(t.require_concern(c), f);
      }
      (good ? some_good : some_bad) = true;
    }
  }
  return {some_bad, !some_good};
}

bool valid_violation(const Theory& t, const NoncomplianceWitness& w) {
  if (!w.violated) return false;
  auto finals = run(t, w.plan, w.initial);
  if (finals.empty()) return false;
  for (const auto& f : finals) {
    if (!concern_satisfied(t, *w.violated, f, EvaluationMode::Grounded)) return true;
  }
  return false;
}

Outcome noncompliance() {
  Outcome o;
  auto conflict = testing::load_fixture("conflict.cpst.json");
  for (std::size_t n = 0; n <= 3; ++n) {
    auto r = detect_noncompliance(conflict, {"tOff p", "tOn p"}, {"c1", "c2"}, n, NoncomplianceMode::Strong,
                                  EvaluationMode::Grounded);
    o.expect(r.verdict, "conflict not strongly noncompliant at n=" + std::to_string(n));
    o.expect(r.verdict == naive_noncompliance(conflict, {"tOff p", "tOn p"}, {"c1", "c2"}, n).second,
             "conflict verdict differs from enumeration");
    o.expect(r.witness && valid_violation(conflict, *r.witness), "conflict witness invalid");
  }
  auto t = mini();
  auto r = detect_noncompliance(t, {"tOff secure_boot"}, {"integrity"}, 1, NoncomplianceMode::Weak,
                                EvaluationMode::Grounded);
  o.expect(r.verdict, "LKAS not weakly noncompliant");
  o.expect(r.verdict == naive_noncompliance(t, {"tOff secure_boot"}, {"integrity"}, 1).first,
           "LKAS verdict differs from enumeration");
  o.expect(r.witness && valid_violation(t, *r.witness), "LKAS witness invalid");
  return o;
}

// 8 -------------------------------------------------------------------------
Rational oracle_deg(const Theory& t, const std::string& c, const State& s) {
  const auto& src = t.source();
  std::int64_t all = 0, on = 0;
  for (const auto& [p, concern] : src.ontology.positive_impact) {
    if (concern != c) continue;
    auto ab = src.ontology.addressed_by.find(c);
    if (ab == src.ontology.addressed_by.end() || !ab->second.count(p)) continue;
    for (const auto& [x, props] : src.system.components) {
      if (!props.count(p)) continue;
      ++all;
      on += s[*t.find_fluent(active_atom(x, p))];
    }
  }
  return all == 0 ? Rational(1) : Rational(on, all);
}

std::map<std::string, Rational> random_weights(std::mt19937& rng, const Theory& t) {
  std::map<std::string, Rational> w;
  for (auto a : t.aspects()) w[t.concerns()[a].id] = Rational(std::uniform_int_distribution<int>(0, 9)(rng), 4);
  return w;
}

Outcome los_properties() {
  Outcome o;
  std::mt19937 rng(31337);
  for (int i = 0; i < 500; ++i) {
    auto src = testing::random_static_theory(rng);
    auto t = Theory::compile(src);
    auto s = testing::random_state(rng, t.fluent_count());
    LosCalculator calc(t);
    auto e = calc.entries(s);
    for (std::size_t c = 0; c < t.concerns().size(); ++c) {
      const auto& node = t.concerns()[c];
      o.expect(e[c].deg_pos >= Rational(0) && e[c].deg_pos <= Rational(1), "deg out of [0,1]");
      o.expect(e[c].deg_pos == oracle_deg(t, node.id, s), "deg differs from pair count");
      Rational product(1);
      for (auto ch : node.children) product *= e[ch].los;
      if (node.children.empty()) o.expect(e[c].los == e[c].deg_pos, "leaf LoS != deg");
      o.expect(e[c].los == e[c].deg_pos * product, "parent LoS != deg x children");
    }

    std::vector<FluentIndex> inactive;
    for (const auto& comp : t.components()) {
      for (const auto& rel : comp.relations) {
        if (!s[rel.active]) inactive.push_back(rel.active);
      }
    }
    if (!inactive.empty()) {
      auto s2 = s;
      s2.set(inactive[std::uniform_int_distribution<std::size_t>(0, inactive.size() - 1)(rng)], true);
      auto e2 = calc.entries(s2);
      for (std::size_t c = 0; c < e.size(); ++c) o.expect(e2[c].deg_pos >= e[c].deg_pos, "activation lowered deg");
    }

    auto w1 = random_weights(rng, t);
    auto w2 = random_weights(rng, t);
    Rational a(std::uniform_int_distribution<int>(0, 5)(rng), 3), b(std::uniform_int_distribution<int>(0, 5)(rng), 2);
    std::map<std::string, Rational> mix;
    for (const auto& [k, v] : w1) mix[k] = a * v + b * w2.at(k);
    o.expect(weighted_los(t, e, mix) == a * weighted_los(t, e, w1) + b * weighted_los(t, e, w2), "not linear");

    std::vector<Plan> plans;
    for (int p = 0; p < 4; ++p) {
      Plan plan{{"p" + std::to_string(p)}, {testing::random_state(rng, t.fluent_count())}};
      if (rng() % 2) plan.final_states.push_back(testing::random_state(rng, t.fluent_count()));
      plans.push_back(plan);
    }
    PreferencePolicy base;
    base.weights = w1;
    PreferencePolicy scaled = base;
    for (auto& [k, v] : scaled.weights) v *= Rational(7);
    o.expect(select_preferred(t, plans, base, s).best == select_preferred(t, plans, scaled, s).best,
             "argmax changed under scaling");
  }
  return o;
}

// 9 -------------------------------------------------------------------------
std::string capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
  pclose(pipe);
  return out;
}

Outcome round_trip_and_parity() {
  Outcome o;
  for (const char* name : {"lkas-mini.cpst.json", "lkas-mini-attacked.cpst.json", "conflict.cpst.json", "lkas-full.cpst.json"}) {
    auto text = testing::read_fixture(name);
    auto parsed = parse_theory(text);
    o.expect(parse_theory(serialize_theory(parsed)) == parsed, std::string("structural round-trip: ") + name);
    o.expect(serialize_theory(parsed) == text, std::string("byte round-trip: ") + name);
  }

  struct Case {
    std::string label, args, kind, request;
  };
  const std::vector<Case> cases = {
      {"Q1", "sat {f} --mode grounded", "satisfaction", R"({"mode":"grounded"})"},
      {"Q2", "trust {f}", "trust", "{}"},
      {"Q3", "mitigate {f} --concerns integrity --horizon 2", "mitigate", R"({"concerns":["integrity"],"horizon":2})"},
      {"Q4", "noncompliance {f} --sa 'tOff secure_boot' --sc integrity --n 1 --mode weak", "noncompliance",
       R"({"sa":["tOff secure_boot"],"sc":["integrity"],"n":1,"mode":"weak"})"},
      {"Q5", "mitigate {f} --concerns integrity --horizon 2 --policy prob", "mitigate",
       R"({"concerns":["integrity"],"horizon":2,"policy":"max_probability"})"},
      {"Q6", "los {f} --weights trustworthiness=2", "los", R"({"weights":{"trustworthiness":"2"}})"},
  };
  for (const char* name : {"lkas-mini.cpst.json", "lkas-mini-attacked.cpst.json"}) {
    Service svc;
    auto id = svc.create_session(testing::read_fixture(name));
    for (const auto& c : cases) {
      auto args = c.args;
      args.replace(args.find("{f}"), 3, "'" + testing::fixture_path(name) + "'");
      auto cli = capture(std::string("'") + CPSR_CLI_PATH + "' " + args + " 2>&1");
      auto http = svc.handle("POST", "/sessions/" + id + "/query/" + c.kind, c.request);
      o.expect(http.status == 200, c.label + " service status " + std::to_string(http.status));
      o.expect(!cli.empty() && cli == http.body, c.label + " CLI and service bodies differ on " + name);
    }
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string title;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "integrity formula and satisfaction", 1.0, integrity_formula},
      {2, "transition vs brute-force fixpoint oracle (1000 systems)", 60.0, transition_oracle},
      {3, "mitigation strategies alpha1..alpha5 from s_atk", 5.0, example_mitigations},
      {4, "positive impact degrees and LoS", 0.0, example_degrees},
      {5, "best plans by success probability = {alpha2, alpha3} at 21/50", 0.0, example_probabilities},
      {6, "trust ordering total and transitive (200 instances) + LKAS ranking", 0.0, trust_ordering},
      {7, "weak/strong noncompliance vs full enumeration", 30.0, noncompliance},
      {8, "LoS properties (500 instances)", 0.0, los_properties},
      {9, "round-trip on fixtures + CLI/service parity Q1-Q6", 0.0, round_trip_and_parity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      out.ok = false;
      out.detail = "over time limit";
    }
    failures += !out.ok;
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(3);
    line << (out.ok ? "PASS" : "FAIL") << "  " << c.id << "  " << c.title << "  [" << secs << " s";
    if (c.limit_s > 0) line << " / limit " << c.limit_s << " s";
    line << "]";
    if (!out.detail.empty()) line << "  " << out.detail;
    std::cout << line.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
