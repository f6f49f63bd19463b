#include "cpsr/api_service.hpp"
#include "cpsr/theory_io.hpp"
#include "cpsr/transition.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using cpsr::Error;
using cpsr::ErrorCode;
using cpsr::Json;

constexpr int kExitFailure = 1;
constexpr int kExitLimits = 2;
constexpr int kExitUsage = 64;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    auto b = cur.find_first_not_of(' ');
    auto e = cur.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string rat(const Json& r) {
  if (r.is_null()) return "-";
  if (r.at("den") == 1) return r.at("num").dump();
  return r.at("num").dump() + "/" + r.at("den").dump() + " (" + r.at("decimal").get<std::string>() + ")";
}

std::string join(const Json& arr, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (i) out += sep;
    out += arr[i].is_string() ? arr[i].get<std::string>() : arr[i].dump();
  }
  return out;
}

void table(std::ostream& os, const Json& body) {
  const auto q = body.value("query", std::string());
  const Json& r = body.at("result");
  if (!body["mode"].is_null()) os << "mode: " << body["mode"].get<std::string>() << "\n";
  if (q == "check") {
    os << (r.at("valid").get<bool>() ? "valid" : "invalid") << "\n";
    for (const auto& d : r.at("diagnostics")) {
      os << "  " << d.at("code").get<std::string>() << " [" << join(d.at("ids"), ",") << "] "
         << d.at("message").get<std::string>() << (d.at("where") != "" ? " at " + d.at("where").get<std::string>() : "")
         << "\n";
    }
  } else if (q == "satisfaction") {
    for (const auto& [id, st] : r.at("concerns").items()) {
      os << std::left << std::setw(24) << id << (st.at("satisfied").get<bool>() ? "satisfied  " : "UNSATISFIED")
         << "  " << st.at("formula").get<std::string>() << "\n";
    }
  } else if (q == "trust") {
    os << std::left << std::setw(16) << "component" << std::setw(6) << "pos" << std::setw(6) << "npos"
       << "tw\n";
    for (const auto& s : r.at("scores")) {
      os << std::left << std::setw(16) << s.at("component").get<std::string>() << std::setw(6) << s.at("pos_pairs").dump()
         << std::setw(6) << s.at("npos_pairs").dump() << rat(s.at("tw")) << "\n";
    }
    os << "most:  " << join(r.at("most"), ", ") << "\nleast: " << join(r.at("least"), ", ") << "\n";
  } else if (q == "mitigate") {
    std::map<std::size_t, std::string> scores;
    std::set<std::size_t> best;
    if (r.contains("scoreboard")) {
      for (const auto& s : r.at("scoreboard")) {
        std::string text = s.contains("score") ? rat(s.at("score")) : "";
        if (s.contains("vector")) {
          text = "[";
          for (std::size_t i = 0; i < s.at("vector").size(); ++i) text += (i ? ", " : "") + rat(s.at("vector")[i]);
          text += "]";
        }
        if (s.contains("error")) text = s.at("error").get<std::string>();
        scores[s.at("plan").get<std::size_t>()] = text;
      }
      for (const auto& b : r.at("best")) best.insert(b.get<std::size_t>());
    }
    os << r.at("plans").size() << " plan(s)\n";
    for (std::size_t i = 0; i < r.at("plans").size(); ++i) {
      const auto& p = r.at("plans")[i];
      os << (best.count(i) ? "* " : "  ") << std::setw(3) << i << " [" << join(p.at("actions"), ", ") << "]  "
         << p.at("final_states").size() << " final state(s)";
      if (scores.count(i)) os << "  score " << scores[i];
      os << "\n";
    }
  } else if (q == "noncompliance") {
    os << r.at("mode").get<std::string>() << " " << r.at("n") << "-noncompliant: "
       << (r.at("verdict").get<bool>() ? "yes" : "no") << "\n";
    if (!r.at("witness").is_null()) {
      const auto& w = r.at("witness");
      os << "witness plan: [" << join(w.at("plan"), ", ") << "]";
      if (!w.at("violated").is_null()) os << " violates " << w.at("violated").get<std::string>();
      os << "\nwitness initial state: " << join(w.at("initial").at("true"), ", ") << "\n";
    }
  } else if (q == "los") {
    os << std::left << std::setw(24) << "concern" << std::setw(16) << "deg+" << "los\n";
    for (const auto& [id, e] : r.at("concerns").items()) {
      os << std::left << std::setw(24) << id << std::setw(16) << rat(e.at("deg_pos")) << rat(e.at("los")) << "\n";
    }
    os << "weighted: " << rat(r.at("weighted")) << "\n";
  } else {
    os << cpsr::render(body);
  }
}

struct Common {
  std::string file;
  std::string format = "json";
  std::string at;
  std::optional<std::size_t> branch;
  std::string whatif;
};

cpsr::State start_state(const cpsr::Theory& t, const Common& c) {
  if (c.at.empty()) {
    if (c.branch) throw Error(ErrorCode::InvalidArgument, "--branch needs --at");
    return t.initial();
  }
  auto finals = cpsr::run(t, split(c.at, ','), t.initial());
  if (finals.empty()) throw Error(ErrorCode::NotExecutable, "plan given with --at is not executable");
  if (c.branch) {
    if (*c.branch >= finals.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "--branch " + std::to_string(*c.branch) + " out of range; " + std::to_string(finals.size()) +
                      " final states");
    }
    return finals[*c.branch];
  }
  if (finals.size() > 1) {
    throw Error(ErrorCode::BranchRequired,
                "plan given with --at has " + std::to_string(finals.size()) + " final states; pass --branch");
  }
  return finals.front();
}

void emit(const Json& body, const std::string& format) {
  if (format == "table") {
    table(std::cout, body);
  } else {
    std::cout << cpsr::render(body);
  }
}

int report_error(const Error& e) {
  std::cerr << cpsr::render(cpsr::error_json(e));
  return e.code() == ErrorCode::UniverseTooLarge || e.code() == ErrorCode::BudgetExceeded ? kExitLimits
                                                                                           : kExitFailure;
}

Json weights_request(const std::string& text) {
  Json w = Json::object();
  for (const auto& kv : split(text, ',')) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--weights expects aspect=value pairs");
    w[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return w;
}

void add_common(CLI::App* cmd, Common& c, bool state_flags) {
  cmd->add_option("file", c.file, "Theory document (.cpst.json)")->required();
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "table"}));
  if (!state_flags) return;
  cmd->add_option("--at", c.at, "Comma-separated plan executed from the initial state first");
  cmd->add_option("--branch", c.branch, "Final state index when --at branches");
  cmd->add_option("--whatif", c.whatif, "Comma-separated literal overrides");
}

void add_whatif(Json& req, const Common& c) {
  if (!c.whatif.empty()) req["whatif"] = split(c.whatif, ',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning engine for cyber-physical system theories"};
  app.require_subcommand(1);
  Common c;

  auto* check = app.add_subcommand("check", "Validate a theory document");
  add_common(check, c, false);

  auto* canon = app.add_subcommand("canon", "Print the canonical form of a theory document");
  canon->add_option("file", c.file)->required();

  std::string mode;
  auto* sat = app.add_subcommand("sat", "Concern satisfaction");
  add_common(sat, c, true);
  sat->add_option("--mode", mode)->check(CLI::IsMember({"plain", "grounded"}));

  auto* trust = app.add_subcommand("trust", "Component trustworthiness");
  add_common(trust, c, true);
  trust->add_option("--mode", mode)->check(CLI::IsMember({"plain", "grounded"}));

  std::string concerns, policy, weights, priority;
  std::size_t horizon = 0;
  std::optional<std::size_t> budget;
  bool minimal = false, exact = false;
  auto* mitigate = app.add_subcommand("mitigate", "Mitigation strategies");
  add_common(mitigate, c, true);
  mitigate->add_option("--concerns", concerns, "Comma-separated target concerns")->required();
  mitigate->add_option("--horizon", horizon)->required();
  mitigate->add_option("--mode", mode)->check(CLI::IsMember({"plain", "grounded"}));
  mitigate->add_option("--policy", policy)->check(CLI::IsMember({"weighted", "lex", "prob"}));
  mitigate->add_option("--weights", weights, "aspect=value,...");
  mitigate->add_option("--priority", priority, "a>b>c");
  mitigate->add_option("--budget", budget);
  mitigate->add_flag("--minimal", minimal);
  mitigate->add_flag("--exact-length", exact);

  std::string sa, sc, nc_mode, eval;
  std::size_t n = 0;
  auto* nc = app.add_subcommand("noncompliance", "Weak or strong n-noncompliance");
  add_common(nc, c, false);
  nc->add_option("--sa", sa, "Comma-separated actions")->required();
  nc->add_option("--sc", sc, "Comma-separated concerns")->required();
  nc->add_option("--n", n)->required();
  nc->add_option("--mode", nc_mode)->required()->check(CLI::IsMember({"weak", "strong"}));
  nc->add_option("--eval", eval)->check(CLI::IsMember({"plain", "grounded"}));
  nc->add_option("--budget", budget);

  auto* los = app.add_subcommand("los", "Likelihood of satisfaction");
  add_common(los, c, true);
  los->add_option("--weights", weights, "aspect=value,...");
  los->add_option("--priority", priority, "a>b>c");

  cpsr::ServeOptions serve_opts;
  std::string snapshot;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("file", c.file, "Theory document to preload as a session");
  serve->add_option("--port", serve_opts.port);
  serve->add_option("--host", serve_opts.host);
  serve->add_flag("--cors", serve_opts.cors, "Allow cross-origin requests");
  serve->add_option("--snapshot", snapshot, "Session snapshot file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*check) {
      Json result{{"valid", true}, {"diagnostics", Json::array()}};
      int code = 0;
      try {
        auto t = cpsr::load_theory(read_file(c.file));
        result["summary"] = {{"concerns", t.concerns().size()},
                             {"components", t.components().size()},
                             {"fluents", t.fluent_count()},
                             {"actions", t.actions().size()},
                             {"statics", t.laws().size()},
                             {"gamma", t.source().system.gamma.size()}};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Syntax && e.code() != ErrorCode::InvalidTheory) throw;
        result["valid"] = false;
        result["diagnostics"] = cpsr::diagnostics_json(e.diagnostics());
        code = kExitFailure;
      }
      emit(cpsr::envelope("check", std::nullopt, result), c.format);
      return code;
    }
    if (*canon) {
      std::cout << cpsr::serialize_theory(cpsr::parse_theory(read_file(c.file)));
      return 0;
    }
    if (*serve) {
      cpsr::Service::Options so;
      if (!snapshot.empty()) so.snapshot_path = snapshot;
      cpsr::Service service(so);
      if (!c.file.empty()) std::cerr << "session " << service.create_session(read_file(c.file)) << "\n";
      if (!cpsr::serve(service, serve_opts)) {
        std::cerr << "cannot bind " << serve_opts.host << ":" << serve_opts.port << "\n";
        return kExitFailure;
      }
      return 0;
    }

    auto t = cpsr::load_theory(read_file(c.file));
    Json req = Json::object();
    cpsr::QueryKind kind = cpsr::QueryKind::Satisfaction;
    cpsr::State state = t.initial();
    if (*sat || *trust) {
      kind = *sat ? cpsr::QueryKind::Satisfaction : cpsr::QueryKind::Trust;
      if (!mode.empty()) req["mode"] = mode;
      add_whatif(req, c);
      state = start_state(t, c);
    } else if (*mitigate) {
      kind = cpsr::QueryKind::Mitigate;
      req["concerns"] = split(concerns, ',');
      req["horizon"] = horizon;
      if (!mode.empty()) req["mode"] = mode;
      if (minimal) req["minimal"] = true;
      if (exact) req["exact_length"] = true;
      if (!policy.empty()) {
        req["policy"] = policy == "lex" ? "lexicographic" : policy == "prob" ? "max_probability" : "weighted";
      }
      if (!weights.empty()) req["weights"] = weights_request(weights);
      if (!priority.empty()) req["priority"] = split(priority, '>');
      if (budget) req["budget"] = *budget;
      add_whatif(req, c);
      state = start_state(t, c);
    } else if (*nc) {
      kind = cpsr::QueryKind::Noncompliance;
      req["sa"] = split(sa, ',');
      req["sc"] = split(sc, ',');
      req["n"] = n;
      req["mode"] = nc_mode;
      if (!eval.empty()) req["evaluation_mode"] = eval;
      if (budget) req["budget"] = *budget;
    } else if (*los) {
      kind = cpsr::QueryKind::Los;
      if (!weights.empty()) req["weights"] = weights_request(weights);
      if (!priority.empty()) req["priority"] = split(priority, '>');
      add_whatif(req, c);
      state = start_state(t, c);
    }
    emit(cpsr::run_query(kind, t, state, req), c.format);
    return 0;
  } catch (const Error& e) {
    return report_error(e);
  }
}
