#include "cpsr/api_service.hpp"

#include "cpsr/theory_io.hpp"
#include "cpsr/transition.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace cpsr {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax:
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownConcern:
    case ErrorCode::UnknownAction:
    case ErrorCode::UnknownAtom:
    case ErrorCode::UnknownAspect:
    case ErrorCode::NegativeWeight:
    case ErrorCode::DuplicatePriority:
      return 400;
    case ErrorCode::InvalidTheory:
      return 422;
    case ErrorCode::NotExecutable:
    case ErrorCode::BranchAmbiguous:
    case ErrorCode::BranchRequired:
      return 409;
    case ErrorCode::UniverseTooLarge:
    case ErrorCode::BudgetExceeded:
      return 503;
  }
  return 500;
}

namespace {

std::vector<std::string_view> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    auto slash = path.find('/');
    auto part = path.substr(0, slash);
    if (!part.empty()) parts.push_back(part);
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  return parts;
}

HttpResponse respond(int status, const Json& body) { return {status, render(body)}; }

HttpResponse failure(const Error& e) { return respond(http_status(e.code()), error_json(e)); }

HttpResponse not_found(const std::string& what) {
  Json body = error_json(Error(ErrorCode::InvalidArgument, what));
  body["error"]["code"] = "NOT_FOUND";
  return respond(404, body);
}

HttpResponse method_not_allowed() {
  Json body = error_json(Error(ErrorCode::InvalidArgument, "method not allowed"));
  body["error"]["code"] = "METHOD_NOT_ALLOWED";
  return respond(405, body);
}

Json parse_body(std::string_view body) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return Json::object();
  try {
    return Json::parse(body.begin(), body.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("request body is not valid JSON: ") + e.what());
  }
}

// Phi-hat of `plan` from `from`, checked for executability.
std::vector<State> reach(const Theory& t, const Json& plan, const State& from) {
  if (!plan.is_array()) throw Error(ErrorCode::InvalidArgument, "field 'plan' must be an array of action ids");
  std::vector<std::string> ids;
  for (const auto& a : plan) {
    if (!a.is_string()) throw Error(ErrorCode::InvalidArgument, "field 'plan' must be an array of action ids");
    ids.push_back(a.get<std::string>());
  }
  auto finals = run(t, ids, from);
  if (finals.empty()) throw Error(ErrorCode::NotExecutable, "plan is not executable from the current state");
  return finals;
}

}  // namespace

Service::Service(Options options) : options_(std::move(options)) {
  if (options_.snapshot_path) restore_snapshot();
}

std::string Service::create_session(std::string_view document) {
  auto theory = load_theory(document);
  std::lock_guard lock(mu_);
  auto s = std::make_shared<Session>();
  s->id = "s" + std::to_string(next_id_++);
  s->document = std::string(document);
  s->current = theory.initial();
  s->theory = std::move(theory);
  sessions_.emplace(s->id, s);
  return s->id;
}

std::shared_ptr<Service::Session> Service::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Json Service::state_body(const Session& s) const {
  return envelope("state", std::nullopt,
                  Json{{"session", s.id}, {"state", state_json(s.theory, s.current)}, {"history", s.history}});
}

HttpResponse Service::handle(std::string_view method, std::string_view path, std::string_view body) {
  auto parts = split_path(path);
  try {
    if (parts.empty() || parts[0] != "sessions") return not_found("no route for " + std::string(path));
    if (parts.size() == 1) {
      if (method != "POST") return method_not_allowed();
      auto id = create_session(body);
      auto s = find(id);
      std::lock_guard lock(s->mu);
      Json out = state_body(*s);
      out["query"] = "session";
      return respond(201, out);
    }
    auto s = find(std::string(parts[1]));
    if (!s) return not_found("unknown session '" + std::string(parts[1]) + "'");
    std::string rest;
    for (std::size_t i = 2; i < parts.size(); ++i) rest += "/" + std::string(parts[i]);
    return session_route(s, method, rest, body);
  } catch (const Error& e) {
    return failure(e);
  } catch (const std::exception& e) {
    Json out = error_json(Error(ErrorCode::InvalidArgument, e.what()));
    out["error"]["code"] = "INTERNAL";
    return respond(500, out);
  }
}

HttpResponse Service::session_route(const std::shared_ptr<Session>& s, std::string_view method,
                                    std::string_view rest, std::string_view body) {
  if (rest.empty()) {
    if (method != "DELETE") return method_not_allowed();
    std::lock_guard lock(mu_);
    sessions_.erase(s->id);
    return respond(200, envelope("delete", std::nullopt, Json{{"session", s->id}}));
  }
  if (rest == "/state") {
    if (method != "GET") return method_not_allowed();
    std::lock_guard lock(s->mu);
    return respond(200, state_body(*s));
  }
  if (method != "POST") return method_not_allowed();
  const Json req = parse_body(body);

  if (rest.rfind("/query/", 0) == 0) {
    auto kind = parse_query_kind(rest.substr(7));
    if (!kind) return not_found("unknown query '" + std::string(rest.substr(7)) + "'");
    State snapshot;
    {
      std::lock_guard lock(s->mu);
      snapshot = s->current;
    }
    return respond(200, run_query(*kind, s->theory, snapshot, req));
  }

  if (rest == "/whatif") {
    if (!req.is_object() || !req.contains("set")) throw Error(ErrorCode::InvalidArgument, "missing field 'set'");
    State snapshot;
    {
      std::lock_guard lock(s->mu);
      snapshot = s->current;
    }
    Json sat_req = Json::object();
    for (const auto& [k, v] : req.items()) {
      if (k == "mode") {
        sat_req["mode"] = v;
      } else if (k != "set") {
        throw Error(ErrorCode::InvalidArgument, "unexpected request field '" + k + "'");
      }
    }
    State derived = apply_overrides(s->theory, snapshot, req["set"]);
    Json out = run_query(QueryKind::Satisfaction, s->theory, derived, sat_req);
    out["query"] = "whatif";
    out["result"]["set"] = req["set"];
    return respond(200, out);
  }

  if (rest == "/apply") {
    if (!req.is_object() || !req.contains("plan")) throw Error(ErrorCode::InvalidArgument, "missing field 'plan'");
    for (const auto& [k, v] : req.items()) {
      if (k != "plan" && k != "branch") throw Error(ErrorCode::InvalidArgument, "unexpected request field '" + k + "'");
    }
    std::lock_guard lock(s->mu);
    auto finals = reach(s->theory, req["plan"], s->current);
    std::size_t branch = 0;
    if (req.contains("branch") && !req["branch"].is_null()) {
      if (!req["branch"].is_number_unsigned()) throw Error(ErrorCode::InvalidArgument, "field 'branch' must be a non-negative integer");
      branch = req["branch"].get<std::size_t>();
      if (branch >= finals.size()) {
        throw Error(ErrorCode::InvalidArgument, "branch " + std::to_string(branch) + " out of range; the plan has " +
                                                    std::to_string(finals.size()) + " final states");
      }
    } else if (finals.size() > 1) {
      Json err = error_json(Error(ErrorCode::BranchRequired, "the plan has " + std::to_string(finals.size()) +
                                                                 " final states; choose one with 'branch'"));
      Json options = Json::array();
      for (const auto& f : finals) options.push_back(state_json(s->theory, f));
      err["error"]["final_states"] = options;
      return respond(409, err);
    }
    s->current = finals[branch];
    s->history.push_back({{"plan", req["plan"]}, {"branch", branch}});
    Json out = state_body(*s);
    out["query"] = "apply";
    return respond(200, out);
  }
  return not_found("no route for " + std::string(rest));
}

void Service::save_snapshot() const {
  if (!options_.snapshot_path) return;
  Json sessions = Json::array();
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, s] : sessions_) {
      std::lock_guard slock(s->mu);
      sessions.push_back({{"id", id}, {"document", s->document}, {"history", s->history}});
    }
  }
  std::ofstream out(*options_.snapshot_path, std::ios::binary | std::ios::trunc);
  out << Json{{"next_id", next_id_}, {"sessions", sessions}}.dump(2) << "\n";
}

void Service::restore_snapshot() {
  std::ifstream in(*options_.snapshot_path, std::ios::binary);
  if (!in) return;
  std::ostringstream buf;
  buf << in.rdbuf();
  Json snap = Json::parse(buf.str());
  for (const auto& entry : snap.at("sessions")) {
    auto s = std::make_shared<Session>();
    s->id = entry.at("id").get<std::string>();
    s->document = entry.at("document").get<std::string>();
    s->theory = load_theory(s->document);
    s->current = s->theory.initial();
    for (const auto& h : entry.at("history")) {
      auto finals = reach(s->theory, h.at("plan"), s->current);
      s->current = finals.at(h.at("branch").get<std::size_t>());
      s->history.push_back(h);
    }
    sessions_.emplace(s->id, s);
  }
  next_id_ = std::max<std::uint64_t>(next_id_, snap.value("next_id", std::uint64_t{1}));
}

}  // namespace cpsr
