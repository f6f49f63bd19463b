#include "cpsr/api_service.hpp"
#include "cpsr/queries.hpp"
#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <cstdio>
#include <filesystem>
#include <future>
#include <thread>

using namespace cpsr;

namespace {

Json body_of(const HttpResponse& r) { return Json::parse(r.body); }

std::string open_session(Service& svc, const std::string& fixture) {
  auto r = svc.handle("POST", "/sessions", testing::read_fixture(fixture));
  REQUIRE(r.status == 201);
  return body_of(r)["result"]["session"].get<std::string>();
}

}  // namespace

TEST_CASE("error codes map to HTTP statuses") {
  CHECK(http_status(ErrorCode::Syntax) == 400);
  CHECK(http_status(ErrorCode::UnknownConcern) == 400);
  CHECK(http_status(ErrorCode::InvalidTheory) == 422);
  CHECK(http_status(ErrorCode::NotExecutable) == 409);
  CHECK(http_status(ErrorCode::BranchRequired) == 409);
  CHECK(http_status(ErrorCode::UniverseTooLarge) == 503);
  CHECK(http_status(ErrorCode::BudgetExceeded) == 503);
}

TEST_CASE("session lifecycle") {
  Service svc;
  auto id = open_session(svc, "lkas-mini.cpst.json");
  CHECK(id == "s1");
  CHECK(open_session(svc, "conflict.cpst.json") == "s2");

  auto state = svc.handle("GET", "/sessions/s1/state", "");
  CHECK(state.status == 200);
  auto sb = body_of(state);
  CHECK(sb["engine"]["name"] == "cpsr");
  CHECK(sb["query"] == "state");
  CHECK(sb["result"]["state"]["true"].size() == 11);

  CHECK(svc.handle("GET", "/sessions/s9/state", "").status == 404);
  CHECK(svc.handle("GET", "/nowhere", "").status == 404);
  CHECK(svc.handle("PUT", "/sessions/s1/state", "").status == 405);
  CHECK(svc.handle("POST", "/sessions/s1/query/astrology", "{}").status == 404);

  CHECK(svc.handle("DELETE", "/sessions/s2", "").status == 200);
  CHECK(svc.handle("GET", "/sessions/s2/state", "").status == 404);
}

TEST_CASE("bad documents and requests") {
  Service svc;
  auto bad = svc.handle("POST", "/sessions", "{");
  CHECK(bad.status == 400);
  CHECK(body_of(bad)["error"]["code"] == "SYNTAX");
  auto cyc = svc.handle("POST", "/sessions", testing::read_fixture("cycle.cpst.json"));
  CHECK(cyc.status == 422);
  CHECK(body_of(cyc)["error"]["code"] == "INVALID_THEORY");
  CHECK_FALSE(body_of(cyc)["error"]["diagnostics"].empty());

  open_session(svc, "lkas-mini.cpst.json");
  auto unknown = svc.handle("POST", "/sessions/s1/query/mitigate", R"({"concerns":["ghost"],"horizon":1})");
  CHECK(unknown.status == 400);
  CHECK(body_of(unknown)["error"]["code"] == "UNKNOWN_CONCERN");
  CHECK(svc.handle("POST", "/sessions/s1/query/satisfaction", R"({"colour":"red"})").status == 400);
  CHECK(svc.handle("POST", "/sessions/s1/query/satisfaction", "[1,").status == 400);

  auto full = open_session(svc, "lkas-full.cpst.json");
  auto big = svc.handle("POST", "/sessions/" + full + "/query/noncompliance",
                        R"({"sa":[],"sc":["integrity"],"n":1,"mode":"weak"})");
  CHECK(big.status == 503);
  CHECK(body_of(big)["error"]["code"] == "UNIVERSE_TOO_LARGE");
}

TEST_CASE("queries through the router") {
  Service svc;
  open_session(svc, "lkas-mini-attacked.cpst.json");
  auto sat = body_of(svc.handle("POST", "/sessions/s1/query/satisfaction", R"({"mode":"grounded"})"));
  CHECK(sat["mode"] == "grounded");
  CHECK(sat["result"]["concerns"]["integrity"]["satisfied"] == false);
  CHECK(sat["result"]["concerns"]["trustworthiness"]["satisfied"] == false);

  auto mit = body_of(svc.handle("POST", "/sessions/s1/query/mitigate",
                                R"({"concerns":["integrity"],"horizon":2,"policy":"max_probability","exact_length":true})"));
  const auto& plans = mit["result"]["plans"];
  std::vector<Json> best;
  for (auto i : mit["result"]["best"]) best.push_back(plans[i.get<std::size_t>()]["actions"]);
  REQUIRE(best.size() == 2);
  CHECK(best[0] == Json{"switM cam advanced_mode", "switM sam advanced_mode"});
  CHECK(best[1] == Json{"switM sam advanced_mode", "switM cam advanced_mode"});
  auto score = mit["result"]["scoreboard"][mit["result"]["best"][0].get<std::size_t>()]["score"];
  CHECK(score["num"] == 21);
  CHECK(score["den"] == 50);
  CHECK(score["decimal"] == "0.42");

  auto trust = svc.handle("POST", "/sessions/s1/query/trust", "{}");
  CHECK(trust.status == 200);
  auto los = body_of(svc.handle("POST", "/sessions/s1/query/los", "{}"));
  CHECK(los["mode"].is_null());
  auto nc = body_of(svc.handle("POST", "/sessions/s1/query/noncompliance",
                               R"({"sa":["tOff secure_boot"],"sc":["integrity"],"n":1,"mode":"weak"})"));
  CHECK(nc["result"]["verdict"] == true);
  CHECK(nc["result"]["witness"]["plan"] == Json{"tOff secure_boot"});
}

TEST_CASE("what-if does not move the session") {
  Service svc;
  open_session(svc, "lkas-mini.cpst.json");
  auto before = svc.handle("GET", "/sessions/s1/state", "").body;
  auto r = svc.handle("POST", "/sessions/s1/whatif", R"({"set":["-basic_mode"],"mode":"grounded"})");
  REQUIRE(r.status == 200);
  auto b = body_of(r);
  CHECK(b["query"] == "whatif");
  CHECK(b["result"]["concerns"]["integrity"]["satisfied"] == false);
  CHECK(svc.handle("GET", "/sessions/s1/state", "").body == before);

  auto broken = svc.handle("POST", "/sessions/s1/whatif", R"({"set":["active cam advanced_mode"]})");
  CHECK(broken.status == 422);
}

TEST_CASE("applying plans") {
  Service svc;
  open_session(svc, "lkas-mini-attacked.cpst.json");
  auto dead = svc.handle("POST", "/sessions/s1/apply", R"({"plan":["tOn basic_mode","tOn basic_mode"]})");
  CHECK(dead.status == 409);
  CHECK(body_of(dead)["error"]["code"] == "NOT_EXECUTABLE");

  auto ambiguous = svc.handle("POST", "/sessions/s1/apply", R"({"plan":["tOn basic_mode"]})");
  CHECK(ambiguous.status == 409);
  auto ab = body_of(ambiguous);
  CHECK(ab["error"]["code"] == "BRANCH_REQUIRED");
  CHECK(ab["error"]["final_states"].size() == 2);

  CHECK(svc.handle("POST", "/sessions/s1/apply", R"({"plan":["tOn basic_mode"],"branch":2})").status == 400);
  auto ok = svc.handle("POST", "/sessions/s1/apply", R"({"plan":["tOn basic_mode"],"branch":1})");
  REQUIRE(ok.status == 200);
  auto ob = body_of(ok);
  CHECK(ob["result"]["history"].size() == 1);
  auto sat = body_of(svc.handle("POST", "/sessions/s1/query/satisfaction", R"({"mode":"grounded"})"));
  CHECK(sat["result"]["concerns"]["integrity"]["satisfied"] == true);
}

TEST_CASE("snapshots restore sessions") {
  auto path = std::filesystem::temp_directory_path() / "cpsr-snapshot-test.json";
  std::filesystem::remove(path);
  std::string expected;
  {
    Service svc(Service::Options{path.string()});
    open_session(svc, "lkas-mini-attacked.cpst.json");
    REQUIRE(svc.handle("POST", "/sessions/s1/apply", R"({"plan":["tOn basic_mode"],"branch":0})").status == 200);
    expected = svc.handle("GET", "/sessions/s1/state", "").body;
    svc.save_snapshot();
  }
  Service restored(Service::Options{path.string()});
  CHECK(restored.handle("GET", "/sessions/s1/state", "").body == expected);
  CHECK(open_session(restored, "conflict.cpst.json") == "s2");
  std::filesystem::remove(path);
}

TEST_CASE("HTTP transport") {
  Service svc;
  std::promise<int> bound;
  ServeOptions opts;
  opts.port = 0;
  opts.cors = true;
  opts.on_listening = [&](int port) { bound.set_value(port); };
  std::thread server([&] { serve(svc, opts); });
  auto fut = bound.get_future();
  REQUIRE(fut.wait_for(std::chrono::seconds(10)) == std::future_status::ready);
  int port = fut.get();

  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/sessions", testing::read_fixture("lkas-mini.cpst.json"), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  CHECK(created->get_header_value("Access-Control-Allow-Origin") == "*");
  auto q = client.Post("/sessions/s1/query/satisfaction", "{}", "application/json");
  REQUIRE(q);
  CHECK(q->status == 200);
  CHECK(q->body == svc.handle("POST", "/sessions/s1/query/satisfaction", "{}").body);
  auto missing = client.Get("/sessions/s7/state");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto pre = client.Options("/sessions");
  REQUIRE(pre);
  CHECK(pre->status == 204);

  stop_serving();
  server.join();
}
