#include "cpsr/api_service.hpp"

#include <httplib.h>

#include <atomic>
#include <csignal>
#include <iostream>

namespace cpsr {

namespace {

std::atomic<httplib::Server*> g_server{nullptr};

extern "C" void stop_on_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

void add_cors(httplib::Response& res) {
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
  res.set_header("Access-Control-Allow-Headers", "Content-Type");
}

}  // namespace

void stop_serving() {
  if (auto* s = g_server.load()) s->stop();
}

bool serve(Service& service, const ServeOptions& options) {
  httplib::Server server;
  auto forward = [&](const httplib::Request& req, httplib::Response& res) {
    auto out = service.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
    if (options.cors) add_cors(res);
  };
  server.Get(".*", forward);
  server.Post(".*", forward);
  server.Delete(".*", forward);
  server.Options(".*", [&](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    if (options.cors) add_cors(res);
  });

  int port = options.port;
  if (port == 0) {
    port = server.bind_to_any_port(options.host);
    if (port <= 0) return false;
  } else if (!server.bind_to_port(options.host, port)) {
    return false;
  }
  g_server = &server;
  auto old_int = std::signal(SIGINT, stop_on_signal);
  auto old_term = std::signal(SIGTERM, stop_on_signal);
  std::cerr << "listening on http://" << options.host << ":" << port << "\n";
  if (options.on_listening) options.on_listening(port);
  server.listen_after_bind();
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  g_server = nullptr;
  service.save_snapshot();
  return true;
}

}  // namespace cpsr
