#ifndef CPSR_API_SERVICE_HPP
#define CPSR_API_SERVICE_HPP

#include "cpsr/queries.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace cpsr {

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// HTTP status for an engine error.
int http_status(ErrorCode code);

/// Session store and request router. Transport-agnostic: serve() binds it to
/// HTTP, tests call handle() directly.
///
///   POST /sessions                               theory document -> 201
///   GET  /sessions/{id}/state
///   POST /sessions/{id}/query/{satisfaction|trust|mitigate|noncompliance|los}
///   POST /sessions/{id}/whatif                   {"set": [...], "mode"?}
///   POST /sessions/{id}/apply                    {"plan": [...], "branch"?}
///   DELETE /sessions/{id}
class Service {
 public:
  struct Options {
    /// Sessions are restored from and saved to this file when set.
    std::optional<std::string> snapshot_path;
  };

  Service() : Service(Options{}) {}
  explicit Service(Options options);

  HttpResponse handle(std::string_view method, std::string_view path, std::string_view body);

  /// Returns the new session id. Throws Error.
  std::string create_session(std::string_view document);

  void save_snapshot() const;

 private:
  struct Session {
    std::string id;
    std::string document;
    Theory theory;
    State current;
    Json history = Json::array();
    mutable std::mutex mu;
  };

  std::shared_ptr<Session> find(const std::string& id) const;
  void restore_snapshot();
  HttpResponse session_route(const std::shared_ptr<Session>& s, std::string_view method, std::string_view rest,
                             std::string_view body);
  Json state_body(const Session& s) const;

  Options options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8787;
  /// Adds permissive Access-Control-Allow-* headers for the console.
  bool cors = false;
  /// Called with the bound port once the socket is ready. Port 0 binds any
  /// free port.
  std::function<void(int)> on_listening;
};

/// Blocks until the server stops. Returns false if the port cannot be bound.
bool serve(Service& service, const ServeOptions& options);

/// Stops a running serve() call from another thread.
void stop_serving();

}  // namespace cpsr

#endif  // CPSR_API_SERVICE_HPP
