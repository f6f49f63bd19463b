#ifndef CPSR_QUERIES_HPP
#define CPSR_QUERIES_HPP

// Query execution and wire encoding shared by the CLI and the HTTP service,
// so both produce byte-identical bodies for identical inputs.

#include "cpsr/theory.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace cpsr {

using Json = nlohmann::json;

inline constexpr std::string_view kEngineName = "cpsr";
inline constexpr std::string_view kEngineVersion = "1.0.0";

enum class QueryKind { Satisfaction, Trust, Mitigate, Noncompliance, Los };

std::string_view to_string(QueryKind kind);
std::optional<QueryKind> parse_query_kind(std::string_view text);

/// {"num": ..., "den": ..., "decimal": "..."}; num/den are JSON integers when
/// they fit in 64 bits and strings otherwise.
Json rational_json(const Rational& r);
Json state_json(const Theory& t, const State& s);
Json diagnostics_json(const ValidationReport& diags);
Json error_json(const Error& e);

/// Runs one query against `state`. The request object may carry "whatif"
/// (literal list) overrides applied to `state` first. Throws Error.
Json run_query(QueryKind kind, const Theory& t, const State& state, const Json& request);

/// Applies literal overrides; the result must be a state.
/// Throws Error(InvalidArgument) for malformed input, Error(InvalidTheory)
/// when the override breaks a static law.
State apply_overrides(const Theory& t, const State& s, const Json& literals);

/// Envelope shared by every response body.
Json envelope(std::string_view query, std::optional<EvaluationMode> mode, Json result);

/// Canonical text of a response body.
std::string render(const Json& body);

}  // namespace cpsr

#endif  // CPSR_QUERIES_HPP
