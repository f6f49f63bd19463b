#ifndef CPSR_ERROR_HPP
#define CPSR_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cpsr {

/// One validation finding. `code` is machine-readable (e.g. "CYCLE",
/// "IMPACT_WITHOUT_ADDRESS"), `ids` are the offending identifiers in sorted
/// order, `where` locates the finding in the source document when known
/// ("3:14" for syntax errors, a JSON pointer otherwise).
struct Diagnostic {
  std::string code;
  std::vector<std::string> ids;
  std::string message;
  std::string where;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
  friend auto operator<=>(const Diagnostic&, const Diagnostic&) = default;
};

using ValidationReport = std::vector<Diagnostic>;

enum class ErrorCode {
  Syntax,
  InvalidTheory,
  UnknownConcern,
  UnknownAction,
  UnknownAtom,
  UnknownAspect,
  NegativeWeight,
  DuplicatePriority,
  UniverseTooLarge,
  BudgetExceeded,
  NotExecutable,
  BranchAmbiguous,
  BranchRequired,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, ValidationReport diagnostics = {})
      : std::runtime_error(message), code_(code), diagnostics_(std::move(diagnostics)) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] const ValidationReport& diagnostics() const noexcept { return diagnostics_; }

 private:
  ErrorCode code_;
  ValidationReport diagnostics_;
};

}  // namespace cpsr

#endif  // CPSR_ERROR_HPP
