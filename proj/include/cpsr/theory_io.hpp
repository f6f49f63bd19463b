#ifndef CPSR_THEORY_IO_HPP
#define CPSR_THEORY_IO_HPP

#include "cpsr/theory.hpp"

#include <string>
#include <string_view>

namespace cpsr {

/// Parses a .cpst.json document. Throws Error(Syntax) for malformed JSON or
/// shape errors and Error(InvalidTheory) for validation failures; either way
/// the diagnostics list carries every finding.
CpsTheory parse_theory(std::string_view text);

/// Canonical document: sorted keys, sorted set-valued arrays, empty
/// sections omitted, two-space indentation, trailing newline.
std::string serialize_theory(const CpsTheory& t);

/// parse_theory followed by Theory::compile.
Theory load_theory(std::string_view text);
Theory load_theory_file(const std::string& path);

}  // namespace cpsr

#endif  // CPSR_THEORY_IO_HPP
