#ifndef CPSR_MODEL_HPP
#define CPSR_MODEL_HPP

// Domain types of a CPS theory: the concern ontology, the action domain and
// the initial configuration, exactly as written in a theory document. These
// are plain values with structural equality; `Theory` (theory.hpp) compiles a
// validated CpsTheory into the indexed form the reasoning modules use.

#include "cpsr/error.hpp"
#include "cpsr/rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cpsr {

enum class EvaluationMode { Plain, Grounded };

std::string_view to_string(EvaluationMode mode);
std::optional<EvaluationMode> parse_evaluation_mode(std::string_view text);

/// True for non-empty tokens of letters, digits and underscores.
bool is_valid_id(std::string_view id);

/// Canonical atom text for active(component, property).
std::string active_atom(std::string_view component, std::string_view property);

/// Fluent atom split into its parts. `component` is empty for plain atoms.
struct AtomParts {
  std::string component;
  std::string name;
  [[nodiscard]] bool is_active() const { return !component.empty(); }
};

/// Parses "p" or "active co p" (any run of blanks separates tokens).
std::optional<AtomParts> parse_atom(std::string_view text);

/// A signed fluent atom. `atom` holds the canonical atom text: a property
/// name, an extra fluent name, or "active <component> <property>".
struct FluentLiteral {
  std::string atom;
  bool positive = true;

  /// "p", "-p", "active cam p", "-active cam p".
  [[nodiscard]] std::string str() const { return positive ? atom : "-" + atom; }
  [[nodiscard]] FluentLiteral negated() const { return {atom, !positive}; }

  static std::optional<FluentLiteral> parse(std::string_view text);

  friend bool operator==(const FluentLiteral&, const FluentLiteral&) = default;
  friend auto operator<=>(const FluentLiteral&, const FluentLiteral&) = default;
};

using LiteralList = std::vector<FluentLiteral>;

/// Negation / conjunction / disjunction tree over fluent atoms. Empty `and`
/// is true, empty `or` is false.
struct Formula {
  enum class Kind { Atom, Not, And, Or };

  Kind kind = Kind::And;
  std::string atom;
  std::vector<Formula> children;

  static Formula make_atom(std::string atom);
  static Formula make_not(Formula f);
  static Formula make_and(std::vector<Formula> fs);
  static Formula make_or(std::vector<Formula> fs);

  /// Human-readable rendering, e.g. "and[secure_boot, or[a, b]]".
  [[nodiscard]] std::string str() const;

  friend bool operator==(const Formula&, const Formula&) = default;
};

/// Visits every atom occurring in `f`.
template <typename Fn>
void for_each_atom(const Formula& f, Fn&& fn) {
  if (f.kind == Formula::Kind::Atom) {
    fn(f.atom);
    return;
  }
  for (const auto& c : f.children) for_each_atom(c, fn);
}

struct Concern {
  std::string id;
  bool is_aspect = false;
  std::vector<std::string> subconcerns;

  friend bool operator==(const Concern&, const Concern&) = default;
};

struct Ontology {
  std::vector<Concern> concerns;
  std::set<std::string> properties;
  std::map<std::string, std::set<std::string>> addressed_by;
  /// (property, concern) pairs.
  std::set<std::pair<std::string, std::string>> positive_impact;

  [[nodiscard]] const Concern* find_concern(std::string_view id) const;

  friend bool operator==(const Ontology&, const Ontology&) = default;
};

/// `heads` has one literal for a classic static law; several heads form a
/// disjunctive law with exactly-one semantics.
struct StaticLaw {
  LiteralList heads;
  LiteralList body;

  friend bool operator==(const StaticLaw&, const StaticLaw&) = default;
};

struct DynamicLaw {
  FluentLiteral effect;
  LiteralList conditions;

  friend bool operator==(const DynamicLaw&, const DynamicLaw&) = default;
};

struct SuccessStatement {
  Rational p;
  LiteralList conditions;

  friend bool operator==(const SuccessStatement&, const SuccessStatement&) = default;
};

struct ActionSpec {
  std::string id;
  /// Executable when ANY condition set holds; no sets means always executable.
  std::vector<LiteralList> executable_if;
  std::vector<DynamicLaw> causes;
  std::vector<SuccessStatement> success_with;

  friend bool operator==(const ActionSpec&, const ActionSpec&) = default;
};

struct DecompositionEntry {
  std::string concern;
  std::string function;
  Formula formula;

  friend bool operator==(const DecompositionEntry&, const DecompositionEntry&) = default;
};

struct CpsSystem {
  /// Relation R: component -> related properties.
  std::map<std::string, std::set<std::string>> components;
  /// Fluents beyond prop(p) and active(co,p), e.g. on_cam.
  std::set<std::string> extra_fluents;
  std::vector<ActionSpec> actions;
  std::vector<StaticLaw> statics;
  std::vector<DecompositionEntry> gamma;

  friend bool operator==(const CpsSystem&, const CpsSystem&) = default;
};

struct InitialAssignment {
  std::set<std::string> true_atoms;
  std::set<std::string> false_atoms;

  friend bool operator==(const InitialAssignment&, const InitialAssignment&) = default;
};

struct AnalysisDefaults {
  std::map<std::string, Rational> weights;
  std::vector<std::string> priority;
  std::optional<EvaluationMode> evaluation_mode;

  friend bool operator==(const AnalysisDefaults&, const AnalysisDefaults&) = default;
};

struct CpsTheory {
  Ontology ontology;
  CpsSystem system;
  InitialAssignment initial;
  AnalysisDefaults analysis;

  friend bool operator==(const CpsTheory&, const CpsTheory&) = default;
};

/// Full fluent universe of a theory, sorted by atom text: every declared
/// property, every active(co,p) with p in R(co), and every extra fluent.
std::vector<std::string> fluent_universe(const CpsTheory& t);

/// Checks the ontology's relational shape. Diagnostics are sorted; the
/// report is empty iff every Ontology invariant holds.
ValidationReport validate_ontology(const Ontology& o);

/// Checks the system, initial assignment and analysis defaults against an
/// ontology assumed valid.
ValidationReport validate_system(const CpsTheory& t);

}  // namespace cpsr

#endif  // CPSR_MODEL_HPP
