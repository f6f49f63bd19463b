#ifndef CPSR_THEORY_HPP
#define CPSR_THEORY_HPP

// Indexed, validated form of a CpsTheory. Fluents are numbered in ascending
// order of their atom text, so the natural order of State values is the
// canonical one.

#include "cpsr/model.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cpsr {

using FluentIndex = std::uint32_t;

struct Lit {
  FluentIndex fluent = 0;
  bool positive = true;

  [[nodiscard]] Lit negated() const { return {fluent, !positive}; }
  friend bool operator==(const Lit&, const Lit&) = default;
  friend auto operator<=>(const Lit&, const Lit&) = default;
};

/// Total truth assignment over a theory's fluents.
class State {
 public:
  State() = default;
  explicit State(std::size_t n) : bits_(n, false) {}

  [[nodiscard]] std::size_t size() const { return bits_.size(); }
  [[nodiscard]] bool operator[](FluentIndex f) const { return bits_[f]; }
  void set(FluentIndex f, bool v) { bits_[f] = v; }
  [[nodiscard]] bool holds(Lit l) const { return bits_[l.fluent] == l.positive; }
  [[nodiscard]] bool holds_all(const std::vector<Lit>& ls) const {
    for (const auto& l : ls) {
      if (!holds(l)) return false;
    }
    return true;
  }

  friend bool operator==(const State&, const State&) = default;
  friend std::strong_ordering operator<=>(const State& a, const State& b) {
    return a.bits_ <=> b.bits_;
  }

  [[nodiscard]] std::size_t hash() const { return std::hash<std::vector<bool>>{}(bits_); }

 private:
  std::vector<bool> bits_;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

enum class FluentKind { Property, Active, Plain };

struct FluentInfo {
  std::string name;
  FluentKind kind = FluentKind::Plain;
  std::string component;  // Active only
  std::string property;   // Property and Active
};

struct CompiledLaw {
  std::vector<Lit> heads;
  std::vector<Lit> body;
  [[nodiscard]] bool disjunctive() const { return heads.size() > 1; }
};

struct CompiledCause {
  Lit effect;
  std::vector<Lit> conditions;
};

struct CompiledSuccess {
  Rational p;
  std::vector<Lit> conditions;
};

struct CompiledAction {
  std::string id;
  std::vector<std::vector<Lit>> executable_if;
  std::vector<CompiledCause> causes;
  std::vector<CompiledSuccess> success;
};

/// The dynamic part of a system: fluent count, static laws and actions
/// (actions sorted by id). The transition functions work on this alone.
struct Dynamics {
  std::size_t fluent_count = 0;
  std::vector<CompiledLaw> laws;
  std::vector<CompiledAction> actions;
};

struct CompiledConcern {
  std::string id;
  bool is_aspect = false;
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
};

/// A component x together with the fluents of each p in R(x).
struct CompiledComponent {
  struct Relation {
    std::string property;
    FluentIndex prop;
    FluentIndex active;
  };
  std::string id;
  std::vector<Relation> relations;
};

class Theory {
 public:
  /// Validates and indexes. Throws Error(InvalidTheory) with the full
  /// diagnostic list when either validator reports anything.
  static Theory compile(CpsTheory source);

  [[nodiscard]] const CpsTheory& source() const;

  [[nodiscard]] std::size_t fluent_count() const;
  [[nodiscard]] const FluentInfo& fluent(FluentIndex f) const;
  [[nodiscard]] std::optional<FluentIndex> find_fluent(std::string_view atom) const;
  /// Throws Error(UnknownAtom).
  [[nodiscard]] Lit literal(const FluentLiteral& l) const;
  [[nodiscard]] FluentLiteral literal(Lit l) const;
  /// Throws Error(UnknownAtom) for unknown atoms, Error(InvalidArgument) for
  /// malformed text.
  [[nodiscard]] Lit parse_literal(std::string_view text) const;

  [[nodiscard]] const Dynamics& dynamics() const;
  [[nodiscard]] const std::vector<CompiledLaw>& laws() const;
  [[nodiscard]] bool has_disjunctive_laws() const;

  [[nodiscard]] const std::vector<CompiledAction>& actions() const;
  [[nodiscard]] std::optional<std::size_t> find_action(std::string_view id) const;
  /// Throws Error(UnknownAction).
  [[nodiscard]] std::size_t require_action(std::string_view id) const;

  [[nodiscard]] const std::vector<CompiledConcern>& concerns() const;
  [[nodiscard]] std::optional<std::size_t> find_concern(std::string_view id) const;
  /// Throws Error(UnknownConcern).
  [[nodiscard]] std::size_t require_concern(std::string_view id) const;
  /// Concern indices ordered so that every child precedes its parent.
  [[nodiscard]] const std::vector<std::size_t>& bottom_up() const;
  [[nodiscard]] std::vector<std::size_t> aspects() const;

  [[nodiscard]] const std::vector<CompiledComponent>& components() const;
  /// Fluent of prop(p), or nullopt for an unknown property.
  [[nodiscard]] std::optional<FluentIndex> property_fluent(std::string_view p) const;
  /// active(co,p) fluents for every co with p in R(co).
  [[nodiscard]] const std::vector<FluentIndex>& active_fluents(FluentIndex prop) const;

  [[nodiscard]] const State& initial() const;

  /// Positive literals as atom text, sorted.
  [[nodiscard]] std::vector<std::string> true_atoms(const State& s) const;
  [[nodiscard]] std::vector<std::string> false_atoms(const State& s) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace cpsr

#endif  // CPSR_THEORY_HPP
