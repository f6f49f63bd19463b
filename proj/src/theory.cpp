#include "cpsr/theory.hpp"

#include <algorithm>
#include <map>

namespace cpsr {

struct Theory::Impl {
  CpsTheory source;
  std::vector<FluentInfo> fluents;
  std::map<std::string, FluentIndex, std::less<>> fluent_index;
  Dynamics dynamics;
  bool disjunctive = false;
  std::map<std::string, std::size_t, std::less<>> action_index;
  std::vector<CompiledConcern> concerns;
  std::map<std::string, std::size_t, std::less<>> concern_index;
  std::vector<std::size_t> bottom_up;
  std::vector<CompiledComponent> components;
  std::map<FluentIndex, std::vector<FluentIndex>> actives;
  State initial;

  Lit lit(const FluentLiteral& l) const { return {fluent_index.at(l.atom), l.positive}; }

  std::vector<Lit> lits(const LiteralList& ls) const {
    std::vector<Lit> out;
    out.reserve(ls.size());
    for (const auto& l : ls) out.push_back(lit(l));
    return out;
  }
};

Theory Theory::compile(CpsTheory source) {
  auto report = validate_ontology(source.ontology);
  if (report.empty()) report = validate_system(source);
  if (!report.empty()) {
    auto message = "theory failed validation: " + report.front().message;
    throw Error(ErrorCode::InvalidTheory, message, std::move(report));
  }

  auto impl = std::make_shared<Impl>();
  impl->source = std::move(source);
  const auto& t = impl->source;

  for (const auto& atom : fluent_universe(t)) {
    FluentInfo info;
    info.name = atom;
    auto parts = parse_atom(atom);
    if (parts->is_active()) {
      info.kind = FluentKind::Active;
      info.component = parts->component;
      info.property = parts->name;
    } else if (t.ontology.properties.count(atom)) {
      info.kind = FluentKind::Property;
      info.property = atom;
    }
    impl->fluent_index.emplace(atom, static_cast<FluentIndex>(impl->fluents.size()));
    impl->fluents.push_back(std::move(info));
  }

  impl->dynamics.fluent_count = impl->fluents.size();
  for (const auto& law : t.system.statics) {
    impl->dynamics.laws.push_back({impl->lits(law.heads), impl->lits(law.body)});
    impl->disjunctive = impl->disjunctive || law.heads.size() > 1;
  }

  std::vector<const ActionSpec*> actions;
  for (const auto& a : t.system.actions) actions.push_back(&a);
  std::sort(actions.begin(), actions.end(), [](auto* x, auto* y) { return x->id < y->id; });
  for (const auto* a : actions) {
    CompiledAction ca;
    ca.id = a->id;
    for (const auto& cond : a->executable_if) ca.executable_if.push_back(impl->lits(cond));
    for (const auto& c : a->causes) ca.causes.push_back({impl->lit(c.effect), impl->lits(c.conditions)});
    for (const auto& s : a->success_with) ca.success.push_back({s.p, impl->lits(s.conditions)});
    impl->action_index.emplace(ca.id, impl->dynamics.actions.size());
    impl->dynamics.actions.push_back(std::move(ca));
  }

  for (const auto& c : t.ontology.concerns) {
    impl->concern_index.emplace(c.id, impl->concerns.size());
    impl->concerns.push_back({c.id, c.is_aspect, std::nullopt, {}});
  }
  for (const auto& c : t.ontology.concerns) {
    auto parent = impl->concern_index.at(c.id);
    for (const auto& sub : c.subconcerns) {
      auto child = impl->concern_index.at(sub);
      impl->concerns[parent].children.push_back(child);
      impl->concerns[child].parent = parent;
    }
  }
  std::vector<bool> placed(impl->concerns.size(), false);
  auto place = [&](auto&& self, std::size_t c) -> void {
    if (placed[c]) return;
    placed[c] = true;
    for (auto child : impl->concerns[c].children) self(self, child);
    impl->bottom_up.push_back(c);
  };
  for (std::size_t c = 0; c < impl->concerns.size(); ++c) {
    if (!impl->concerns[c].parent) place(place, c);
  }

  for (const auto& [co, props] : t.system.components) {
    CompiledComponent cc;
    cc.id = co;
    for (const auto& p : props) {
      auto prop = impl->fluent_index.at(p);
      auto active = impl->fluent_index.at(active_atom(co, p));
      cc.relations.push_back({p, prop, active});
      impl->actives[prop].push_back(active);
    }
    impl->components.push_back(std::move(cc));
  }

  impl->initial = State(impl->fluents.size());
  for (const auto& atom : t.initial.true_atoms) impl->initial.set(impl->fluent_index.at(atom), true);

  Theory out;
  out.impl_ = std::move(impl);
  return out;
}

const CpsTheory& Theory::source() const { return impl_->source; }
std::size_t Theory::fluent_count() const { return impl_->fluents.size(); }
const FluentInfo& Theory::fluent(FluentIndex f) const { return impl_->fluents.at(f); }

std::optional<FluentIndex> Theory::find_fluent(std::string_view atom) const {
  auto it = impl_->fluent_index.find(atom);
  if (it == impl_->fluent_index.end()) return std::nullopt;
  return it->second;
}

Lit Theory::literal(const FluentLiteral& l) const {
  auto f = find_fluent(l.atom);
  if (!f) throw Error(ErrorCode::UnknownAtom, "unknown fluent '" + l.atom + "'");
  return {*f, l.positive};
}

FluentLiteral Theory::literal(Lit l) const { return {fluent(l.fluent).name, l.positive}; }

Lit Theory::parse_literal(std::string_view text) const {
  auto l = FluentLiteral::parse(text);
  if (!l) throw Error(ErrorCode::InvalidArgument, "malformed literal '" + std::string(text) + "'");
  return literal(*l);
}

const Dynamics& Theory::dynamics() const { return impl_->dynamics; }
const std::vector<CompiledLaw>& Theory::laws() const { return impl_->dynamics.laws; }
bool Theory::has_disjunctive_laws() const { return impl_->disjunctive; }
const std::vector<CompiledAction>& Theory::actions() const { return impl_->dynamics.actions; }

std::optional<std::size_t> Theory::find_action(std::string_view id) const {
  auto it = impl_->action_index.find(id);
  if (it == impl_->action_index.end()) return std::nullopt;
  return it->second;
}

std::size_t Theory::require_action(std::string_view id) const {
  auto a = find_action(id);
  if (!a) throw Error(ErrorCode::UnknownAction, "unknown action '" + std::string(id) + "'");
  return *a;
}

const std::vector<CompiledConcern>& Theory::concerns() const { return impl_->concerns; }

std::optional<std::size_t> Theory::find_concern(std::string_view id) const {
  auto it = impl_->concern_index.find(id);
  if (it == impl_->concern_index.end()) return std::nullopt;
  return it->second;
}

std::size_t Theory::require_concern(std::string_view id) const {
  auto c = find_concern(id);
  if (!c) throw Error(ErrorCode::UnknownConcern, "unknown concern '" + std::string(id) + "'");
  return *c;
}

const std::vector<std::size_t>& Theory::bottom_up() const { return impl_->bottom_up; }

std::vector<std::size_t> Theory::aspects() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < impl_->concerns.size(); ++c) {
    if (impl_->concerns[c].is_aspect) out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [&](auto a, auto b) { return impl_->concerns[a].id < impl_->concerns[b].id; });
  return out;
}

const std::vector<CompiledComponent>& Theory::components() const { return impl_->components; }

std::optional<FluentIndex> Theory::property_fluent(std::string_view p) const {
  auto f = find_fluent(p);
  if (!f || impl_->fluents[*f].kind != FluentKind::Property) return std::nullopt;
  return f;
}

const std::vector<FluentIndex>& Theory::active_fluents(FluentIndex prop) const {
  static const std::vector<FluentIndex> none;
  auto it = impl_->actives.find(prop);
  return it == impl_->actives.end() ? none : it->second;
}

const State& Theory::initial() const { return impl_->initial; }

std::vector<std::string> Theory::true_atoms(const State& s) const {
  std::vector<std::string> out;
  for (FluentIndex f = 0; f < s.size(); ++f) {
    if (s[f]) out.push_back(impl_->fluents[f].name);
  }
  return out;
}

std::vector<std::string> Theory::false_atoms(const State& s) const {
  std::vector<std::string> out;
  for (FluentIndex f = 0; f < s.size(); ++f) {
    if (!s[f]) out.push_back(impl_->fluents[f].name);
  }
  return out;
}

}  // namespace cpsr
