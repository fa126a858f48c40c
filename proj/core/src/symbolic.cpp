#include "wfc/symbolic.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

namespace wfc {

bool SemanticEquivalence::same(FormulaRef a, FormulaRef b) {
  if (a == b) return true;
  return diagram(a) == diagram(b);
}

BddRef SemanticEquivalence::diagram(FormulaRef x) {
  if (auto it = cache_.find(x.index()); it != cache_.end()) return it->second;
  BddRef d = manager_.from_formula(store_, x);
  cache_.emplace(x.index(), d);
  return d;
}

FormulaPair eval_formula(const Expr& e, const PartialSymbolicInterpretation& s,
                         FormulaStore& store) {
  const Alphabet& alphabet = store.alphabet();
  switch (e.kind) {
    case Expr::Kind::True:
      return {store.mk_true(), store.mk_true()};
    case Expr::Kind::False:
      return {store.mk_false(), store.mk_false()};
    case Expr::Kind::Atom: {
      if (alphabet.is_param(e.atom)) {
        const FormulaRef v = store.mk_var(e.atom);
        return {v, v};
      }
      const auto i = alphabet.partition_index(e.atom);
      return {s.lower.at(i), s.upper.at(i)};
    }
    case Expr::Kind::Not: {
      const FormulaPair c = eval_formula(e.children.front(), s, store);
      return {store.mk_not(c.upper), store.mk_not(c.lower)};
    }
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      std::vector<FormulaRef> lows, ups;
      lows.reserve(e.children.size());
      ups.reserve(e.children.size());
      for (const auto& c : e.children) {
        const FormulaPair p = eval_formula(c, s, store);
        lows.push_back(p.lower);
        ups.push_back(p.upper);
      }
      if (e.kind == Expr::Kind::And) return {store.mk_and(lows), store.mk_and(ups)};
      return {store.mk_or(lows), store.mk_or(ups)};
    }
  }
  return {store.mk_false(), store.mk_false()};
}

SymbolicInterpretation consequence_step(const GroundProgram& program,
                                        const SymbolicInterpretation& a, FormulaStore& store) {
  PartialSymbolicInterpretation exact{a, a};
  std::vector<FormulaRef> out;
  out.reserve(program.body_formulas().size());
  for (const auto& body : program.body_formulas())
    out.push_back(eval_formula(body, exact, store).lower);
  return SymbolicInterpretation(std::move(out));
}

PartialSymbolicInterpretation partial_consequence_step(const GroundProgram& program,
                                                       const PartialSymbolicInterpretation& s,
                                                       FormulaStore& store) {
  std::vector<FormulaRef> lows, ups;
  lows.reserve(program.body_formulas().size());
  ups.reserve(program.body_formulas().size());
  for (const auto& body : program.body_formulas()) {
    const FormulaPair p = eval_formula(body, s, store);
    lows.push_back(p.lower);
    ups.push_back(p.upper);
  }
  return {SymbolicInterpretation(std::move(lows)), SymbolicInterpretation(std::move(ups))};
}

namespace {

bool same_interpretation(const SymbolicInterpretation& a, const SymbolicInterpretation& b,
                         EquivalenceOracle& oracle) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!oracle.same(a.at(i), b.at(i))) return false;
  return true;
}

bool same_state(const PartialSymbolicInterpretation& a, const PartialSymbolicInterpretation& b,
                EquivalenceOracle& oracle) {
  return same_interpretation(a.lower, b.lower, oracle) &&
         same_interpretation(a.upper, b.upper, oracle);
}

}  // namespace

PartialSymbolicInterpretation unfoundedness_refinement(const GroundProgram& program,
                                                       const PartialSymbolicInterpretation& s,
                                                       FormulaStore& store,
                                                       EquivalenceOracle& oracle) {
  const std::size_t bound = program.alphabet().defined().size();
  SymbolicInterpretation y = SymbolicInterpretation::constant(store, false);
  for (std::size_t step = 0; step < bound; ++step) {
    SymbolicInterpretation next =
        partial_consequence_step(program, PartialSymbolicInterpretation{s.lower, y}, store).upper;
    if (same_interpretation(next, y, oracle)) break;
    y = std::move(next);
  }
  return PartialSymbolicInterpretation{s.lower, std::move(y)};
}

PartialInterpretation concretise(const PartialSymbolicInterpretation& s, const Interpretation& i,
                                 const FormulaStore& store) {
  const Alphabet& alphabet = store.alphabet();
  std::vector<FormulaRef> roots;
  roots.reserve(2 * s.lower.size());
  for (auto r : s.lower.values()) roots.push_back(r);
  for (auto r : s.upper.values()) roots.push_back(r);
  const std::vector<bool> values = store.eval_many(roots, i);
  PartialInterpretation out{Interpretation(alphabet.size()), Interpretation(alphabet.size())};
  const auto& defined = alphabet.defined();
  for (std::size_t k = 0; k < defined.size(); ++k) {
    if (values[k]) out.lower.set(defined[k]);
    if (values[defined.size() + k]) out.upper.set(defined[k]);
  }
  return out;
}

bool is_exact(const PartialSymbolicInterpretation& s, const FormulaStore& store,
              BddManager& manager) {
  SemanticEquivalence oracle(manager, store);
  return same_interpretation(s.lower, s.upper, oracle);
}

FormulaRef theory_of(const SymbolicInterpretation& a, FormulaStore& store) {
  const Alphabet& alphabet = store.alphabet();
  std::vector<FormulaRef> parts;
  parts.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const FormulaRef head = store.mk_atom_var(alphabet.defined()[i]);
    const FormulaRef body = a.at(i);
    parts.push_back(store.mk_or({store.mk_and({head, body}),
                                 store.mk_and({store.mk_not(head), store.mk_not(body)})}));
  }
  return store.mk_and(parts);
}

std::pair<FormulaRef, FormulaRef> theory_bounds(const PartialSymbolicInterpretation& s,
                                                FormulaStore& store) {
  return {theory_of(s.lower, store), theory_of(s.upper, store)};
}

FormulaRef expr_to_formula(const Expr& e, FormulaStore& store,
                           const SymbolicInterpretation* defined_values) {
  const Alphabet& alphabet = store.alphabet();
  switch (e.kind) {
    case Expr::Kind::True:
      return store.mk_true();
    case Expr::Kind::False:
      return store.mk_false();
    case Expr::Kind::Atom:
      if (alphabet.is_param(e.atom)) return store.mk_var(e.atom);
      if (!defined_values)
        throw Error("formula mentions defined atom " + alphabet.name(e.atom) +
                    " but no substitution was provided");
      return defined_values->at_atom(alphabet, e.atom);
    case Expr::Kind::Not:
      return store.mk_not(expr_to_formula(e.children.front(), store, defined_values));
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      std::vector<FormulaRef> kids;
      kids.reserve(e.children.size());
      for (const auto& c : e.children) kids.push_back(expr_to_formula(c, store, defined_values));
      return e.kind == Expr::Kind::And ? store.mk_and(kids) : store.mk_or(kids);
    }
  }
  return store.mk_false();
}

BddManager& Trace::ensure_manager() {
  if (!manager)
    manager =
        std::make_unique<BddManager>(BddManager::for_params(program.alphabet(), var_order));
  return *manager;
}

bool Trace::is_exact() {
  if (!exact_) exact_ = wfc::is_exact(final_state(), *store, ensure_manager());
  return *exact_;
}

std::vector<std::string> Trace::three_valued_atoms() {
  BddManager& m = ensure_manager();
  SemanticEquivalence oracle(m, *store);
  const auto& s = final_state();
  std::vector<std::string> out;
  const auto& defined = program.alphabet().defined();
  for (std::size_t i = 0; i < defined.size(); ++i)
    if (!oracle.same(s.lower.at(i), s.upper.at(i)))
      out.push_back(program.alphabet().name(defined[i]));
  return out;
}

const std::vector<BddRef>& Trace::final_lower_diagrams() {
  if (final_lower_diagrams_.empty() && !program.alphabet().defined().empty()) {
    BddManager& m = ensure_manager();
    const auto& s = final_state();
    for (auto r : s.lower.values()) final_lower_diagrams_.push_back(m.from_formula(*store, r));
  }
  return final_lower_diagrams_;
}

Trace compile(const GroundProgram& program, const CompileOptions& options) {
  Trace trace(program);
  trace.backend = options.backend;
  trace.var_order = options.var_order;
  trace.store = std::make_unique<FormulaStore>(program.alphabet());
  FormulaStore& store = *trace.store;
  if (options.backend == Backend::bdd)
    trace.manager = std::make_unique<BddManager>(
        BddManager::for_params(program.alphabet(), options.var_order));

  StructuralEquivalence structural;
  std::optional<SemanticEquivalence> semantic;
  if (options.backend == Backend::bdd) semantic.emplace(*trace.manager, store);
  EquivalenceOracle& oracle =
      options.backend == Backend::bdd ? static_cast<EquivalenceOracle&>(*semantic) : structural;

  const std::size_t sigma_d = program.alphabet().defined().size();
  trace.initial = PartialSymbolicInterpretation{SymbolicInterpretation::constant(store, false),
                                                SymbolicInterpretation::constant(store, true)};
  trace.initial_watermark = store.node_count();

  PartialSymbolicInterpretation state = trace.initial;
  auto budget_left = [&]() {
    return !options.budget || trace.steps.size() < *options.budget;
  };
  auto record = [&](RefinementKind kind, PartialSymbolicInterpretation s) {
    trace.steps.push_back(TraceStep{kind, std::move(s), true, store.node_count()});
    if (kind == RefinementKind::application)
      ++trace.application_count;
    else
      ++trace.unfoundedness_count;
  };

  // Rounds: one application phase followed by one maximal unfoundedness
  // refinement. After |defined| unfoundedness refinements no strict one is
  // left, so one final application phase settles the result.
  for (std::size_t round = 0;; ++round) {
    bool phase_changed = false;
    for (std::size_t i = 0; i < sigma_d; ++i) {
      PartialSymbolicInterpretation next = partial_consequence_step(program, state, store);
      if (same_state(next, state, oracle)) break;
      if (!budget_left()) {
        trace.partial = true;
        return trace;
      }
      state = next;
      record(RefinementKind::application, std::move(next));
      phase_changed = true;
    }
    if (round >= sigma_d) break;

    PartialSymbolicInterpretation refined = unfoundedness_refinement(program, state, store, oracle);
    const bool uf_strict = !same_interpretation(refined.upper, state.upper, oracle);
    if (!uf_strict) {
      if (!phase_changed || options.backend == Backend::bdd) break;
      // circuit mode: the phase changed handles, maybe vacuously; keep going
      continue;
    }
    if (!budget_left()) {
      trace.partial = true;
      return trace;
    }
    state = refined;
    record(RefinementKind::unfoundedness, std::move(refined));
  }

  if (options.canonicalize) canonicalize(trace);
  return trace;
}

void canonicalize(Trace& trace) {
  BddManager& manager = trace.ensure_manager();
  FormulaStore& store = *trace.store;
  const auto& s = trace.final_state();
  auto rebuild = [&](const SymbolicInterpretation& a) {
    std::vector<FormulaRef> out;
    out.reserve(a.size());
    for (auto r : a.values()) out.push_back(manager.to_formula(manager.from_formula(store, r), store));
    return SymbolicInterpretation(std::move(out));
  };
  PartialSymbolicInterpretation canonical{rebuild(s.lower), rebuild(s.upper)};
  trace.canonical_state = std::move(canonical);
}

nlohmann::json trace_to_json(Trace& trace) {
  const Alphabet& alphabet = trace.program.alphabet();
  nlohmann::ordered_json j;
  j["backend"] = trace.backend == Backend::bdd ? "bdd" : "circuit";
  j["partial"] = trace.partial;
  j["exact"] = trace.is_exact();
  j["refinements"] = {{"application", trace.application_count},
                      {"unfoundedness", trace.unfoundedness_count}};
  j["steps"] = nlohmann::ordered_json::array();
  std::size_t index = 0;
  for (auto& step : trace.steps) {
    nlohmann::ordered_json sizes;
    const auto& defined = alphabet.defined();
    for (std::size_t i = 0; i < defined.size(); ++i) {
      const auto lo = trace.store->stats(step.state.lower.at(i));
      const auto up = trace.store->stats(step.state.upper.at(i));
      sizes[alphabet.name(defined[i])] = {
          {"lower", {{"nodes", lo.nodes}, {"depth", lo.depth}}},
          {"upper", {{"nodes", up.nodes}, {"depth", up.depth}}}};
    }
    j["steps"].push_back({{"i", index++},
                          {"kind", step.kind == RefinementKind::application ? "application"
                                                                            : "unfoundedness"},
                          {"strict", step.strict},
                          {"store_nodes", step.store_nodes},
                          {"sizes", std::move(sizes)}});
  }
  return j;
}

void write_trace_dot(std::ostream& os, const Trace& trace,
                     std::optional<std::size_t> step_index) {
  const Alphabet& alphabet = trace.program.alphabet();
  const std::size_t last = step_index.value_or(trace.steps.size());
  if (last > trace.steps.size()) throw Error("trace step index out of range");
  const PartialSymbolicInterpretation& s =
      last == 0 ? trace.initial
                : (step_index ? trace.steps[last - 1].state : trace.final_state());
  FormulaDotOptions options;
  options.graph_name = "compiled";
  const auto& defined = alphabet.defined();
  // Exact bounds share circuits; emit one root per component only when they
  // differ.
  for (std::size_t i = 0; i < defined.size(); ++i) {
    const FormulaRef lo = s.lower.at(i), up = s.upper.at(i);
    if (lo == up) {
      options.roots.emplace_back(alphabet.name(defined[i]), lo);
    } else {
      options.roots.emplace_back(alphabet.name(defined[i]) + ":t", lo);
      options.roots.emplace_back(alphabet.name(defined[i]) + ":p", up);
    }
  }
  options.layer_bounds.push_back(trace.initial_watermark);
  options.layer_labels.push_back("initial");
  for (std::size_t index = 0; index < last; ++index) {
    const auto& step = trace.steps[index];
    options.layer_bounds.push_back(step.store_nodes);
    options.layer_labels.push_back(
        "step " + std::to_string(index + 1) + ": " +
        (step.kind == RefinementKind::application ? "application" : "unfoundedness"));
  }
  trace.store->write_dot(os, options);
}

}  // namespace wfc
