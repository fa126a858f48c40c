#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wfc/bdd.hpp"
#include "wfc/concrete.hpp"
#include "wfc/expr.hpp"
#include "wfc/formula.hpp"
#include "wfc/program.hpp"

#include <json.hpp>

namespace wfc {

// Map from each defined atom to a circuit over the parameter atoms, stored
// densely in alphabet.defined() order.
class SymbolicInterpretation {
public:
  SymbolicInterpretation() = default;
  explicit SymbolicInterpretation(std::vector<FormulaRef> values) : values_(std::move(values)) {}

  static SymbolicInterpretation constant(FormulaStore& store, bool value) {
    return SymbolicInterpretation(std::vector<FormulaRef>(store.alphabet().defined().size(),
                                                          store.mk_const(value)));
  }

  std::size_t size() const { return values_.size(); }
  FormulaRef at(std::size_t defined_index) const { return values_.at(defined_index); }
  FormulaRef at_atom(const Alphabet& alphabet, AtomId atom) const {
    return values_.at(alphabet.partition_index(atom));
  }
  void set(std::size_t defined_index, FormulaRef value) { values_.at(defined_index) = value; }
  const std::vector<FormulaRef>& values() const { return values_; }

  friend bool operator==(const SymbolicInterpretation&, const SymbolicInterpretation&) = default;

private:
  std::vector<FormulaRef> values_;
};

// Pair of bounds; for every atom the lower formula must entail the upper one.
struct PartialSymbolicInterpretation {
  SymbolicInterpretation lower, upper;
  friend bool operator==(const PartialSymbolicInterpretation&,
                         const PartialSymbolicInterpretation&) = default;
};

struct FormulaPair {
  FormulaRef lower, upper;
};

// Decides whether two stored circuits denote the same function. The
// structural variant only certifies handle equality (sound, incomplete, no
// diagram work); the semantic variant converts to canonical diagrams.
class EquivalenceOracle {
public:
  virtual ~EquivalenceOracle() = default;
  virtual bool same(FormulaRef a, FormulaRef b) = 0;
};

class StructuralEquivalence final : public EquivalenceOracle {
public:
  bool same(FormulaRef a, FormulaRef b) override { return a == b; }
};

class SemanticEquivalence final : public EquivalenceOracle {
public:
  SemanticEquivalence(BddManager& manager, const FormulaStore& store)
      : manager_(manager), store_(store) {}
  bool same(FormulaRef a, FormulaRef b) override;
  BddRef diagram(FormulaRef x);

private:
  BddManager& manager_;
  const FormulaStore& store_;
  std::unordered_map<std::uint32_t, BddRef> cache_;
};

// Pairwise symbolic evaluation of a formula over the full alphabet:
// parameters become their own variable in both components, defined atoms read
// the two bounds, negation swaps and negates the components.
FormulaPair eval_formula(const Expr& e, const PartialSymbolicInterpretation& s,
                         FormulaStore& store);

// Exact-pair application of the parametrised immediate consequence operator.
SymbolicInterpretation consequence_step(const GroundProgram& program,
                                        const SymbolicInterpretation& a, FormulaStore& store);

// One application of the partial parametrised immediate consequence operator.
PartialSymbolicInterpretation partial_consequence_step(const GroundProgram& program,
                                                       const PartialSymbolicInterpretation& s,
                                                       FormulaStore& store);

// Maximal unfoundedness refinement: keeps the lower bounds and replaces the
// upper bounds by the least fixpoint of the upper-bound operator, iterated
// from the all-false interpretation. The iteration stops at a per-atom
// fixpoint certified by the oracle, or after |defined| steps, which the
// refinement-counting bound makes sufficient.
PartialSymbolicInterpretation unfoundedness_refinement(const GroundProgram& program,
                                                       const PartialSymbolicInterpretation& s,
                                                       FormulaStore& store,
                                                       EquivalenceOracle& oracle);

// Instantiates the bounds at a concrete parameter interpretation.
PartialInterpretation concretise(const PartialSymbolicInterpretation& s, const Interpretation& i,
                                 const FormulaStore& store);

bool is_exact(const PartialSymbolicInterpretation& s, const FormulaStore& store,
              BddManager& manager);

// Conjunction of the equivalences `q <-> definition of q`; defined atoms
// appear as circuit variables in the result.
FormulaRef theory_of(const SymbolicInterpretation& a, FormulaStore& store);

// (theory of lower bounds, theory of upper bounds) for anytime use.
std::pair<FormulaRef, FormulaRef> theory_bounds(const PartialSymbolicInterpretation& s,
                                                FormulaStore& store);

// Converts a formula over the full alphabet into a circuit over the
// parameters only, substituting each defined atom by its value under
// `defined_values`. Without a substitution map defined atoms are an error.
FormulaRef expr_to_formula(const Expr& e, FormulaStore& store,
                           const SymbolicInterpretation* defined_values = nullptr);

enum class Backend { circuit, bdd };
enum class RefinementKind { application, unfoundedness };

struct CompileOptions {
  Backend backend = Backend::bdd;
  std::optional<std::size_t> budget;  // max recorded refinement steps
  bool canonicalize = false;          // rebuild final formulas from their diagrams
  VarOrder var_order = VarOrder::first_mention;
};

struct TraceStep {
  RefinementKind kind;
  PartialSymbolicInterpretation state;
  bool strict = true;       // changed under the backend's detection
  std::size_t store_nodes;  // store watermark right after the step
};

// Full compilation record: the refinement sequence from (all-false, all-true)
// to the parametrised well-founded model, plus the owning store/manager.
class Trace {
public:
  GroundProgram program;
  std::unique_ptr<FormulaStore> store;
  std::unique_ptr<BddManager> manager;  // present in bdd mode, else created on demand
  Backend backend = Backend::bdd;
  PartialSymbolicInterpretation initial;
  std::size_t initial_watermark = 0;
  std::vector<TraceStep> steps;
  bool partial = false;
  std::size_t application_count = 0;
  std::size_t unfoundedness_count = 0;
  VarOrder var_order = VarOrder::first_mention;
  std::optional<PartialSymbolicInterpretation> canonical_state;

  explicit Trace(GroundProgram p) : program(std::move(p)) {}

  const PartialSymbolicInterpretation& final_state() const {
    if (canonical_state) return *canonical_state;
    return steps.empty() ? initial : steps.back().state;
  }

  BddManager& ensure_manager();
  bool is_exact();
  std::vector<std::string> three_valued_atoms();

  // Diagrams of the final lower bounds (equal to the upper bounds when the
  // model is exact), in alphabet.defined() order.
  const std::vector<BddRef>& final_lower_diagrams();

private:
  std::optional<bool> exact_;
  std::vector<BddRef> final_lower_diagrams_;
};

// Runs the deterministic refinement machine: maximal application refinements
// until non-strict, then one maximal unfoundedness refinement, until a full
// round is non-strict or the round bound is hit. The bdd backend detects
// strictness semantically; the circuit backend uses the refinement-counting
// bounds with handle equality as a shortcut.
Trace compile(const GroundProgram& program, const CompileOptions& options = {});

// Replaces the final state by per-atom circuits rebuilt from their diagrams.
void canonicalize(Trace& trace);

nlohmann::json trace_to_json(Trace& trace);

// DOT rendering of a trace state's circuits, one cluster per refinement
// layer. step_index 0 is the initial state, i the state after step i;
// defaults to the final state.
void write_trace_dot(std::ostream& os, const Trace& trace,
                     std::optional<std::size_t> step_index = std::nullopt);

}  // namespace wfc
