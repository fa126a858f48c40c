#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wfc/bitset.hpp"
#include "wfc/program.hpp"

namespace wfc {

// Interpretations are bitsets over the full alphabet; which bits are
// meaningful (parameters or defined atoms) depends on the operation.
using Interpretation = DynBitset;

struct PartialInterpretation {
  Interpretation lower, upper;

  bool consistent() const { return lower.subset_of(upper); }
  bool exact() const { return lower == upper; }
  // precision order: lower bounds grow, upper bounds shrink
  bool leq_precision(const PartialInterpretation& other) const {
    return lower.subset_of(other.lower) && other.upper.subset_of(upper);
  }
  friend bool operator==(const PartialInterpretation&, const PartialInterpretation&) = default;
};

// Least/greatest elements of the defined-atom pair lattice.
PartialInterpretation least_precise(const Alphabet& alphabet);

// Builds a parameter interpretation from a bitmask: bit k of `mask` is the
// value of alphabet.params()[k].
Interpretation params_from_mask(const Alphabet& alphabet, std::uint64_t mask);

// Two-valued evaluation of a body formula under a full interpretation.
bool eval_expr(const Expr& e, const Interpretation& interpretation);

// Pairwise (lower, upper) evaluation: parameters are exact, defined atoms
// read the two bounds, negation swaps them. On consistent pairs this is
// Kleene's three-valued evaluation.
std::pair<bool, bool> eval_expr_pair(const Expr& e, const Alphabet& alphabet,
                                     const Interpretation& params, const Interpretation& lower,
                                     const Interpretation& upper);

// One application of the immediate consequence operator with the parameters
// fixed by `params`: heads whose body evaluates to true under `defs`.
Interpretation tp_step(const GroundProgram& program, const Interpretation& params,
                       const Interpretation& defs);

// One application of the three-valued immediate consequence operator.
PartialInterpretation fitting_step(const GroundProgram& program, const Interpretation& params,
                                   const PartialInterpretation& s);

// Least fixpoint of fitting_step in the precision order, from (empty, all).
PartialInterpretation kripke_kleene(const GroundProgram& program, const Interpretation& params);

struct WfStats {
  std::size_t strict_refinements = 0;
  std::size_t application_refinements = 0;
  std::size_t unfoundedness_refinements = 0;
};

// Well-founded fixpoint for the given parameter interpretation: alternates
// application refinements (to their fixpoint) with maximal unfoundedness
// refinements (the least fixpoint of the upper-bound operator, iterated from
// the empty set) until neither is strict.
PartialInterpretation well_founded(const GroundProgram& program, const Interpretation& params,
                                   WfStats* stats = nullptr);

// All total interpretations J whose defined part is the (exact) well-founded
// fixpoint for J's parameter part. Enumerates the parameter space, so the
// program must have few parameters.
std::vector<Interpretation> models_wf(const GroundProgram& program);

}  // namespace wfc
