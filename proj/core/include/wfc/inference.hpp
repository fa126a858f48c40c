#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wfc/bdd.hpp"
#include "wfc/concrete.hpp"
#include "wfc/expr.hpp"
#include "wfc/symbolic.hpp"

namespace wfc {

struct EquivalenceResult {
  bool equivalent = false;
  std::string differing_atom;         // a defined atom the two models disagree on
  std::vector<std::string> witness;   // true atoms of a distinguishing total interpretation
  int witness_model_of = 0;           // which input (1 or 2) the witness satisfies
};

// Compares the compiled models of two programs over identical alphabets.
// Both must compile to exact models; per-atom diagram equality decides
// equivalence and yields a concrete witness otherwise.
EquivalenceResult check_equivalence(const GroundProgram& first, const GroundProgram& second);

// Number of total interpretations that are models of the compiled program
// and satisfy the evidence. Requires an exact model; evidence may mention
// defined atoms, which are substituted by their compiled definitions.
std::uint64_t count_models(Trace& trace, const Expr* evidence = nullptr);

double wmc(Trace& trace, const Expr* evidence, const WeightFunction& weights);
Rational wmc_exact(Trace& trace, const Expr* evidence, const WeightFunction& weights);

enum class WmcMode { floating, exact };

struct BoundsStep {
  std::size_t index = 0;  // 0 is the initial state
  std::string kind;       // "initial", "application" or "unfoundedness"
  double lower = 0.0, upper = 0.0;
  std::optional<Rational> lower_exact, upper_exact;
};

// Anytime weighted-count bounds: for the initial state and every recorded
// refinement step, the weighted counts of the lower- and upper-bound
// theories conjoined with the evidence. Works on non-exact and truncated
// traces.
std::vector<BoundsStep> wmc_bounds(Trace& trace, const Expr* evidence,
                                   const WeightFunction& weights,
                                   WmcMode mode = WmcMode::floating);

// Deterministic list of total models of the compiled program satisfying the
// evidence, at most `limit`, in lexicographic parameter order.
std::vector<Interpretation> enumerate_models(Trace& trace, const Expr* evidence,
                                             std::size_t limit);

struct OracleOptions {
  std::uint64_t exhaustive_threshold = std::uint64_t{1} << 20;
  std::uint64_t samples = 4096;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct OracleReport {
  bool pass = true;
  bool exhaustive = true;
  std::uint64_t checked = 0;
  std::optional<std::vector<std::string>> witness_params;  // first mismatching interpretation
};

// Sweeps parameter interpretations (exhaustively up to the threshold, else a
// seeded sample) and checks that instantiating the compiled bounds matches
// the concrete well-founded fixpoint.
OracleReport validate_against_oracle(Trace& trace, const OracleOptions& options = {});

}  // namespace wfc
