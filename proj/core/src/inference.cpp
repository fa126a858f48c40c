#include "wfc/inference.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <random>
#include <set>
#include <thread>

namespace wfc {

namespace {

// Exact compiled model or NonExactError naming the three-valued atoms.
const SymbolicInterpretation& require_exact(Trace& trace, const std::string& label) {
  if (!trace.is_exact()) throw NonExactError(label, trace.three_valued_atoms());
  return trace.final_state().lower;
}

BddRef evidence_diagram(Trace& trace, const Expr* evidence, const SymbolicInterpretation& defs) {
  BddManager& manager = trace.ensure_manager();
  if (!evidence) return manager.one();
  const FormulaRef substituted = expr_to_formula(*evidence, *trace.store, &defs);
  return manager.from_formula(*trace.store, substituted);
}

}  // namespace

std::uint64_t count_models(Trace& trace, const Expr* evidence) {
  const SymbolicInterpretation& model = require_exact(trace, "input");
  // Every parameter interpretation extends uniquely to a model, so counting
  // happens over the parameters after substituting the definitions away.
  return trace.ensure_manager().count_models(evidence_diagram(trace, evidence, model));
}

double wmc(Trace& trace, const Expr* evidence, const WeightFunction& weights) {
  const SymbolicInterpretation& model = require_exact(trace, "input");
  return trace.ensure_manager().wmc(evidence_diagram(trace, evidence, model), weights);
}

Rational wmc_exact(Trace& trace, const Expr* evidence, const WeightFunction& weights) {
  const SymbolicInterpretation& model = require_exact(trace, "input");
  return trace.ensure_manager().wmc_exact(evidence_diagram(trace, evidence, model), weights);
}

std::vector<BoundsStep> wmc_bounds(Trace& trace, const Expr* evidence,
                                   const WeightFunction& weights, WmcMode mode) {
  BddManager& manager = trace.ensure_manager();
  std::vector<BoundsStep> out;
  auto emit = [&](std::size_t index, std::string kind, const PartialSymbolicInterpretation& s) {
    BoundsStep step;
    step.index = index;
    step.kind = std::move(kind);
    const BddRef lo = evidence_diagram(trace, evidence, s.lower);
    const BddRef hi = evidence_diagram(trace, evidence, s.upper);
    if (mode == WmcMode::exact) {
      step.lower_exact = manager.wmc_exact(lo, weights);
      step.upper_exact = manager.wmc_exact(hi, weights);
      step.lower = rational_to_double(*step.lower_exact);
      step.upper = rational_to_double(*step.upper_exact);
    } else {
      step.lower = manager.wmc(lo, weights);
      step.upper = manager.wmc(hi, weights);
    }
    out.push_back(std::move(step));
  };
  emit(0, "initial", trace.initial);
  std::size_t index = 0;
  for (const auto& step : trace.steps)
    emit(++index, step.kind == RefinementKind::application ? "application" : "unfoundedness",
         step.state);
  return out;
}

std::vector<Interpretation> enumerate_models(Trace& trace, const Expr* evidence,
                                             std::size_t limit) {
  const SymbolicInterpretation& model = require_exact(trace, "input");
  BddManager& manager = trace.ensure_manager();
  const Alphabet& alphabet = trace.program.alphabet();
  const BddRef constraint = evidence_diagram(trace, evidence, model);
  const auto assignments = manager.enumerate_models(constraint, limit);
  const auto& lower_diagrams = trace.final_lower_diagrams();

  std::vector<Interpretation> out;
  out.reserve(assignments.size());
  const auto& params = alphabet.params();
  const auto& defined = alphabet.defined();
  for (const auto& assignment : assignments) {
    Interpretation j(alphabet.size());
    for (std::size_t level = 0; level < params.size(); ++level)
      if (assignment.test(level)) j.set(params[level]);
    for (std::size_t i = 0; i < defined.size(); ++i)
      if (manager.eval(lower_diagrams[i], assignment)) j.set(defined[i]);
    out.push_back(std::move(j));
  }
  return out;
}

EquivalenceResult check_equivalence(const GroundProgram& first, const GroundProgram& second) {
  auto names_of = [](const Alphabet& a, const std::vector<AtomId>& ids) {
    std::set<std::string> names;
    for (AtomId id : ids) names.insert(a.name(id));
    return names;
  };
  const Alphabet& a1 = first.alphabet();
  const Alphabet& a2 = second.alphabet();
  if (names_of(a1, a1.params()) != names_of(a2, a2.params()))
    throw AlphabetMismatchError("the programs declare different parameter atoms");
  if (names_of(a1, a1.defined()) != names_of(a2, a2.defined()))
    throw AlphabetMismatchError("the programs define different atoms");

  CompileOptions options;
  options.backend = Backend::bdd;
  Trace t1 = compile(first, options);
  Trace t2 = compile(second, options);
  const SymbolicInterpretation& m1 = require_exact(t1, "first");
  const SymbolicInterpretation& m2 = require_exact(t2, "second");

  // Shared manager over the first program's parameter order; formulas from
  // both stores are matched to it by atom name.
  BddManager manager = BddManager::for_params(a1);
  const auto& defined = a1.defined();
  std::vector<BddRef> d1(defined.size());
  std::vector<BddRef> d2(defined.size());
  for (std::size_t i = 0; i < defined.size(); ++i) {
    const std::string& name = a1.name(defined[i]);
    d1[i] = manager.from_formula(*t1.store, m1.at(i));
    d2[i] = manager.from_formula(*t2.store, m2.at_atom(a2, a2.require(name)));
  }

  EquivalenceResult result;
  for (std::size_t i = 0; i < defined.size(); ++i) {
    if (d1[i] == d2[i]) continue;
    result.equivalent = false;
    result.differing_atom = a1.name(defined[i]);
    const BddRef diff = manager.apply(BddOp::Xor, d1[i], d2[i]);
    const auto assignment = manager.any_model(diff);
    // diff is satisfiable since the diagrams differ
    for (std::size_t level = 0; level < manager.var_count(); ++level)
      if (assignment->test(level)) result.witness.push_back(manager.variables()[level]);
    for (std::size_t k = 0; k < defined.size(); ++k)
      if (manager.eval(d1[k], *assignment)) result.witness.push_back(a1.name(defined[k]));
    result.witness_model_of = 1;
    return result;
  }
  result.equivalent = true;
  return result;
}

OracleReport validate_against_oracle(Trace& trace, const OracleOptions& options) {
  const GroundProgram& program = trace.program;
  const Alphabet& alphabet = program.alphabet();
  const std::size_t n = alphabet.params().size();

  OracleReport report;
  std::vector<std::uint64_t> masks;
  if (n < 63 && (std::uint64_t{1} << n) <= options.exhaustive_threshold) {
    masks.resize(std::size_t{1} << n);
    for (std::uint64_t m = 0; m < masks.size(); ++m) masks[m] = m;
  } else {
    report.exhaustive = false;
    std::mt19937_64 rng(options.seed);
    masks.resize(options.samples);
    for (auto& m : masks) m = rng();
    if (n < 64)
      for (auto& m : masks) m &= (std::uint64_t{1} << n) - 1;
  }

  // Instantiation goes through the diagrams when the trace has them (cheap
  // path walks), else through the shared immutable store.
  const auto& s = trace.final_state();
  std::vector<BddRef> lower_d, upper_d;
  BddManager* manager = trace.manager.get();
  if (manager) {
    for (auto r : s.lower.values()) lower_d.push_back(manager->from_formula(*trace.store, r));
    for (auto r : s.upper.values()) upper_d.push_back(manager->from_formula(*trace.store, r));
  }

  std::atomic<std::uint64_t> first_bad{std::numeric_limits<std::uint64_t>::max()};
  unsigned thread_count = options.threads ? options.threads : std::thread::hardware_concurrency();
  if (thread_count == 0) thread_count = 1;
  thread_count = std::min<unsigned>(thread_count, 8);

  auto worker = [&](std::size_t begin, std::size_t end) {
    const auto& defined = alphabet.defined();
    for (std::size_t k = begin; k < end; ++k) {
      const Interpretation params = params_from_mask(alphabet, masks[k]);
      PartialInterpretation compiled{Interpretation(alphabet.size()),
                                     Interpretation(alphabet.size())};
      if (manager) {
        DynBitset assignment(manager->var_count());
        for (std::size_t level = 0; level < manager->var_count(); ++level)
          if ((masks[k] >> level) & 1) assignment.set(level);
        for (std::size_t i = 0; i < defined.size(); ++i) {
          if (manager->eval(lower_d[i], assignment)) compiled.lower.set(defined[i]);
          if (manager->eval(upper_d[i], assignment)) compiled.upper.set(defined[i]);
        }
      } else {
        compiled = concretise(s, params, *trace.store);
      }
      const PartialInterpretation expected = well_founded(program, params);
      if (!(compiled == expected)) {
        std::uint64_t seen = first_bad.load();
        while (masks[k] < seen && !first_bad.compare_exchange_weak(seen, masks[k])) {
        }
        return;
      }
    }
  };

  if (thread_count <= 1 || masks.size() < 256) {
    worker(0, masks.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (masks.size() + thread_count - 1) / thread_count;
    for (unsigned t = 0; t < thread_count; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(masks.size(), begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  report.checked = masks.size();
  if (first_bad.load() != std::numeric_limits<std::uint64_t>::max()) {
    report.pass = false;
    std::vector<std::string> names;
    const Interpretation params = params_from_mask(alphabet, first_bad.load());
    for (AtomId a : alphabet.params())
      if (params.test(a)) names.push_back(alphabet.name(a));
    report.witness_params = std::move(names);
  }
  return report;
}

}  // namespace wfc
