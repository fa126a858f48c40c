// Acceptance suite: runs every gate criterion and prints one pass/fail line
// per criterion. Exits nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "wfc/inference.hpp"
#include "wfc/parser.hpp"
#include "wfc/symbolic.hpp"

using namespace wfc;
using namespace testsupport;

namespace {

int g_failures = 0;

struct Check {
  bool ok = true;
  std::string first_failure;
  void expect(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      first_failure = what;
    }
  }
};

void run_criterion(int id, const std::string& label, double budget_seconds,
                   const std::function<void(Check&)>& body) {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.expect(false, std::string("exception: ") + e.what());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.expect(seconds <= budget_seconds,
               "runtime " + std::to_string(seconds) + "s over budget");
  if (check.ok) {
    std::printf("[PASS] criterion %d (%.2fs): %s\n", id, seconds, label.c_str());
  } else {
    std::printf("[FAIL] criterion %d (%.2fs): %s -- %s\n", id, seconds, label.c_str(),
                check.first_failure.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

bool equiv(Trace& trace, FormulaRef a, FormulaRef b) {
  SemanticEquivalence oracle(trace.ensure_manager(), *trace.store);
  return oracle.same(a, b);
}

bool atom_equals(Trace& trace, const std::string& atom, const std::string& lower_text,
                 const std::string& upper_text) {
  const Alphabet& al = trace.program.alphabet();
  const auto i = al.partition_index(al.require(atom));
  const auto& s = trace.final_state();
  return equiv(trace, s.lower.at(i), formula_of(lower_text, *trace.store)) &&
         equiv(trace, s.upper.at(i), formula_of(upper_text, *trace.store));
}

// ---- criterion 1 -----------------------------------------------------------

void golden_values(Check& check) {
  {  // smokers: the five-disjunct closed form
    Trace trace = compile(load_program("smokers.lp"));
    check.expect(trace.is_exact(), "smokers must compile exactly");
    const std::string a_s =
        "stress(a) | (stress(b) & fr(a,b)) | (stress(c) & fr(a,c))"
        " | (stress(c) & fr(b,c) & fr(a,b)) | (stress(b) & fr(c,b) & fr(a,c))";
    check.expect(atom_equals(trace, "smokes(a)", a_s, a_s), "smokers smokes(a) closed form");
  }
  {  // gear wheels: displayed refinement sequence, transition by transition
    const GroundProgram g = load_program("gearwheels.lp");
    Trace trace = compile(g);
    FormulaStore& store = *trace.store;
    BddManager& m = trace.ensure_manager();
    SemanticEquivalence oracle(m, store);

    auto state_of = [&](const std::vector<std::string>& lows,
                        const std::vector<std::string>& ups) {
      std::vector<FormulaRef> lo, up;
      for (const auto& t : lows) lo.push_back(formula_of(t, store));
      for (const auto& t : ups) up.push_back(formula_of(t, store));
      return PartialSymbolicInterpretation{SymbolicInterpretation(std::move(lo)),
                                           SymbolicInterpretation(std::move(up))};
    };
    auto states_equal = [&](const PartialSymbolicInterpretation& a,
                            const PartialSymbolicInterpretation& b) {
      for (std::size_t i = 0; i < a.lower.size(); ++i)
        if (!oracle.same(a.lower.at(i), b.lower.at(i)) ||
            !oracle.same(a.upper.at(i), b.upper.at(i)))
          return false;
      return true;
    };

    // defined order: turns1(0), turns2(0), turns1(1), turns2(1)
    const auto s0 = state_of({"false", "false", "false", "false"},
                             {"true", "true", "true", "true"});
    const auto s1 = state_of({"false", "false", "false", "false"},
                             {"false", "false", "true", "true"});
    const auto s2 = state_of({"false", "false", "button1(0)", "button2(0)"},
                             {"false", "false", "true", "true"});
    const auto s3 = state_of(
        {"false", "false", "button1(0) | button2(0)", "button2(0) | button1(0)"},
        {"false", "false", "true", "true"});
    const auto a_w = state_of(
        {"false", "false", "button1(0) | button2(0)", "button1(0) | button2(0)"},
        {"false", "false", "button1(0) | button2(0)", "button1(0) | button2(0)"});

    check.expect(states_equal(trace.initial, s0), "gear: compilation starts at (all-f, all-t)");
    check.expect(states_equal(partial_consequence_step(g, s0, store), s0),
                 "gear: the initial state is an application fixpoint");
    check.expect(states_equal(partial_consequence_step(g, s1, store), s2),
                 "gear: application step S1 -> S2");
    check.expect(states_equal(partial_consequence_step(g, s2, store), s3),
                 "gear: application step S2 -> S3");
    check.expect(states_equal(unfoundedness_refinement(g, s3, store, oracle), a_w),
                 "gear: final unfoundedness step S3 -> A_w");
    check.expect(states_equal(trace.final_state(), a_w), "gear: compiled result equals A_w");
    check.expect(atom_equals(trace, "turns1(1)", "button1(0) | button2(0)",
                             "button1(0) | button2(0)"),
                 "gear: A_w(turns1(1)) closed form");
  }
  {  // nt: published three-valued bounds
    Trace trace = compile(load_program("nt.lp"));
    check.expect(!trace.is_exact(), "nt must stay three-valued");
    check.expect(atom_equals(trace, "a", "false", "true"), "nt a bounds");
    check.expect(atom_equals(trace, "b", "false", "true"), "nt b bounds");
    check.expect(atom_equals(trace, "c", "e", "true"), "nt c bounds");
    check.expect(atom_equals(trace, "d", "false", "!e"), "nt d bounds");
  }
  {  // pdef: exact with d eliminated
    Trace trace = compile(load_program("pdef.lp"));
    check.expect(trace.is_exact(), "pdef must compile exactly");
    check.expect(atom_equals(trace, "b", "!a", "!a"), "pdef b");
    check.expect(atom_equals(trace, "c", "a | e", "a | e"), "pdef c");
    check.expect(atom_equals(trace, "d", "false", "false"), "pdef d");
  }
  {  // transitive closure: the lower bound of r(a,b) grows path by path
    Trace trace = compile(load_program("tc1.lp"));
    FormulaStore& store = *trace.store;
    const Alphabet& al = trace.program.alphabet();
    const auto r_ab = al.partition_index(al.require("r(a,b)"));
    check.expect(trace.initial.lower.at(r_ab) == store.mk_false(), "tc: starts false");
    check.expect(trace.steps.size() >= 2, "tc: at least two application steps");
    if (trace.steps.size() >= 2) {
      check.expect(
          equiv(trace, trace.steps[0].state.lower.at(r_ab), formula_of("e(a,b)", store)),
          "tc: first step derives the direct edge");
      check.expect(equiv(trace, trace.steps[1].state.lower.at(r_ab),
                         formula_of("e(a,b) | (e(a,c) & e(c,b))", store)),
                   "tc: second step adds the two-edge path");
    }
    check.expect(equiv(trace, trace.final_state().lower.at(r_ab),
                       formula_of("e(a,b) | (e(a,c) & e(c,b))", store)),
                 "tc: final value of r(a,b)");
  }
}

// ---- criterion 2 -----------------------------------------------------------

void oracle_equivalence(Check& check) {
  struct Item {
    const char* name;
    std::vector<std::string> domain;
    std::uint64_t expected_space;
  };
  const std::vector<Item> items = {
      {"smokers.lp", {}, 4096},
      {"gearwheels.lp", {}, 4},
      {"gearwheels2.lp", {}, 16},
      {"tc1.lp", {}, 512},
      {"tc2.lp", {}, 512},
      {"tc1.lp", {"d"}, std::uint64_t{1} << 16},
      {"tc2.lp", {"d"}, std::uint64_t{1} << 16},
      {"nt.lp", {}, 2},
      {"pdef.lp", {}, 4},
  };
  for (const auto& item : items) {
    Trace trace = compile(load_program(item.name, item.domain));
    const OracleReport report = validate_against_oracle(trace);
    std::ostringstream tag;
    tag << item.name << " (domain +" << item.domain.size() << ")";
    check.expect(report.exhaustive, tag.str() + ": sweep must be exhaustive");
    check.expect(report.checked == item.expected_space, tag.str() + ": sweep size");
    check.expect(report.pass, tag.str() + ": compiled bounds differ from the concrete fixpoint");
  }
}

// ---- criterion 3 -----------------------------------------------------------

void equivalence_checking(Check& check) {
  const std::vector<std::vector<std::string>> extra_domains = {{}, {"d"}, {"d", "f"}};
  for (const auto& extra : extra_domains) {
    const auto result =
        check_equivalence(load_program("tc1.lp", extra), load_program("tc2.lp", extra));
    check.expect(result.equivalent,
                 "tc definitions must agree over domain size " + std::to_string(3 + extra.size()));
  }

  const GroundProgram full = load_program("smokers.lp");
  std::string text = full.pretty();
  const std::string dropped = "smokes(a) :- fr(a,b), smokes(b).\n";
  const auto pos = text.find(dropped);
  check.expect(pos != std::string::npos, "mutation target rule must exist");
  text.erase(pos, dropped.size());
  text += "#param fr(a,b).\n";  // keep the now-unmentioned edge in the alphabet
  const GroundProgram mutated = ground(parse(text));
  const auto result = check_equivalence(full, mutated);
  check.expect(!result.equivalent, "dropping a rule must break equivalence");
  check.expect(!result.witness.empty(), "a distinguishing interpretation must be returned");

  // verify the witness against the concrete fixpoint semantics
  const Alphabet& al = full.alphabet();
  Interpretation j(al.size());
  for (const auto& name : result.witness) j.set(al.require(name));
  Interpretation params(al.size());
  for (AtomId a : al.params())
    if (j.test(a)) params.set(a);
  Interpretation j_defined(al.size());
  for (AtomId a : al.defined())
    if (j.test(a)) j_defined.set(a);
  const bool models_full = well_founded(full, params).lower == j_defined;
  const bool models_mutated = well_founded(mutated, params).lower == j_defined;
  check.expect(models_full != models_mutated, "witness must satisfy exactly one program");
}

// ---- criterion 4 -----------------------------------------------------------

void polynomial_growth(Check& check) {
  // circuit-mode output size over chain transitive-closure instances; the
  // output is the set of store nodes reachable from the final definitions
  std::vector<double> sizes;
  for (int n = 3; n <= 8; ++n) {
    const GroundProgram g = ground(parse(chain_tc_text(n)));
    CompileOptions options;
    options.backend = Backend::circuit;
    Trace trace = compile(g, options);
    check.expect(trace.is_exact(), "chain instances compile exactly (n=" + std::to_string(n) + ")");
    std::set<std::uint32_t> reachable;
    std::vector<std::uint32_t> stack;
    for (auto r : trace.final_state().lower.values())
      if (reachable.insert(r.index()).second) stack.push_back(r.index());
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (auto c : trace.store->node_at(i).children)
        if (reachable.insert(c.index()).second) stack.push_back(c.index());
    }
    sizes.push_back(static_cast<double>(reachable.size()));
  }
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    const double ratio = sizes[k] / sizes[k - 1];
    std::ostringstream what;
    what << "growth ratio n=" << (3 + k - 1) << "->" << (3 + k) << " is " << ratio
         << " (limit 4)";
    check.expect(ratio < 4.0, what.str());
  }
}

// ---- criterion 5 -----------------------------------------------------------

void anytime_bounds(Check& check) {
  Trace trace = compile(load_program("smokers.lp"));
  WeightFunction weights = WeightFunction::parse_file(program_path("smokers_weights.txt"));
  const Expr evidence = parse_evidence("smokes(a)", trace.program.alphabet());

  // independent exact value: exhaustive sweep of the concrete models
  Rational oracle_value(0);
  const GroundProgram& g = trace.program;
  for (const Interpretation& j : models_wf(g)) {
    if (!eval_expr(evidence, j)) continue;
    Rational product(1);
    for (AtomId a : g.alphabet().params()) {
      auto [wt, wf] = weights.get_exact(g.alphabet().name(a));
      product *= j.test(a) ? wt : wf;
    }
    oracle_value += product;
  }

  const auto exact_steps = wmc_bounds(trace, &evidence, weights, WmcMode::exact);
  check.expect(exact_steps.size() == trace.steps.size() + 1, "one bound pair per trace state");
  for (std::size_t i = 0; i < exact_steps.size(); ++i) {
    check.expect(*exact_steps[i].lower_exact <= oracle_value,
                 "rational lower bound exceeds the oracle at step " + std::to_string(i));
    check.expect(oracle_value <= *exact_steps[i].upper_exact,
                 "rational upper bound below the oracle at step " + std::to_string(i));
    if (i) {
      check.expect(*exact_steps[i - 1].lower_exact <= *exact_steps[i].lower_exact,
                   "rational lower bounds must be nondecreasing");
      check.expect(*exact_steps[i].upper_exact <= *exact_steps[i - 1].upper_exact,
                   "rational upper bounds must be nonincreasing");
    }
  }
  check.expect(*exact_steps.back().lower_exact == oracle_value &&
                   *exact_steps.back().upper_exact == oracle_value,
               "rational bounds must close on the oracle value");

  const double oracle_double = rational_to_double(oracle_value);
  const auto float_steps = wmc_bounds(trace, &evidence, weights, WmcMode::floating);
  for (std::size_t i = 0; i < float_steps.size(); ++i) {
    check.expect(float_steps[i].lower <= oracle_double + 1e-9,
                 "float lower bound exceeds the oracle at step " + std::to_string(i));
    check.expect(oracle_double <= float_steps[i].upper + 1e-9,
                 "float upper bound below the oracle at step " + std::to_string(i));
    if (i) {
      check.expect(float_steps[i - 1].lower <= float_steps[i].lower + 1e-9,
                   "float lower bounds must be nondecreasing");
      check.expect(float_steps[i].upper <= float_steps[i - 1].upper + 1e-9,
                   "float upper bounds must be nonincreasing");
    }
  }
}

// ---- criterion 6 -----------------------------------------------------------

void property_suites(Check& check) {
  constexpr int cases = 1000;

  {  // partial consequence step: precision monotone, consistency preserving
    std::mt19937_64 rng(1001);
    for (int t = 0; t < cases; ++t) {
      const GroundProgram g = random_ground_program(rng);
      FormulaStore store(g.alphabet());
      BddManager m = BddManager::for_params(g.alphabet());
      const std::size_t n = g.alphabet().defined().size();
      std::vector<FormulaRef> lo_s, up_s, lo_t, up_t;
      for (std::size_t i = 0; i < n; ++i) {
        const FormulaRef core = random_formula(store, rng);
        const FormulaRef tight_lo = store.mk_and({core, random_formula(store, rng)});
        const FormulaRef tight_up = store.mk_or({core, random_formula(store, rng)});
        lo_t.push_back(tight_lo);
        up_t.push_back(tight_up);
        lo_s.push_back(store.mk_and({tight_lo, random_formula(store, rng)}));
        up_s.push_back(store.mk_or({tight_up, random_formula(store, rng)}));
      }
      const PartialSymbolicInterpretation s{SymbolicInterpretation(lo_s),
                                            SymbolicInterpretation(up_s)};
      const PartialSymbolicInterpretation tighter{SymbolicInterpretation(lo_t),
                                                  SymbolicInterpretation(up_t)};
      const auto fs = partial_consequence_step(g, s, store);
      const auto ft = partial_consequence_step(g, tighter, store);
      for (std::size_t i = 0; i < n; ++i) {
        const BddRef fs_lo = m.from_formula(store, fs.lower.at(i));
        const BddRef fs_up = m.from_formula(store, fs.upper.at(i));
        const BddRef ft_lo = m.from_formula(store, ft.lower.at(i));
        const BddRef ft_up = m.from_formula(store, ft.upper.at(i));
        check.expect(implies(fs_lo, ft_lo, m), "psi must be precision-monotone (lower)");
        check.expect(implies(ft_up, fs_up, m), "psi must be precision-monotone (upper)");
        check.expect(implies(fs_lo, fs_up, m), "psi must preserve consistency");
      }
      if (!check.ok) return;
    }
  }

  {  // projection commutation
    std::mt19937_64 rng(1002);
    for (int t = 0; t < cases; ++t) {
      const GroundProgram g = random_ground_program(rng);
      FormulaStore store(g.alphabet());
      const auto s = random_consistent_state(store, rng);
      const auto stepped = partial_consequence_step(g, s, store);
      const std::size_t n = g.alphabet().params().size();
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const Interpretation i = params_from_mask(g.alphabet(), mask);
        check.expect(concretise(stepped, i, store) == fitting_step(g, i, concretise(s, i, store)),
                     "projection commutation failed");
      }
      if (!check.ok) return;
    }
  }

  {  // evaluation commutation
    std::mt19937_64 rng(1003);
    for (int t = 0; t < cases; ++t) {
      const GroundProgram g = random_ground_program(rng);
      FormulaStore store(g.alphabet());
      const auto s = random_consistent_state(store, rng);
      const Expr phi = random_expr(g.alphabet(), rng);
      const FormulaPair pair = eval_formula(phi, s, store);
      const Interpretation i = params_from_mask(g.alphabet(), rng());
      const PartialInterpretation si = concretise(s, i, store);
      const auto [lo, up] = eval_expr_pair(phi, g.alphabet(), i, si.lower, si.upper);
      check.expect(store.eval(pair.lower, i) == lo, "evaluation commutation failed (lower)");
      check.expect(store.eval(pair.upper, i) == up, "evaluation commutation failed (upper)");
      if (!check.ok) return;
    }
  }

  {  // positive-program shortcut
    std::mt19937_64 rng(1004);
    for (int t = 0; t < cases; ++t) {
      const GroundProgram g = random_ground_program(rng, /*positive_only=*/true);
      Trace trace = compile(g);
      check.expect(trace.is_exact(), "positive programs compile exactly");
      FormulaStore& store = *trace.store;
      SemanticEquivalence oracle(trace.ensure_manager(), store);
      SymbolicInterpretation a = SymbolicInterpretation::constant(store, false);
      for (std::size_t guard = 0; guard <= g.alphabet().defined().size(); ++guard)
        a = consequence_step(g, a, store);
      for (std::size_t i = 0; i < a.size(); ++i)
        check.expect(oracle.same(trace.final_state().lower.at(i), a.at(i)),
                     "positive compile must equal the iterated consequence fixpoint");
      if (!check.ok) return;
    }
  }

  {  // schedule independence
    std::mt19937_64 rng(1005);
    for (int t = 0; t < cases; ++t) {
      const GroundProgram g = random_ground_program(rng);
      Trace reference = compile(g);
      FormulaStore store(g.alphabet());
      BddManager m = BddManager::for_params(g.alphabet());
      SemanticEquivalence oracle(m, store);
      PartialSymbolicInterpretation s{SymbolicInterpretation::constant(store, false),
                                      SymbolicInterpretation::constant(store, true)};
      auto same_interp = [&](const SymbolicInterpretation& x, const SymbolicInterpretation& y) {
        for (std::size_t i = 0; i < x.size(); ++i)
          if (!oracle.same(x.at(i), y.at(i))) return false;
        return true;
      };
      for (int guard = 0; guard < 256; ++guard) {
        const auto app = partial_consequence_step(g, s, store);
        const auto unf = unfoundedness_refinement(g, s, store, oracle);
        const bool app_strict =
            !(same_interp(app.lower, s.lower) && same_interp(app.upper, s.upper));
        const bool unf_strict = !same_interp(unf.upper, s.upper);
        if (!app_strict && !unf_strict) break;
        if (app_strict && (!unf_strict || (rng() & 1)))
          s = app;
        else
          s = unf;
      }
      BddManager shared = BddManager::for_params(g.alphabet());
      for (std::size_t i = 0; i < s.lower.size(); ++i) {
        check.expect(shared.from_formula(store, s.lower.at(i)) ==
                         shared.from_formula(*reference.store,
                                             reference.final_state().lower.at(i)),
                     "random schedules must share the final lower bounds");
        check.expect(shared.from_formula(store, s.upper.at(i)) ==
                         shared.from_formula(*reference.store,
                                             reference.final_state().upper.at(i)),
                     "random schedules must share the final upper bounds");
      }
      if (!check.ok) return;
    }
  }

  {  // kripke-kleene below well-founded, and refinement count bounds
    std::mt19937_64 rng(1006);
    for (int t = 0; t < cases; ++t) {
      const GroundProgram g = random_ground_program(rng);
      const Interpretation params = params_from_mask(g.alphabet(), rng());
      WfStats stats;
      const PartialInterpretation wf = well_founded(g, params, &stats);
      check.expect(kripke_kleene(g, params).leq_precision(wf),
                   "kripke-kleene must be below the well-founded fixpoint");
      check.expect(stats.strict_refinements <= g.alphabet().defined().size(),
                   "strict refinement count must stay within |defined|");
      if (!check.ok) return;
    }
  }

  {  // symbolic refinement count bounds in the compile machine
    std::mt19937_64 rng(1007);
    for (int t = 0; t < cases; ++t) {
      const GroundProgram g = random_ground_program(rng);
      Trace trace = compile(g);
      const std::size_t bound = g.alphabet().defined().size();
      check.expect(trace.unfoundedness_count <= bound,
                   "unfoundedness refinements must stay within |defined|");
      std::size_t consecutive = 0, max_consecutive = 0;
      for (const auto& step : trace.steps) {
        if (step.kind == RefinementKind::application)
          max_consecutive = std::max(max_consecutive, ++consecutive);
        else
          consecutive = 0;
      }
      check.expect(max_consecutive <= bound,
                   "consecutive application refinements must stay within |defined|");
      if (!check.ok) return;
    }
  }
}

// ---- criterion 7 -----------------------------------------------------------

void exactness_bridge(Check& check) {
  for (const char* name : {"smokers.lp", "gearwheels.lp", "gearwheels2.lp", "tc1.lp", "tc2.lp",
                           "nt.lp", "pdef.lp", "empty.lp"}) {
    const GroundProgram g = load_program(name);
    Trace trace = compile(g);
    bool all_exact = true;
    const std::size_t n = g.alphabet().params().size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
      all_exact = all_exact && well_founded(g, params_from_mask(g.alphabet(), mask)).exact();
    std::ostringstream what;
    what << name << ": symbolic exactness " << trace.is_exact() << " vs concrete " << all_exact;
    check.expect(trace.is_exact() == all_exact, what.str());
  }
}

}  // namespace

int main() {
  run_criterion(1, "golden example compilations match their closed forms", 1.0, golden_values);
  run_criterion(2, "instantiation matches the concrete fixpoint on every interpretation", 30.0,
                oracle_equivalence);
  run_criterion(3, "equivalence checking of the transitive-closure definitions", 30.0,
                equivalence_checking);
  run_criterion(4, "polynomial circuit growth on chain instances", 60.0, polynomial_growth);
  run_criterion(5, "anytime weighted-count bounds are monotone and bracket the oracle", 600.0,
                anytime_bounds);
  run_criterion(6, "randomized property suites (1000 seeded cases each)", 600.0, property_suites);
  run_criterion(7, "symbolic exactness agrees with per-interpretation exactness", 600.0,
                exactness_bridge);
  return g_failures == 0 ? 0 : 1;
}
