#pragma once

// Shared test fixtures: bundled program loading, independent brute-force
// oracles, and seeded random generators. Everything here stays independent of
// the code paths under test: naive_eval walks the DAG recursively, dpll_sat
// is a tiny standalone SAT solver, and the generators only use public
// construction APIs.

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wfc/bdd.hpp"
#include "wfc/concrete.hpp"
#include "wfc/formula.hpp"
#include "wfc/parser.hpp"
#include "wfc/program.hpp"
#include "wfc/symbolic.hpp"

namespace testsupport {

inline std::string program_path(const std::string& name) {
  return std::string(WFC_PROGRAM_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline wfc::GroundProgram load_program(const std::string& name,
                                       const std::vector<std::string>& domain = {}) {
  return wfc::ground(wfc::parse_program_file(program_path(name)), domain);
}

// Recursive evaluator, deliberately different from FormulaStore::eval's
// forward pass.
inline bool naive_eval(const wfc::FormulaStore& store, wfc::FormulaRef x,
                       const wfc::DynBitset& interp) {
  const wfc::FormulaNode& n = store.node(x);
  switch (n.kind) {
    case wfc::NodeKind::True:
      return true;
    case wfc::NodeKind::False:
      return false;
    case wfc::NodeKind::Var:
      return interp.test(n.var);
    case wfc::NodeKind::Not:
      return !naive_eval(store, n.children.front(), interp);
    case wfc::NodeKind::And:
      for (auto c : n.children)
        if (!naive_eval(store, c, interp)) return false;
      return true;
    case wfc::NodeKind::Or:
      for (auto c : n.children)
        if (naive_eval(store, c, interp)) return true;
      return false;
  }
  return false;
}

// Minimal DPLL over DIMACS-style clauses; assumptions are literals forced up
// front. Used as an independent check of the Tseitin encoding.
inline bool dpll_sat(const std::vector<std::vector<int>>& clauses, int num_vars,
                     std::vector<int> assumptions = {}) {
  std::vector<int> assignment(num_vars + 1, 0);  // 0 unknown, +1 true, -1 false
  std::vector<std::vector<int>> work = clauses;
  for (int lit : assumptions) work.push_back({lit});

  auto solve = [&](auto&& self, std::vector<int> assign) -> bool {
    // unit propagation
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& clause : work) {
        int unassigned = 0, last = 0;
        bool satisfied = false;
        for (int lit : clause) {
          const int v = assign[std::abs(lit)];
          if (v == 0) {
            ++unassigned;
            last = lit;
          } else if ((v > 0) == (lit > 0)) {
            satisfied = true;
            break;
          }
        }
        if (satisfied) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          assign[std::abs(last)] = last > 0 ? 1 : -1;
          changed = true;
        }
      }
    }
    int pick = 0;
    for (int v = 1; v <= num_vars; ++v)
      if (assign[v] == 0) {
        pick = v;
        break;
      }
    if (pick == 0) return true;
    auto left = assign;
    left[pick] = 1;
    if (self(self, std::move(left))) return true;
    assign[pick] = -1;
    return self(self, std::move(assign));
  };
  return solve(solve, std::move(assignment));
}

// Random circuit over the parameter atoms of the store's alphabet.
inline wfc::FormulaRef random_formula(wfc::FormulaStore& store, std::mt19937_64& rng,
                                      int depth = 3) {
  const auto& params = store.alphabet().params();
  std::uniform_int_distribution<int> kind(0, depth <= 0 ? 1 : 4);
  switch (kind(rng)) {
    case 0: {
      if (params.empty()) return store.mk_const(rng() & 1);
      std::uniform_int_distribution<std::size_t> pick(0, params.size() - 1);
      return store.mk_var(params[pick(rng)]);
    }
    case 1:
      return store.mk_const(rng() & 1);
    case 2:
      return store.mk_not(random_formula(store, rng, depth - 1));
    default: {
      std::uniform_int_distribution<int> width(2, 3);
      std::vector<wfc::FormulaRef> kids;
      const int w = width(rng);
      for (int i = 0; i < w; ++i) kids.push_back(random_formula(store, rng, depth - 1));
      return (rng() & 1) ? store.mk_and(kids) : store.mk_or(kids);
    }
  }
}

// Random formula over the full alphabet (parameters and defined atoms).
inline wfc::Expr random_expr(const wfc::Alphabet& alphabet, std::mt19937_64& rng, int depth = 3) {
  std::uniform_int_distribution<int> kind(0, depth <= 0 ? 0 : 3);
  switch (kind(rng)) {
    case 0: {
      if (alphabet.size() == 0) return wfc::Expr::constant(rng() & 1);
      std::uniform_int_distribution<wfc::AtomId> pick(0,
                                                      static_cast<wfc::AtomId>(alphabet.size() - 1));
      return wfc::Expr::atom_ref(pick(rng));
    }
    case 1:
      return wfc::Expr::negate(random_expr(alphabet, rng, depth - 1));
    default: {
      std::vector<wfc::Expr> kids;
      std::uniform_int_distribution<int> width(2, 3);
      const int w = width(rng);
      for (int i = 0; i < w; ++i) kids.push_back(random_expr(alphabet, rng, depth - 1));
      return (rng() & 1) ? wfc::Expr::conj(std::move(kids)) : wfc::Expr::disj(std::move(kids));
    }
  }
}

// Random ground program text over small alphabets. Negation is included
// unless positive_only is set.
inline wfc::GroundProgram random_ground_program(std::mt19937_64& rng, bool positive_only = false,
                                                int num_params = 3, int num_defined = 4,
                                                int max_rules = 7, int max_body = 3) {
  std::ostringstream text;
  for (int d = 0; d < num_defined; ++d) text << "#defined d" << d << ".\n";
  for (int p = 0; p < num_params; ++p) text << "#param p" << p << ".\n";
  std::uniform_int_distribution<int> rules(1, max_rules);
  std::uniform_int_distribution<int> body_len(0, max_body);
  std::uniform_int_distribution<int> pick_d(0, num_defined - 1);
  std::uniform_int_distribution<int> pick_atom(0, num_params + num_defined - 1);
  const int r = rules(rng);
  for (int i = 0; i < r; ++i) {
    text << "d" << pick_d(rng);
    const int len = body_len(rng);
    for (int k = 0; k < len; ++k) {
      text << (k == 0 ? " :- " : ", ");
      if (!positive_only && (rng() & 1)) text << "not ";
      const int atom = pick_atom(rng);
      if (atom < num_params)
        text << "p" << atom;
      else
        text << "d" << (atom - num_params);
    }
    text << ".\n";
  }
  return wfc::ground(wfc::parse(text.str()));
}

// Transitive closure of a chain graph with n nodes: parameters are the n-1
// chain edges, defined atoms the reachability pairs.
inline std::string chain_tc_text(int n) {
  std::ostringstream text;
  for (int i = 1; i < n; ++i) text << "r(v" << i << ",v" << i + 1 << ") :- e(v" << i << ",v"
                                   << i + 1 << ").\n";
  for (int i = 1; i < n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (j > i + 1)
        text << "r(v" << i << ",v" << j << ") :- e(v" << i << ",v" << i + 1 << "), r(v" << i + 1
             << ",v" << j << ").\n";
  return text.str();
}

// Circuit of a query-syntax formula over parameter atoms only.
inline wfc::FormulaRef formula_of(const std::string& text, wfc::FormulaStore& store) {
  return wfc::expr_to_formula(wfc::parse_evidence(text, store.alphabet()), store);
}

inline bool equivalent_formulas(wfc::FormulaRef a, wfc::FormulaRef b, const wfc::FormulaStore& store,
                                wfc::BddManager& manager) {
  return manager.from_formula(store, a) == manager.from_formula(store, b);
}

// a entails b
inline bool implies(wfc::BddRef a, wfc::BddRef b, wfc::BddManager& manager) {
  return manager.apply(wfc::BddOp::And, a, manager.negate(b)) == manager.zero();
}

// Random consistent pair: lower = core & x, upper = core | y.
inline wfc::PartialSymbolicInterpretation random_consistent_state(wfc::FormulaStore& store,
                                                                  std::mt19937_64& rng) {
  const std::size_t n = store.alphabet().defined().size();
  std::vector<wfc::FormulaRef> lows, ups;
  for (std::size_t i = 0; i < n; ++i) {
    const wfc::FormulaRef core = random_formula(store, rng);
    lows.push_back(store.mk_and({core, random_formula(store, rng)}));
    ups.push_back(store.mk_or({core, random_formula(store, rng)}));
  }
  return {wfc::SymbolicInterpretation(std::move(lows)),
          wfc::SymbolicInterpretation(std::move(ups))};
}

}  // namespace testsupport
