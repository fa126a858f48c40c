#include <algorithm>

#include "wfc/formula.hpp"

namespace wfc {

// Tseitin encoding over the circuit DAG. Input atoms get the low variable
// indices in ascending atom-id order; each And/Or gate gets one auxiliary
// definition variable. Not nodes are folded into literal polarity. The root's
// definitional literal is asserted, so the CNF is equisatisfiable with x and
// its models project onto the input atoms exactly as the models of x.
CnfResult FormulaStore::to_cnf(FormulaRef x) const {
  CnfResult result;

  std::vector<std::uint32_t> reachable;
  {
    std::vector<char> seen(x.index() + 1, 0);
    std::vector<std::uint32_t> stack = {x.index()};
    seen[x.index()] = 1;
    while (!stack.empty()) {
      const std::uint32_t i = stack.back();
      stack.pop_back();
      reachable.push_back(i);
      for (auto c : nodes_[i].children)
        if (!seen[c.index()]) {
          seen[c.index()] = 1;
          stack.push_back(c.index());
        }
    }
    std::sort(reachable.begin(), reachable.end());
  }

  std::vector<AtomId> atoms;
  for (auto i : reachable)
    if (nodes_[i].kind == NodeKind::Var) atoms.push_back(nodes_[i].var);
  std::sort(atoms.begin(), atoms.end());

  int next_var = 0;
  std::unordered_map<AtomId, int> atom_var;
  for (AtomId a : atoms) {
    atom_var.emplace(a, ++next_var);
    result.atom_vars.emplace_back(a, next_var);
  }

  // DIMACS literal of each node; gates get theirs when visited below.
  std::unordered_map<std::uint32_t, int> lit;
  for (auto i : reachable) {
    const FormulaNode& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::False:
      case NodeKind::True:
        break;  // constants appear only as the root
      case NodeKind::Var:
        lit[i] = atom_var[n.var];
        break;
      case NodeKind::Not:
        lit[i] = -lit[n.children.front().index()];
        break;
      case NodeKind::And:
      case NodeKind::Or: {
        const int g = ++next_var;
        result.aux_vars.push_back(g);
        lit[i] = g;
        std::vector<int> kids;
        kids.reserve(n.children.size());
        for (auto c : n.children) kids.push_back(lit[c.index()]);
        if (n.kind == NodeKind::And) {
          // g <-> (c1 & ... & cn)
          std::vector<int> big{g};
          for (int c : kids) {
            result.clauses.push_back({-g, c});
            big.push_back(-c);
          }
          result.clauses.push_back(std::move(big));
        } else {
          // g <-> (c1 | ... | cn)
          std::vector<int> big{-g};
          for (int c : kids) {
            result.clauses.push_back({g, -c});
            big.push_back(c);
          }
          result.clauses.push_back(std::move(big));
        }
        break;
      }
    }
  }

  result.num_vars = next_var;
  if (node(x).kind == NodeKind::True) {
    // valid: no clauses
  } else if (node(x).kind == NodeKind::False) {
    result.clauses.push_back({});  // empty clause: unsatisfiable
  } else {
    result.clauses.push_back({lit[x.index()]});
  }
  return result;
}

}  // namespace wfc
