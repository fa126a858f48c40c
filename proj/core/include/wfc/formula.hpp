#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wfc/alphabet.hpp"
#include "wfc/bitset.hpp"

namespace wfc {

enum class NodeKind : std::uint8_t { True, False, Var, Not, And, Or };

// Handle into a FormulaStore. Equal handles denote structurally identical
// circuits, hence the same Boolean function.
class FormulaRef {
public:
  constexpr FormulaRef() = default;

  std::uint32_t index() const { return index_; }
  bool valid() const { return index_ != invalid_index; }

  friend auto operator<=>(FormulaRef, FormulaRef) = default;

private:
  friend class FormulaStore;
  static constexpr std::uint32_t invalid_index = std::numeric_limits<std::uint32_t>::max();
  explicit constexpr FormulaRef(std::uint32_t index) : index_(index) {}

  std::uint32_t index_ = invalid_index;
};

struct FormulaNode {
  NodeKind kind;
  AtomId var = 0;                    // Var only
  std::vector<FormulaRef> children;  // Not: 1 child; And/Or: >= 2, sorted, deduplicated
};

// Tseitin-style CNF of a circuit. Clauses use DIMACS literals; variables
// 1..atom_vars.size() denote input atoms, the rest are gate definitions.
struct CnfResult {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
  std::vector<std::pair<AtomId, int>> atom_vars;  // ascending atom id
  std::vector<int> aux_vars;                      // ascending
};

// Options for the DOT rendering of circuit DAGs. layer_bounds are store-size
// watermarks; a gate created while the store grew to layer_bounds[i] is drawn
// inside cluster i.
struct FormulaDotOptions {
  std::vector<std::pair<std::string, FormulaRef>> roots;
  std::vector<std::size_t> layer_bounds;
  std::vector<std::string> layer_labels;
  std::string graph_name = "circuit";
};

// Append-only store of structurally shared Boolean circuits over the
// parameter atoms of an alphabet. Construction applies cheap syntactic
// normalization only; semantic equivalence is the decision-diagram backend's
// job. Node creation is serialized per store; all const member functions are
// safe to call concurrently on a store that is no longer being extended.
class FormulaStore {
public:
  explicit FormulaStore(Alphabet alphabet);

  const Alphabet& alphabet() const { return alphabet_; }

  FormulaRef mk_const(bool value) const { return value ? true_ : false_; }
  FormulaRef mk_true() const { return true_; }
  FormulaRef mk_false() const { return false_; }

  // Variable node for a parameter atom. Defined atoms are rejected; theory
  // construction uses mk_atom_var below.
  FormulaRef mk_var(AtomId param);

  // Variable node for any declared atom. Needed when defined atoms become
  // circuit inputs, e.g. in p <-> definition theories.
  FormulaRef mk_atom_var(AtomId atom);

  FormulaRef mk_not(FormulaRef x);
  FormulaRef mk_and(std::span<const FormulaRef> xs);
  FormulaRef mk_or(std::span<const FormulaRef> xs);
  FormulaRef mk_and(std::initializer_list<FormulaRef> xs) {
    return mk_and(std::span<const FormulaRef>(xs.begin(), xs.size()));
  }
  FormulaRef mk_or(std::initializer_list<FormulaRef> xs) {
    return mk_or(std::span<const FormulaRef>(xs.begin(), xs.size()));
  }

  // Two-valued evaluation; the interpretation is indexed by atom id and must
  // cover every atom mentioned by x. Single memoized pass over the DAG.
  bool eval(FormulaRef x, const DynBitset& interpretation) const;

  // Evaluates many roots in one forward pass.
  std::vector<bool> eval_many(std::span<const FormulaRef> roots,
                              const DynBitset& interpretation) const;

  struct Stats {
    std::size_t nodes = 0;
    std::size_t depth = 0;
  };
  Stats stats(FormulaRef x) const;

  CnfResult to_cnf(FormulaRef x) const;

  void write_dot(std::ostream& os, const FormulaDotOptions& options) const;

  // Renders with the query surface syntax. Shared subcircuits are expanded,
  // so this is only suitable for small formulas.
  std::string to_string(FormulaRef x) const;

  const FormulaNode& node(FormulaRef x) const { return nodes_.at(x.index()); }
  const FormulaNode& node_at(std::uint32_t index) const { return nodes_.at(index); }
  std::size_t node_count() const { return nodes_.size(); }

  FormulaStore(const FormulaStore&) = delete;
  FormulaStore& operator=(const FormulaStore&) = delete;

private:
  struct GateKey {
    NodeKind kind;
    std::vector<FormulaRef> children;
    friend bool operator==(const GateKey&, const GateKey&) = default;
  };
  struct GateKeyHash {
    std::size_t operator()(const GateKey& k) const;
  };

  FormulaRef intern_gate(NodeKind kind, std::vector<FormulaRef> children);
  FormulaRef mk_gate(NodeKind kind, std::span<const FormulaRef> xs);

  Alphabet alphabet_;
  std::vector<FormulaNode> nodes_;
  FormulaRef false_;
  FormulaRef true_;
  std::unordered_map<AtomId, FormulaRef> var_cache_;
  std::unordered_map<std::uint32_t, FormulaRef> not_cache_;
  std::unordered_map<GateKey, FormulaRef, GateKeyHash> gate_cache_;
};

}  // namespace wfc
