#include "wfc/formula.hpp"

#include <algorithm>
#include <cassert>

namespace wfc {

namespace {

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
}

}  // namespace

std::size_t FormulaStore::GateKeyHash::operator()(const GateKey& k) const {
  std::size_t seed = static_cast<std::size_t>(k.kind);
  for (auto c : k.children) hash_combine(seed, c.index());
  return seed;
}

FormulaStore::FormulaStore(Alphabet alphabet) : alphabet_(std::move(alphabet)) {
  nodes_.push_back(FormulaNode{NodeKind::False, 0, {}});
  nodes_.push_back(FormulaNode{NodeKind::True, 0, {}});
  false_ = FormulaRef(0);
  true_ = FormulaRef(1);
}

FormulaRef FormulaStore::mk_var(AtomId param) {
  if (!alphabet_.valid(param)) throw Error("unknown atom id " + std::to_string(param));
  if (alphabet_.is_defined(param))
    throw Error("DefinedAtomAsVariable: " + alphabet_.name(param) +
                " is a defined atom and cannot be a circuit variable");
  return mk_atom_var(param);
}

FormulaRef FormulaStore::mk_atom_var(AtomId atom) {
  if (!alphabet_.valid(atom)) throw Error("unknown atom id " + std::to_string(atom));
  if (auto it = var_cache_.find(atom); it != var_cache_.end()) return it->second;
  const FormulaRef ref(static_cast<std::uint32_t>(nodes_.size()));
  nodes_.push_back(FormulaNode{NodeKind::Var, atom, {}});
  var_cache_.emplace(atom, ref);
  return ref;
}

FormulaRef FormulaStore::mk_not(FormulaRef x) {
  assert(x.valid() && x.index() < nodes_.size());
  if (x == true_) return false_;
  if (x == false_) return true_;
  const FormulaNode& n = nodes_[x.index()];
  if (n.kind == NodeKind::Not) return n.children.front();
  if (auto it = not_cache_.find(x.index()); it != not_cache_.end()) return it->second;
  const FormulaRef ref(static_cast<std::uint32_t>(nodes_.size()));
  nodes_.push_back(FormulaNode{NodeKind::Not, 0, {x}});
  not_cache_.emplace(x.index(), ref);
  return ref;
}

FormulaRef FormulaStore::intern_gate(NodeKind kind, std::vector<FormulaRef> children) {
  GateKey key{kind, std::move(children)};
  if (auto it = gate_cache_.find(key); it != gate_cache_.end()) return it->second;
  const FormulaRef ref(static_cast<std::uint32_t>(nodes_.size()));
  nodes_.push_back(FormulaNode{kind, 0, key.children});
  gate_cache_.emplace(std::move(key), ref);
  return ref;
}

// Shared And/Or construction: flatten same-kind children one level, apply the
// unit laws, sort by handle and deduplicate.
FormulaRef FormulaStore::mk_gate(NodeKind kind, std::span<const FormulaRef> xs) {
  const FormulaRef absorbing = kind == NodeKind::And ? false_ : true_;
  const FormulaRef neutral = kind == NodeKind::And ? true_ : false_;

  std::vector<FormulaRef> flat;
  flat.reserve(xs.size());
  for (FormulaRef x : xs) {
    assert(x.valid() && x.index() < nodes_.size());
    if (x == absorbing) return absorbing;
    if (x == neutral) continue;
    const FormulaNode& n = nodes_[x.index()];
    if (n.kind == kind)
      flat.insert(flat.end(), n.children.begin(), n.children.end());
    else
      flat.push_back(x);
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return neutral;
  if (flat.size() == 1) return flat.front();
  return intern_gate(kind, std::move(flat));
}

FormulaRef FormulaStore::mk_and(std::span<const FormulaRef> xs) {
  return mk_gate(NodeKind::And, xs);
}

FormulaRef FormulaStore::mk_or(std::span<const FormulaRef> xs) { return mk_gate(NodeKind::Or, xs); }

std::vector<bool> FormulaStore::eval_many(std::span<const FormulaRef> roots,
                                          const DynBitset& interpretation) const {
  std::uint32_t max_index = 0;
  for (FormulaRef r : roots) {
    assert(r.valid());
    max_index = std::max(max_index, r.index());
  }
  // Children always precede parents, so one forward pass settles every node.
  std::vector<char> value(static_cast<std::size_t>(max_index) + 1, 0);
  for (std::uint32_t i = 0; i <= max_index; ++i) {
    const FormulaNode& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::False:
        value[i] = 0;
        break;
      case NodeKind::True:
        value[i] = 1;
        break;
      case NodeKind::Var:
        value[i] = interpretation.test(n.var) ? 1 : 0;
        break;
      case NodeKind::Not:
        value[i] = value[n.children.front().index()] ? 0 : 1;
        break;
      case NodeKind::And: {
        char v = 1;
        for (auto c : n.children) v &= value[c.index()];
        value[i] = v;
        break;
      }
      case NodeKind::Or: {
        char v = 0;
        for (auto c : n.children) v |= value[c.index()];
        value[i] = v;
        break;
      }
    }
  }
  std::vector<bool> out;
  out.reserve(roots.size());
  for (FormulaRef r : roots) out.push_back(value[r.index()] != 0);
  return out;
}

bool FormulaStore::eval(FormulaRef x, const DynBitset& interpretation) const {
  const FormulaRef roots[1] = {x};
  return eval_many(roots, interpretation)[0];
}

FormulaStore::Stats FormulaStore::stats(FormulaRef x) const {
  assert(x.valid());
  std::vector<std::uint32_t> reachable;
  std::vector<char> seen(x.index() + 1, 0);
  std::vector<std::uint32_t> stack = {x.index()};
  seen[x.index()] = 1;
  while (!stack.empty()) {
    const std::uint32_t i = stack.back();
    stack.pop_back();
    reachable.push_back(i);
    for (auto c : nodes_[i].children) {
      if (!seen[c.index()]) {
        seen[c.index()] = 1;
        stack.push_back(c.index());
      }
    }
  }
  std::sort(reachable.begin(), reachable.end());
  std::unordered_map<std::uint32_t, std::size_t> depth;
  depth.reserve(reachable.size());
  std::size_t root_depth = 0;
  for (auto i : reachable) {
    std::size_t d = 0;
    for (auto c : nodes_[i].children) d = std::max(d, depth[c.index()] + 1);
    depth[i] = d;
    if (i == x.index()) root_depth = d;
  }
  return Stats{reachable.size(), root_depth};
}

std::string FormulaStore::to_string(FormulaRef x) const {
  const FormulaNode& n = node(x);
  switch (n.kind) {
    case NodeKind::False:
      return "false";
    case NodeKind::True:
      return "true";
    case NodeKind::Var:
      return alphabet_.name(n.var);
    case NodeKind::Not: {
      const FormulaNode& c = node(n.children.front());
      const bool atomic = c.kind == NodeKind::Var;
      return atomic ? "!" + to_string(n.children.front())
                    : "!(" + to_string(n.children.front()) + ")";
    }
    case NodeKind::And:
    case NodeKind::Or: {
      const char* op = n.kind == NodeKind::And ? " & " : " | ";
      std::string out;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += op;
        const FormulaNode& c = node(n.children[i]);
        const bool atomic =
            c.kind == NodeKind::Var || c.kind == NodeKind::Not || c.children.empty();
        if (atomic)
          out += to_string(n.children[i]);
        else
          out += "(" + to_string(n.children[i]) + ")";
      }
      return out;
    }
  }
  return {};
}

}  // namespace wfc
