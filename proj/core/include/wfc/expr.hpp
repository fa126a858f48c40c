#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wfc/alphabet.hpp"

namespace wfc {

// Plain formula syntax tree over the alphabet. Rule bodies, the per-atom body
// disjunctions and query evidence are all represented this way; no
// normalization happens here.
struct Expr {
  enum class Kind : std::uint8_t { True, False, Atom, Not, And, Or };

  Kind kind = Kind::False;
  AtomId atom = 0;
  std::vector<Expr> children;

  static Expr constant(bool value) {
    Expr e;
    e.kind = value ? Kind::True : Kind::False;
    return e;
  }

  static Expr atom_ref(AtomId id) {
    Expr e;
    e.kind = Kind::Atom;
    e.atom = id;
    return e;
  }

  static Expr negate(Expr inner) {
    Expr e;
    e.kind = Kind::Not;
    e.children.push_back(std::move(inner));
    return e;
  }

  // Empty conjunction is true; a singleton collapses to its element.
  static Expr conj(std::vector<Expr> parts) {
    if (parts.empty()) return constant(true);
    if (parts.size() == 1) return std::move(parts.front());
    Expr e;
    e.kind = Kind::And;
    e.children = std::move(parts);
    return e;
  }

  // Empty disjunction is false.
  static Expr disj(std::vector<Expr> parts) {
    if (parts.empty()) return constant(false);
    if (parts.size() == 1) return std::move(parts.front());
    Expr e;
    e.kind = Kind::Or;
    e.children = std::move(parts);
    return e;
  }
};

// Renders with the query surface syntax: & | ! and parentheses.
std::string to_string(const Expr& e, const Alphabet& alphabet);

}  // namespace wfc
