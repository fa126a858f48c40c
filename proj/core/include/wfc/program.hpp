#pragma once

#include <string>
#include <vector>

#include "wfc/alphabet.hpp"
#include "wfc/expr.hpp"

#include <json.hpp>

namespace wfc {

// One argument of a rule atom: a constant or an (uppercase) variable.
struct Arg {
  std::string text;
  bool is_var = false;
  friend bool operator==(const Arg&, const Arg&) = default;
};

struct RuleAtom {
  std::string pred;
  std::vector<Arg> args;

  bool ground() const {
    for (const auto& a : args)
      if (a.is_var) return false;
    return true;
  }
  std::string to_string() const;
  friend bool operator==(const RuleAtom&, const RuleAtom&) = default;
};

struct RuleLiteral {
  RuleAtom atom;
  bool positive = true;
  friend bool operator==(const RuleLiteral&, const RuleLiteral&) = default;
};

struct Rule {
  RuleAtom head;
  std::vector<RuleLiteral> body;
  friend bool operator==(const Rule&, const Rule&) = default;
};

// Parsed program, possibly still containing variables. Variables are
// implicitly universally quantified over the domain.
struct Program {
  std::vector<Rule> rules;
  std::vector<std::string> domain;         // #domain constants, in order
  std::vector<std::string> defined_decls;  // #defined predicate names, in order
  std::vector<std::string> param_decls;    // #param predicate names, in order

  bool is_ground() const;
  // Predicate names occurring in some rule head.
  std::vector<std::string> head_preds() const;
  // Predicate-level partition after applying declarations: true = defined.
  bool pred_is_defined(const std::string& pred) const;
};

std::string pretty(const Program& program);

struct GroundLiteral {
  AtomId atom;
  bool positive = true;
  friend bool operator==(const GroundLiteral&, const GroundLiteral&) = default;
};

struct GroundRule {
  AtomId head;
  std::vector<GroundLiteral> body;
  friend bool operator==(const GroundRule&, const GroundRule&) = default;
};

// Fully instantiated program over a ground-atom alphabet, with the per-atom
// body disjunction table.
class GroundProgram {
public:
  GroundProgram(Alphabet alphabet, std::vector<GroundRule> rules,
                std::vector<std::string> domain);

  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<GroundRule>& rules() const { return rules_; }
  const std::vector<std::string>& domain() const { return domain_; }

  // Indexed like alphabet().defined(): the disjunction of rule bodies per
  // defined atom, in rule order; false for ruleless atoms.
  const std::vector<Expr>& body_formulas() const { return body_formulas_; }
  const Expr& body_formula(AtomId defined_atom) const {
    return body_formulas_.at(alphabet_.partition_index(defined_atom));
  }

  std::string pretty() const;
  nlohmann::json to_json() const;

private:
  Alphabet alphabet_;
  std::vector<GroundRule> rules_;
  std::vector<std::string> domain_;
  std::vector<Expr> body_formulas_;
};

// Instantiates every rule over the domain (the union of the program's
// #domain directive and the extra constants), deduplicates ground rules and
// builds the alphabet in first-mention order. Head atoms and #defined
// predicates are defined; everything else is a parameter.
GroundProgram ground(const Program& program, const std::vector<std::string>& extra_domain = {});

}  // namespace wfc
