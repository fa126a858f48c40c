#include "wfc/program.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace wfc {

std::string RuleAtom::to_string() const {
  if (args.empty()) return pred;
  std::string out = pred + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i].text;
  }
  out += ")";
  return out;
}

bool Program::is_ground() const {
  for (const auto& r : rules) {
    if (!r.head.ground()) return false;
    for (const auto& l : r.body)
      if (!l.atom.ground()) return false;
  }
  return true;
}

std::vector<std::string> Program::head_preds() const {
  std::vector<std::string> preds;
  std::set<std::string> seen;
  for (const auto& r : rules)
    if (seen.insert(r.head.pred).second) preds.push_back(r.head.pred);
  return preds;
}

bool Program::pred_is_defined(const std::string& pred) const {
  if (std::find(param_decls.begin(), param_decls.end(), pred) != param_decls.end()) return false;
  if (std::find(defined_decls.begin(), defined_decls.end(), pred) != defined_decls.end())
    return true;
  for (const auto& r : rules)
    if (r.head.pred == pred) return true;
  return false;
}

namespace {

std::string rule_to_string(const Rule& r) {
  std::string out = r.head.to_string();
  if (!r.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i) out += ", ";
      if (!r.body[i].positive) out += "not ";
      out += r.body[i].atom.to_string();
    }
  }
  out += ".";
  return out;
}

}  // namespace

std::string pretty(const Program& program) {
  std::ostringstream os;
  if (!program.domain.empty()) {
    os << "#domain";
    for (const auto& c : program.domain) os << " " << c;
    os << ".\n";
  }
  for (const auto& d : program.defined_decls) os << "#defined " << d << ".\n";
  for (const auto& p : program.param_decls) os << "#param " << p << ".\n";
  for (const auto& r : program.rules) os << rule_to_string(r) << "\n";
  return os.str();
}

GroundProgram::GroundProgram(Alphabet alphabet, std::vector<GroundRule> rules,
                             std::vector<std::string> domain)
    : alphabet_(std::move(alphabet)), rules_(std::move(rules)), domain_(std::move(domain)) {
  // Body disjunction per defined atom, rule order preserved.
  std::vector<std::vector<Expr>> bodies(alphabet_.defined().size());
  for (const auto& r : rules_) {
    std::vector<Expr> lits;
    lits.reserve(r.body.size());
    for (const auto& l : r.body) {
      Expr a = Expr::atom_ref(l.atom);
      lits.push_back(l.positive ? std::move(a) : Expr::negate(std::move(a)));
    }
    bodies[alphabet_.partition_index(r.head)].push_back(Expr::conj(std::move(lits)));
  }
  body_formulas_.reserve(bodies.size());
  for (auto& b : bodies) body_formulas_.push_back(Expr::disj(std::move(b)));
}

std::string GroundProgram::pretty() const {
  Program p;
  p.domain = domain_;
  // Declarations keep the partition stable on re-parse: defined atoms that
  // appear in no head, and parameters that appear in no rule at all.
  std::set<AtomId> in_heads, mentioned;
  for (const auto& r : rules_) {
    in_heads.insert(r.head);
    mentioned.insert(r.head);
    for (const auto& l : r.body) mentioned.insert(l.atom);
  }
  for (AtomId a : alphabet_.defined())
    if (!in_heads.contains(a)) p.defined_decls.push_back(alphabet_.name(a));
  for (AtomId a : alphabet_.params())
    if (!mentioned.contains(a)) p.param_decls.push_back(alphabet_.name(a));
  for (const auto& r : rules_) {
    Rule rule;
    rule.head = RuleAtom{alphabet_.name(r.head), {}};
    for (const auto& l : r.body)
      rule.body.push_back(RuleLiteral{RuleAtom{alphabet_.name(l.atom), {}}, l.positive});
    p.rules.push_back(std::move(rule));
  }
  return wfc::pretty(p);
}

nlohmann::json GroundProgram::to_json() const {
  nlohmann::ordered_json j;
  j["domain"] = domain_;
  j["atoms"] = nlohmann::ordered_json::array();
  for (AtomId a = 0; a < alphabet_.size(); ++a)
    j["atoms"].push_back({{"name", alphabet_.name(a)},
                          {"kind", alphabet_.is_defined(a) ? "defined" : "parameter"}});
  j["rules"] = nlohmann::ordered_json::array();
  for (const auto& r : rules_) {
    nlohmann::ordered_json body = nlohmann::ordered_json::array();
    for (const auto& l : r.body)
      body.push_back({{"atom", alphabet_.name(l.atom)}, {"positive", l.positive}});
    j["rules"].push_back({{"head", alphabet_.name(r.head)}, {"body", std::move(body)}});
  }
  return j;
}

namespace {

// Substitutes an assignment of domain constants for the rule's variables.
RuleAtom substitute(const RuleAtom& atom, const std::map<std::string, std::string>& binding) {
  RuleAtom out;
  out.pred = atom.pred;
  out.args.reserve(atom.args.size());
  for (const auto& a : atom.args) {
    if (a.is_var)
      out.args.push_back(Arg{binding.at(a.text), false});
    else
      out.args.push_back(a);
  }
  return out;
}

std::vector<std::string> rule_variables(const Rule& rule) {
  std::vector<std::string> vars;
  std::set<std::string> seen;
  auto collect = [&](const RuleAtom& atom) {
    for (const auto& a : atom.args)
      if (a.is_var && seen.insert(a.text).second) vars.push_back(a.text);
  };
  collect(rule.head);
  for (const auto& l : rule.body) collect(l.atom);
  return vars;
}

}  // namespace

GroundProgram ground(const Program& program, const std::vector<std::string>& extra_domain) {
  std::vector<std::string> domain = program.domain;
  for (const auto& c : extra_domain)
    if (std::find(domain.begin(), domain.end(), c) == domain.end()) domain.push_back(c);

  // Pass 1: instantiate rules, dedup, remember ground-atom strings.
  std::vector<Rule> ground_rules;
  std::set<std::string> rule_set;
  auto emit = [&](Rule r) {
    std::string key = rule_to_string(r);
    if (rule_set.insert(std::move(key)).second) ground_rules.push_back(std::move(r));
  };
  for (const auto& rule : program.rules) {
    const auto vars = rule_variables(rule);
    if (vars.empty()) {
      emit(rule);
      continue;
    }
    if (domain.empty())
      throw Error("unbound variable " + vars.front() + ": no domain to instantiate over");
    std::map<std::string, std::string> binding;
    std::vector<std::size_t> idx(vars.size(), 0);
    while (true) {
      for (std::size_t i = 0; i < vars.size(); ++i) binding[vars[i]] = domain[idx[i]];
      Rule g;
      g.head = substitute(rule.head, binding);
      for (const auto& l : rule.body)
        g.body.push_back(RuleLiteral{substitute(l.atom, binding), l.positive});
      emit(std::move(g));
      // advance the assignment, rightmost variable fastest
      std::size_t k = vars.size();
      while (k > 0) {
        if (++idx[k - 1] < domain.size()) break;
        idx[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
  }

  // Pass 2: partition. A predicate is defined iff it occurs in a head or is
  // declared #defined; #param on a head predicate is an error.
  std::set<std::string> head_preds, head_atoms;
  for (const auto& r : ground_rules) {
    head_preds.insert(r.head.pred);
    head_atoms.insert(r.head.to_string());
  }
  std::set<std::string> forced_defined(program.defined_decls.begin(),
                                       program.defined_decls.end());
  std::set<std::string> forced_param(program.param_decls.begin(), program.param_decls.end());
  for (const auto& p : forced_param)
    if (head_preds.contains(p) || head_atoms.contains(p))
      throw Error("DefinedAtomDeclaredParam: " + p +
                  " occurs in a rule head but is declared #param");
  // declarations name either a predicate or one ground atom
  auto is_defined_atom = [&](const RuleAtom& atom) {
    return head_preds.contains(atom.pred) || forced_defined.contains(atom.pred) ||
           forced_defined.contains(atom.to_string());
  };

  // Pass 3: intern atoms in first-mention order, then declared-only atoms.
  Alphabet alphabet;
  auto intern = [&](const RuleAtom& atom) {
    return alphabet.add(atom.to_string(), is_defined_atom(atom));
  };
  std::vector<GroundRule> rules;
  rules.reserve(ground_rules.size());
  for (const auto& r : ground_rules) {
    GroundRule g;
    g.head = intern(r.head);
    for (const auto& l : r.body) g.body.push_back(GroundLiteral{intern(l.atom), l.positive});
    rules.push_back(std::move(g));
  }
  for (const auto& d : program.defined_decls)
    if (!alphabet.find(d)) alphabet.add(d, true);
  for (const auto& p : program.param_decls)
    if (!alphabet.find(p)) alphabet.add(p, false);

  return GroundProgram(std::move(alphabet), std::move(rules), std::move(domain));
}

std::string to_string(const Expr& e, const Alphabet& alphabet) {
  switch (e.kind) {
    case Expr::Kind::True:
      return "true";
    case Expr::Kind::False:
      return "false";
    case Expr::Kind::Atom:
      return alphabet.name(e.atom);
    case Expr::Kind::Not: {
      const Expr& c = e.children.front();
      const bool atomic = c.kind == Expr::Kind::Atom || c.kind == Expr::Kind::True ||
                          c.kind == Expr::Kind::False;
      return atomic ? "!" + to_string(c, alphabet) : "!(" + to_string(c, alphabet) + ")";
    }
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      const char* op = e.kind == Expr::Kind::And ? " & " : " | ";
      std::string out;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += op;
        const Expr& c = e.children[i];
        const bool atomic = c.kind != Expr::Kind::And && c.kind != Expr::Kind::Or;
        if (atomic)
          out += to_string(c, alphabet);
        else
          out += "(" + to_string(c, alphabet) + ")";
      }
      return out;
    }
  }
  return {};
}

}  // namespace wfc
