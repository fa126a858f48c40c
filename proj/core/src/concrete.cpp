#include "wfc/concrete.hpp"

namespace wfc {

PartialInterpretation least_precise(const Alphabet& alphabet) {
  PartialInterpretation s{Interpretation(alphabet.size()), Interpretation(alphabet.size())};
  for (AtomId a : alphabet.defined()) s.upper.set(a);
  return s;
}

Interpretation params_from_mask(const Alphabet& alphabet, std::uint64_t mask) {
  Interpretation i(alphabet.size());
  const auto& params = alphabet.params();
  for (std::size_t k = 0; k < params.size(); ++k)
    if ((mask >> k) & 1) i.set(params[k]);
  return i;
}

bool eval_expr(const Expr& e, const Interpretation& interpretation) {
  switch (e.kind) {
    case Expr::Kind::True:
      return true;
    case Expr::Kind::False:
      return false;
    case Expr::Kind::Atom:
      return interpretation.test(e.atom);
    case Expr::Kind::Not:
      return !eval_expr(e.children.front(), interpretation);
    case Expr::Kind::And:
      for (const auto& c : e.children)
        if (!eval_expr(c, interpretation)) return false;
      return true;
    case Expr::Kind::Or:
      for (const auto& c : e.children)
        if (eval_expr(c, interpretation)) return true;
      return false;
  }
  return false;
}

std::pair<bool, bool> eval_expr_pair(const Expr& e, const Alphabet& alphabet,
                                     const Interpretation& params, const Interpretation& lower,
                                     const Interpretation& upper) {
  switch (e.kind) {
    case Expr::Kind::True:
      return {true, true};
    case Expr::Kind::False:
      return {false, false};
    case Expr::Kind::Atom:
      if (alphabet.is_param(e.atom)) {
        const bool v = params.test(e.atom);
        return {v, v};
      }
      return {lower.test(e.atom), upper.test(e.atom)};
    case Expr::Kind::Not: {
      auto [lo, up] = eval_expr_pair(e.children.front(), alphabet, params, lower, upper);
      return {!up, !lo};
    }
    case Expr::Kind::And: {
      bool lo = true, up = true;
      for (const auto& c : e.children) {
        auto [clo, cup] = eval_expr_pair(c, alphabet, params, lower, upper);
        lo = lo && clo;
        up = up && cup;
      }
      return {lo, up};
    }
    case Expr::Kind::Or: {
      bool lo = false, up = false;
      for (const auto& c : e.children) {
        auto [clo, cup] = eval_expr_pair(c, alphabet, params, lower, upper);
        lo = lo || clo;
        up = up || cup;
      }
      return {lo, up};
    }
  }
  return {false, false};
}

Interpretation tp_step(const GroundProgram& program, const Interpretation& params,
                       const Interpretation& defs) {
  const Alphabet& alphabet = program.alphabet();
  Interpretation total = params;
  total |= defs;
  Interpretation out(alphabet.size());
  const auto& defined = alphabet.defined();
  for (std::size_t i = 0; i < defined.size(); ++i)
    if (eval_expr(program.body_formulas()[i], total)) out.set(defined[i]);
  return out;
}

PartialInterpretation fitting_step(const GroundProgram& program, const Interpretation& params,
                                   const PartialInterpretation& s) {
  const Alphabet& alphabet = program.alphabet();
  PartialInterpretation out{Interpretation(alphabet.size()), Interpretation(alphabet.size())};
  const auto& defined = alphabet.defined();
  for (std::size_t i = 0; i < defined.size(); ++i) {
    auto [lo, up] = eval_expr_pair(program.body_formulas()[i], alphabet, params, s.lower, s.upper);
    if (lo) out.lower.set(defined[i]);
    if (up) out.upper.set(defined[i]);
  }
  return out;
}

PartialInterpretation kripke_kleene(const GroundProgram& program, const Interpretation& params) {
  PartialInterpretation s = least_precise(program.alphabet());
  while (true) {
    PartialInterpretation next = fitting_step(program, params, s);
    if (next == s) return s;
    s = std::move(next);
  }
}

PartialInterpretation well_founded(const GroundProgram& program, const Interpretation& params,
                                   WfStats* stats) {
  WfStats local;
  PartialInterpretation s = least_precise(program.alphabet());
  while (true) {
    // application refinements until stationary
    while (true) {
      PartialInterpretation next = fitting_step(program, params, s);
      if (next == s) break;
      s = std::move(next);
      ++local.strict_refinements;
      ++local.application_refinements;
    }
    // maximal unfoundedness refinement: least fixpoint of the upper-bound
    // operator, ascending from the empty set
    Interpretation y(program.alphabet().size());
    while (true) {
      Interpretation next =
          fitting_step(program, params, PartialInterpretation{s.lower, y}).upper;
      if (next == y) break;
      y = std::move(next);
    }
    if (y == s.upper) break;  // neither refinement strict: terminal
    s.upper = std::move(y);
    ++local.strict_refinements;
    ++local.unfoundedness_refinements;
  }
  if (stats) *stats = local;
  return s;
}

std::vector<Interpretation> models_wf(const GroundProgram& program) {
  const Alphabet& alphabet = program.alphabet();
  const std::size_t n = alphabet.params().size();
  if (n > 24) throw Error("models_wf: parameter space too large to enumerate");
  std::vector<Interpretation> models;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Interpretation params = params_from_mask(alphabet, mask);
    PartialInterpretation wf = well_founded(program, params);
    if (wf.exact()) models.push_back(params | wf.lower);
  }
  return models;
}

}  // namespace wfc
