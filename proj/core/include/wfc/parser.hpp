#pragma once

#include <string>
#include <string_view>

#include "wfc/expr.hpp"
#include "wfc/program.hpp"

namespace wfc {

// Program surface syntax:
//   head :- lit, ..., lit.      rules; `head.` for facts
//   not atom                    negated body literal
//   #domain a b c.              grounding constants
//   #defined p.  /  #param p.   partition overrides for predicate p
//   % line comment
// Variables start with an uppercase letter and range over the domain.
// Atoms never occurring in a rule head default to parameters.
Program parse(std::string_view text);
Program parse_program_file(const std::string& path);

// Query evidence syntax: atoms of the ground alphabet combined with
// `&`, `|`, `!`, parentheses, and the constants `true`/`false`.
Expr parse_evidence(std::string_view text, const Alphabet& alphabet);

}  // namespace wfc
