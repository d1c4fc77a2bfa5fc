#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dgl/ast.hpp"

namespace dgl {

struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int column, std::vector<std::string> expected);
  int line;
  int column;
  std::vector<std::string> expected;
};

// ASCII concrete syntax: `;` separates statements, `{}` groups, `&` introduces
// the ODE evolution domain, `^@` is the dual operator, `++` choice, postfix
// `*` repetition, `x := *` nondeterministic assignment.
GamePtr parse_game(const std::string& text);

// Precedence ! > & > | > -> > <->, with right-associative ->; comparisons are
// non-associative; modalities `<a>p`, `[a]p` and quantifiers bind prefix-tight.
FormulaPtr parse_formula(const std::string& text);

TermPtr parse_term(const std::string& text);

}  // namespace dgl
