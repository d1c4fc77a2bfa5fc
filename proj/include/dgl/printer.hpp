#pragma once

#include <functional>
#include <string>

#include "dgl/ast.hpp"

namespace dgl {

// ASCII output; parse(print(x)) is structurally equal to x.
std::string print_term(const TermPtr& t);
std::string print_formula(const FormulaPtr& f);
std::string print_game(const GamePtr& g);

// Internal hook used by the labeled printer: called with the node about to be
// printed (after stripping dual wrappers the callback sees the wrapped chain's
// core) and the rendered text of the node including its postfix chain; returns
// the final text.
using GameDecorator =
    std::function<std::string(const Game* core, const std::string& rendered)>;
std::string print_game(const GamePtr& g, const GameDecorator& decorate);

}  // namespace dgl
