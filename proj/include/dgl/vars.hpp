#pragma once

#include <set>
#include <string>
#include <vector>

#include "dgl/ast.hpp"

namespace dgl {

std::set<std::string> free_vars(const TermPtr& t);
std::set<std::string> free_vars(const FormulaPtr& f);
std::set<std::string> free_vars(const GamePtr& g);

// Variables written by the game: assignment targets, nondeterministic
// assignment targets and ODE primed variables.
std::set<std::string> bound_vars(const GamePtr& g);

TermPtr substitute_term(const TermPtr& t, const std::string& var, const TermPtr& replacement);

// Capture-avoiding substitution; bound quantifier variables are renamed as
// needed. Substituting across a modality whose game binds `var` or a variable
// free in `replacement` is inadmissible and throws std::invalid_argument.
FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const TermPtr& replacement);

// Constant folding plus flattening/deduplication of nested & and |.
// No other rewriting, so formulas stay recognizable in prompts and logs.
FormulaPtr simplify(const FormulaPtr& f);

// Conjunction list view helpers.
std::vector<FormulaPtr> conjuncts(const FormulaPtr& f);
FormulaPtr conjoin(const std::vector<FormulaPtr>& fs);

std::string fresh_name(const std::string& base, const std::set<std::string>& taken);

}  // namespace dgl
