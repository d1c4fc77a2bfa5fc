#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "dgl/ast.hpp"

namespace dgl {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact evaluation over the rationals. Throws EvalError on division by zero
// and std::invalid_argument on quantifiers, modalities or missing variables.
Rational eval_term_exact(const TermPtr& t, const std::map<std::string, Rational>& env);
bool eval_formula_exact(const FormulaPtr& f, const std::map<std::string, Rational>& env);

// SMT-LIB v2 script encoding validity of `f` as unsatisfiability of its
// negation over nonlinear real arithmetic. Free variables become Real
// constants; every division p/q over free variables contributes q != 0 to the
// antecedent. Quantified formulas select logic NRA, quantifier-free QF_NRA.
// Modal formulas are rejected with std::invalid_argument.
std::string formula_to_smt(const FormulaPtr& f);

// Parses `(define-fun x () Real v)` bindings out of a solver's get-model
// output. Values that are not exact rationals (e.g. algebraic root-obj
// answers) make the whole model unusable and yield nullopt.
std::optional<std::map<std::string, Rational>> parse_smt_model(const std::string& text);

bool is_modality_free(const FormulaPtr& f);
bool is_quantifier_free(const FormulaPtr& f);

}  // namespace dgl
