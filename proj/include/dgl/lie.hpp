#pragma once

#include <vector>

#include "dgl/ast.hpp"
#include "dgl/polynomial.hpp"

namespace dgl {

struct OdeSystem {
  std::vector<std::pair<std::string, Polynomial>> equations;
  FormulaPtr domain;  // null means true

  FormulaPtr domain_or_true() const { return domain ? domain : f_true(); }
  bool binds(const std::string& var) const;
};

// Right-hand sides must be polynomial; division by a variable is rejected.
OdeSystem ode_system_from(const Game& ode_node);

// L(p) = sum_i dp/dx_i * f_i(x). Variables not bound by the system count as
// symbolic constants.
Polynomial lie_derivative(const Polynomial& p, const OdeSystem& ode);

Polynomial lie_derivative_iterated(const Polynomial& p, const OdeSystem& ode, unsigned order);

// (gamma /\ Q) -> /\_{i=1..order} /\_j L^i(h_j) = 0, exact arithmetic.
// `targets` are the h_j, each read as the equation h_j = 0.
FormulaPtr dri_vc(const std::vector<Polynomial>& targets, const OdeSystem& ode,
                  unsigned order, const FormulaPtr& context);

// Differential obligation of a quantifier- and modality-free formula:
// p<=q and p<q map to p'<=q', p>=q and p>q to p'>=q', p=q to p'=q';
// conjunction and disjunction both map to the conjunction of the parts.
FormulaPtr formula_derivative(const FormulaPtr& f, const OdeSystem& ode);

struct DiVc {
  FormulaPtr initial;  // gamma_const -> F
  FormulaPtr step;     // (Q /\ gamma_const) -> F'
};

DiVc di_vc(const FormulaPtr& invariant, const OdeSystem& ode, const FormulaPtr& gamma_const);

}  // namespace dgl
