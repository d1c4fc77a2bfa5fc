#include "dgl/lie.hpp"

#include <set>
#include <stdexcept>

#include "dgl/printer.hpp"
#include "dgl/vars.hpp"

namespace dgl {

bool OdeSystem::binds(const std::string& var) const {
  for (const auto& [v, rhs] : equations)
    if (v == var) return true;
  return false;
}

OdeSystem ode_system_from(const Game& ode_node) {
  if (ode_node.kind != GameKind::Ode)
    throw std::invalid_argument("expected an ODE node");
  OdeSystem sys;
  for (const auto& eq : ode_node.equations)
    sys.equations.emplace_back(eq.var, to_polynomial(eq.rhs));
  sys.domain = ode_node.formula;
  return sys;
}

Polynomial lie_derivative(const Polynomial& p, const OdeSystem& ode) {
  Polynomial out;
  for (const auto& [var, rhs] : ode.equations)
    out = out + p.partial_derivative(var) * rhs;
  return out;
}

Polynomial lie_derivative_iterated(const Polynomial& p, const OdeSystem& ode, unsigned order) {
  Polynomial out = p;
  for (unsigned i = 0; i < order; ++i) out = lie_derivative(out, ode);
  return out;
}

FormulaPtr dri_vc(const std::vector<Polynomial>& targets, const OdeSystem& ode,
                  unsigned order, const FormulaPtr& context) {
  if (order < 1) throw std::invalid_argument("dRI derivative order must be >= 1");
  FormulaPtr rhs;
  for (unsigned i = 1; i <= order; ++i) {
    for (const auto& h : targets) {
      Polynomial li = lie_derivative_iterated(h, ode, i);
      FormulaPtr eq = f_cmp(CmpOp::Eq, to_term(li), t_const(0L));
      rhs = rhs ? f_and(rhs, eq) : eq;
    }
  }
  if (!rhs) rhs = f_true();
  return f_imply(f_and(context, ode.domain_or_true()), rhs);
}

namespace {

TermPtr derive_term(const TermPtr& t, const OdeSystem& ode) {
  return to_term(lie_derivative(to_polynomial(t), ode));
}

}  // namespace

FormulaPtr formula_derivative(const FormulaPtr& f, const OdeSystem& ode) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      // Vacuous: the zero-measure boundary case carries no derivative burden.
      return f_true();
    case FormulaKind::Cmp: {
      TermPtr dl = derive_term(f->term_left, ode);
      TermPtr dr = derive_term(f->term_right, ode);
      CmpOp op;
      switch (f->op) {
        case CmpOp::Lt:
        case CmpOp::Le: op = CmpOp::Le; break;
        case CmpOp::Gt:
        case CmpOp::Ge: op = CmpOp::Ge; break;
        case CmpOp::Eq: op = CmpOp::Eq; break;
        default: op = CmpOp::Eq; break;
      }
      return f_cmp(op, dl, dr);
    }
    case FormulaKind::And:
    case FormulaKind::Or:
      return f_and(formula_derivative(f->left, ode), formula_derivative(f->right, ode));
    default:
      throw std::invalid_argument(
          "formula_derivative needs a quantifier- and modality-free formula over "
          "comparisons, got: " + print_formula(f));
  }
}

DiVc di_vc(const FormulaPtr& invariant, const OdeSystem& ode, const FormulaPtr& gamma_const) {
  DiVc out;
  out.initial = f_imply(gamma_const, invariant);
  out.step = f_imply(f_and(ode.domain_or_true(), gamma_const),
                     formula_derivative(invariant, ode));
  return out;
}

}  // namespace dgl
