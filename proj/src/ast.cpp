#include "dgl/ast.hpp"

#include <set>
#include <stdexcept>

namespace dgl {

namespace {
TermPtr make_term(Term t) { return std::make_shared<const Term>(std::move(t)); }
FormulaPtr make_formula(Formula f) { return std::make_shared<const Formula>(std::move(f)); }
GamePtr make_game(Game g) { return std::make_shared<const Game>(std::move(g)); }
}  // namespace

TermPtr t_var(std::string name) {
  Term t; t.kind = TermKind::Variable; t.name = std::move(name);
  return make_term(std::move(t));
}
TermPtr t_const(Rational value) {
  Term t; t.kind = TermKind::Constant; t.value = std::move(value);
  return make_term(std::move(t));
}
TermPtr t_const(long value) { return t_const(Rational(value)); }
TermPtr t_add(TermPtr l, TermPtr r) {
  Term t; t.kind = TermKind::Add; t.left = std::move(l); t.right = std::move(r);
  return make_term(std::move(t));
}
TermPtr t_sub(TermPtr l, TermPtr r) {
  Term t; t.kind = TermKind::Sub; t.left = std::move(l); t.right = std::move(r);
  return make_term(std::move(t));
}
TermPtr t_mul(TermPtr l, TermPtr r) {
  Term t; t.kind = TermKind::Mul; t.left = std::move(l); t.right = std::move(r);
  return make_term(std::move(t));
}
TermPtr t_div(TermPtr l, TermPtr r) {
  Term t; t.kind = TermKind::Div; t.left = std::move(l); t.right = std::move(r);
  return make_term(std::move(t));
}
TermPtr t_neg(TermPtr x) {
  Term t; t.kind = TermKind::Neg; t.left = std::move(x);
  return make_term(std::move(t));
}
TermPtr t_power(TermPtr base, unsigned exponent) {
  Term t; t.kind = TermKind::Power; t.left = std::move(base); t.exponent = exponent;
  return make_term(std::move(t));
}

FormulaPtr f_true() { Formula f; f.kind = FormulaKind::True; return make_formula(std::move(f)); }
FormulaPtr f_false() { Formula f; f.kind = FormulaKind::False; return make_formula(std::move(f)); }
FormulaPtr f_cmp(CmpOp op, TermPtr l, TermPtr r) {
  Formula f; f.kind = FormulaKind::Cmp; f.op = op;
  f.term_left = std::move(l); f.term_right = std::move(r);
  return make_formula(std::move(f));
}
FormulaPtr f_not(FormulaPtr x) {
  Formula f; f.kind = FormulaKind::Not; f.left = std::move(x);
  return make_formula(std::move(f));
}
namespace {
FormulaPtr f_binary(FormulaKind k, FormulaPtr l, FormulaPtr r) {
  Formula f; f.kind = k; f.left = std::move(l); f.right = std::move(r);
  return make_formula(std::move(f));
}
}  // namespace
FormulaPtr f_and(FormulaPtr l, FormulaPtr r) { return f_binary(FormulaKind::And, std::move(l), std::move(r)); }
FormulaPtr f_or(FormulaPtr l, FormulaPtr r) { return f_binary(FormulaKind::Or, std::move(l), std::move(r)); }
FormulaPtr f_imply(FormulaPtr l, FormulaPtr r) { return f_binary(FormulaKind::Imply, std::move(l), std::move(r)); }
FormulaPtr f_equiv(FormulaPtr l, FormulaPtr r) { return f_binary(FormulaKind::Equiv, std::move(l), std::move(r)); }
FormulaPtr f_forall(std::string var, FormulaPtr body) {
  Formula f; f.kind = FormulaKind::Forall; f.var = std::move(var); f.left = std::move(body);
  return make_formula(std::move(f));
}
FormulaPtr f_exists(std::string var, FormulaPtr body) {
  Formula f; f.kind = FormulaKind::Exists; f.var = std::move(var); f.left = std::move(body);
  return make_formula(std::move(f));
}
FormulaPtr f_diamond(GamePtr game, FormulaPtr post) {
  Formula f; f.kind = FormulaKind::Diamond; f.game = std::move(game); f.left = std::move(post);
  return make_formula(std::move(f));
}
FormulaPtr f_box(GamePtr game, FormulaPtr post) {
  Formula f; f.kind = FormulaKind::Box; f.game = std::move(game); f.left = std::move(post);
  return make_formula(std::move(f));
}

GamePtr g_assign(std::string var, TermPtr rhs) {
  Game g; g.kind = GameKind::Assign; g.var = std::move(var); g.term = std::move(rhs);
  return make_game(std::move(g));
}
GamePtr g_assign_any(std::string var) {
  Game g; g.kind = GameKind::AssignAny; g.var = std::move(var);
  return make_game(std::move(g));
}
GamePtr g_test(FormulaPtr cond) {
  Game g; g.kind = GameKind::Test; g.formula = std::move(cond);
  return make_game(std::move(g));
}
GamePtr g_seq(GamePtr a, GamePtr b) {
  Game g; g.kind = GameKind::Seq; g.left = std::move(a); g.right = std::move(b);
  return make_game(std::move(g));
}
GamePtr g_choice(GamePtr a, GamePtr b) {
  Game g; g.kind = GameKind::Choice; g.left = std::move(a); g.right = std::move(b);
  return make_game(std::move(g));
}
GamePtr g_repeat(GamePtr body) {
  Game g; g.kind = GameKind::Repeat; g.left = std::move(body);
  return make_game(std::move(g));
}
GamePtr g_dual(GamePtr body) {
  Game g; g.kind = GameKind::Dual; g.left = std::move(body);
  return make_game(std::move(g));
}
GamePtr g_ode(std::vector<OdeEquation> equations, FormulaPtr domain) {
  if (equations.empty()) throw std::invalid_argument("ODE needs at least one equation");
  std::set<std::string> seen;
  for (const auto& eq : equations)
    if (!seen.insert(eq.var).second)
      throw std::invalid_argument("duplicate ODE variable: " + eq.var);
  Game g; g.kind = GameKind::Ode; g.equations = std::move(equations);
  g.formula = std::move(domain);
  return make_game(std::move(g));
}

bool equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Variable: return a->name == b->name;
    case TermKind::Constant: return a->value == b->value;
    case TermKind::Neg: return equal(a->left, b->left);
    case TermKind::Power: return a->exponent == b->exponent && equal(a->left, b->left);
    default: return equal(a->left, b->left) && equal(a->right, b->right);
  }
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FormulaKind::True:
    case FormulaKind::False: return true;
    case FormulaKind::Cmp:
      return a->op == b->op && equal(a->term_left, b->term_left) &&
             equal(a->term_right, b->term_right);
    case FormulaKind::Not: return equal(a->left, b->left);
    case FormulaKind::Forall:
    case FormulaKind::Exists: return a->var == b->var && equal(a->left, b->left);
    case FormulaKind::Diamond:
    case FormulaKind::Box: return equal(a->game, b->game) && equal(a->left, b->left);
    default: return equal(a->left, b->left) && equal(a->right, b->right);
  }
}

bool equal(const GamePtr& a, const GamePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case GameKind::Assign: return a->var == b->var && equal(a->term, b->term);
    case GameKind::AssignAny: return a->var == b->var;
    case GameKind::Test: return equal(a->formula, b->formula);
    case GameKind::Repeat:
    case GameKind::Dual: return equal(a->left, b->left);
    case GameKind::Ode: {
      if (a->equations.size() != b->equations.size()) return false;
      for (size_t i = 0; i < a->equations.size(); ++i) {
        if (a->equations[i].var != b->equations[i].var) return false;
        if (!equal(a->equations[i].rhs, b->equations[i].rhs)) return false;
      }
      bool da = a->formula != nullptr, db = b->formula != nullptr;
      if (da != db) return false;
      return !da || equal(a->formula, b->formula);
    }
    default: return equal(a->left, b->left) && equal(a->right, b->right);
  }
}

const char* cmp_op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "=";
}

CmpOp cmp_flip(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Eq: return CmpOp::Eq;
    case CmpOp::Ge: return CmpOp::Le;
    case CmpOp::Gt: return CmpOp::Lt;
  }
  return op;
}

}  // namespace dgl
