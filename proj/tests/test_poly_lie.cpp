#include "doctest.h"

#include "dgl/lie.hpp"
#include "dgl/parser.hpp"
#include "dgl/polynomial.hpp"
#include "dgl/printer.hpp"
#include "dgl/vars.hpp"
#include "gen.hpp"

using namespace dgl;

namespace {

// Independent differentiation oracle: plain term-rewriting d/dx on the AST,
// kept free of the Polynomial code path it cross-checks.
TermPtr diff_term(const TermPtr& t, const std::string& x) {
  switch (t->kind) {
    case TermKind::Variable:
      return t_const(t->name == x ? 1L : 0L);
    case TermKind::Constant:
      return t_const(0L);
    case TermKind::Add:
      return t_add(diff_term(t->left, x), diff_term(t->right, x));
    case TermKind::Sub:
      return t_sub(diff_term(t->left, x), diff_term(t->right, x));
    case TermKind::Mul:
      return t_add(t_mul(diff_term(t->left, x), t->right),
                   t_mul(t->left, diff_term(t->right, x)));
    case TermKind::Neg:
      return t_neg(diff_term(t->left, x));
    case TermKind::Power: {
      if (t->exponent == 0) return t_const(0L);
      TermPtr lower = t->exponent == 1 ? t_const(1L) : t_power(t->left, t->exponent - 1);
      return t_mul(t_mul(t_const((long)t->exponent), lower), diff_term(t->left, x));
    }
    case TermKind::Div:
      throw std::runtime_error("oracle only differentiates division-free terms");
  }
  return t_const(0L);
}

TermPtr oracle_lie(const TermPtr& t, const std::vector<std::pair<std::string, TermPtr>>& flow) {
  TermPtr acc = t_const(0L);
  for (const auto& [var, rhs] : flow)
    acc = t_add(acc, t_mul(diff_term(t, var), rhs));
  return acc;
}

Rational eval_term(const TermPtr& t, const std::map<std::string, Rational>& env) {
  switch (t->kind) {
    case TermKind::Variable: return env.at(t->name);
    case TermKind::Constant: return t->value;
    case TermKind::Add: return eval_term(t->left, env) + eval_term(t->right, env);
    case TermKind::Sub: return eval_term(t->left, env) - eval_term(t->right, env);
    case TermKind::Mul: return eval_term(t->left, env) * eval_term(t->right, env);
    case TermKind::Neg: return -eval_term(t->left, env);
    case TermKind::Power: {
      Rational b = eval_term(t->left, env), v = 1;
      for (unsigned i = 0; i < t->exponent; ++i) v *= b;
      return v;
    }
    case TermKind::Div: {
      Rational d = eval_term(t->right, env);
      if (d == 0) throw std::runtime_error("division by zero");
      return eval_term(t->left, env) / d;
    }
  }
  return 0;
}

OdeSystem lotka_ode() {
  return ode_system_from(*parse_game("{x' = a*x - b*x*y, y' = d*x*y - g*y}"));
}

bool has_div(const TermPtr& t) {
  if (!t) return false;
  if (t->kind == TermKind::Div) return true;
  return has_div(t->left) || has_div(t->right);
}

std::map<std::string, Rational> random_env(testgen::Rng& rng, const std::set<std::string>& vars) {
  std::map<std::string, Rational> env;
  for (const auto& v : vars)
    env[v] = Rational(testgen::pick(rng, -7, 7), 1 + testgen::pick(rng, 0, 3));
  for (const char* v : {"x", "y", "z", "w", "v", "a", "b", "d", "g"})
    env.emplace(v, Rational(testgen::pick(rng, -5, 5)));
  return env;
}

}  // namespace

TEST_CASE("to_polynomial expands the predator-prey right-hand side") {
  Polynomial p = to_polynomial(parse_term("a*x - b*x*y"));
  REQUIRE(p.terms().size() == 2);
  Monomial ax{{"a", 1}, {"x", 1}};
  Monomial bxy{{"b", 1}, {"x", 1}, {"y", 1}};
  CHECK(p.terms().at(ax) == 1);
  CHECK(p.terms().at(bxy) == -1);
}

TEST_CASE("to_polynomial expands products of sums") {
  Polynomial p = to_polynomial(parse_term("(x+1)*(x-1)"));
  CHECK(p == to_polynomial(parse_term("x^2 - 1")));
}

TEST_CASE("division by a variable is rejected with an explanation") {
  CHECK_THROWS_AS(to_polynomial(parse_term("1/x")), NonPolynomialError);
  // constant denominators fold into coefficients
  CHECK(to_polynomial(parse_term("x/2")) == to_polynomial(parse_term("0.5*x")));
}

TEST_CASE("to_polynomial agrees with direct term evaluation") {
  testgen::Rng rng(4242);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    TermPtr t = testgen::gen_term(rng, 4);
    Polynomial p;
    try {
      p = to_polynomial(t);
    } catch (const NonPolynomialError&) {
      continue;  // generator may produce variable denominators
    }
    auto env = random_env(rng, free_vars(t));
    Rational direct;
    try {
      direct = eval_term(t, env);
    } catch (const std::runtime_error&) {
      continue;  // division by zero at this sample point
    }
    CAPTURE(print_term(t));
    REQUIRE(p.evaluate(env) == direct);
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("Lie derivative of the cleared equilibrium polynomial") {
  // L(d*x - g) along the predator-prey flow = d*(a*x - b*x*y)
  Polynomial h = to_polynomial(parse_term("d*x - g"));
  Polynomial lie = lie_derivative(h, lotka_ode());
  CHECK(lie == to_polynomial(parse_term("d*(a*x - b*x*y)")));
}

TEST_CASE("Lie derivative of a constant is zero") {
  Polynomial c = to_polynomial(parse_term("c1*c2 + 5"));
  CHECK(lie_derivative(c, lotka_ode()).is_zero());
}

TEST_CASE("Lie derivative of x^2 along x'=1 is 2x, cross-checked by the oracle") {
  OdeSystem sys = ode_system_from(*parse_game("{x' = 1}"));
  Polynomial lie = lie_derivative(to_polynomial(parse_term("x^2")), sys);
  CHECK(lie == to_polynomial(parse_term("2*x")));
  TermPtr oracle = oracle_lie(parse_term("x^2"), {{"x", t_const(1L)}});
  CHECK(lie == to_polynomial(oracle));
}

TEST_CASE("polynomial ops agree with the term-rewriting differentiator") {
  testgen::Rng rng(515151);
  std::vector<std::pair<std::string, TermPtr>> flow = {
      {"x", parse_term("y + 1")},
      {"y", parse_term("x*y - 2")},
      {"z", parse_term("z^2")},
  };
  OdeSystem sys;
  for (const auto& [v, rhs] : flow) sys.equations.emplace_back(v, to_polynomial(rhs));
  int checked = 0;
  for (int i = 0; i < 400 && checked < 200; ++i) {
    TermPtr t = testgen::gen_term(rng, 4);
    if (has_div(t)) continue;  // the oracle handles division-free terms only
    Polynomial p = to_polynomial(t);
    if (p.total_degree() > 4) continue;
    CAPTURE(print_term(t));
    REQUIRE(lie_derivative(p, sys) == to_polynomial(oracle_lie(t, flow)));
    ++checked;
  }
  CHECK(checked >= 150);
}

TEST_CASE("linearity and Leibniz on random polynomial pairs") {
  testgen::Rng rng(808);
  OdeSystem sys = lotka_ode();
  int done = 0;
  for (int i = 0; i < 1000 && done < 500; ++i) {
    TermPtr ta = testgen::gen_simple_term(rng, 3);
    TermPtr tb = testgen::gen_simple_term(rng, 3);
    Polynomial p = to_polynomial(ta), q = to_polynomial(tb);
    REQUIRE(lie_derivative(p + q, sys) == lie_derivative(p, sys) + lie_derivative(q, sys));
    REQUIRE(lie_derivative(p * q, sys) ==
            lie_derivative(p, sys) * q + p * lie_derivative(q, sys));
    ++done;
  }
  CHECK(done == 500);
}

TEST_CASE("dRI premise reproduces the equilibrium-invariance equations") {
  // targets d*x - g and b*y - a at order 1 under the cleared context
  std::vector<Polynomial> targets = {to_polynomial(parse_term("d*x - g")),
                                     to_polynomial(parse_term("b*y - a"))};
  FormulaPtr ctx = parse_formula("d*x - g = 0 & b*y - a = 0");
  FormulaPtr vc = dri_vc(targets, lotka_ode(), 1, ctx);
  REQUIRE(vc->kind == FormulaKind::Imply);
  FormulaPtr rhs = vc->right;
  REQUIRE(rhs->kind == FormulaKind::And);
  // first conjunct: d*(a*x - b*x*y) = 0 up to monomial normalization
  CHECK(to_polynomial(rhs->left->term_left) == to_polynomial(parse_term("d*(a*x - b*x*y)")));
  CHECK(to_polynomial(rhs->right->term_left) == to_polynomial(parse_term("b*(d*x*y - g*y)")));
}

TEST_CASE("dRI of a syntactically conserved target is 0=0") {
  // h = x^2 + y^2 under the rotation x'=y, y'=-x: L(h) = 2xy - 2xy = 0
  OdeSystem rot = ode_system_from(*parse_game("{x' = y, y' = -x}"));
  Polynomial h = to_polynomial(parse_term("x^2 + y^2 - 1"));
  CHECK(lie_derivative(h, rot).is_zero());
  FormulaPtr vc = dri_vc({h}, rot, 2, f_true());
  // both derivative levels identically zero
  REQUIRE(vc->right->kind == FormulaKind::And);
  CHECK(print_term(vc->right->left->term_left) == "0");
  CHECK(print_term(vc->right->right->term_left) == "0");
}

TEST_CASE("formula derivative follows the weak-obligation table") {
  OdeSystem sys = lotka_ode();
  FormulaPtr d = formula_derivative(parse_formula("x >= xmin"), sys);
  REQUIRE(d->kind == FormulaKind::Cmp);
  CHECK(d->op == CmpOp::Ge);
  CHECK(to_polynomial(d->term_left) == to_polynomial(parse_term("a*x - b*x*y")));
  CHECK(to_polynomial(d->term_right).is_zero());

  FormulaPtr strict = formula_derivative(parse_formula("x > xmin"), sys);
  CHECK(strict->op == CmpOp::Ge);  // strict derives to weak

  FormulaPtr eqs = formula_derivative(parse_formula("x = c & y = c"), sys);
  REQUIRE(eqs->kind == FormulaKind::And);
  CHECK(eqs->left->op == CmpOp::Eq);
  CHECK(eqs->right->op == CmpOp::Eq);

  CHECK(formula_derivative(f_true(), sys)->kind == FormulaKind::True);
}

TEST_CASE("conjunction derivative equals conjunction of derivatives") {
  testgen::Rng rng(6161);
  OdeSystem sys = lotka_ode();
  for (int i = 0; i < 100; ++i) {
    TermPtr ta = testgen::gen_simple_term(rng, 2);
    TermPtr tb = testgen::gen_simple_term(rng, 2);
    FormulaPtr fa = f_cmp(CmpOp::Ge, ta, t_const(0L));
    FormulaPtr fb = f_cmp(CmpOp::Le, tb, t_const(0L));
    FormulaPtr both = formula_derivative(f_and(fa, fb), sys);
    REQUIRE(equal(both, f_and(formula_derivative(fa, sys), formula_derivative(fb, sys))));
  }
}

TEST_CASE("formula derivative rejects modalities and quantifiers") {
  OdeSystem sys = lotka_ode();
  CHECK_THROWS_AS(formula_derivative(parse_formula("\\forall x (x >= 0)"), sys),
                  std::invalid_argument);
  CHECK_THROWS_AS(formula_derivative(parse_formula("<x := 1;> x >= 0"), sys),
                  std::invalid_argument);
}

TEST_CASE("di_vc for the coolant discharge bound") {
  OdeSystem coolant = ode_system_from(*parse_game(
      "{absbd' = flow*c1*tempDiff, disch' = flow, tempDiff' = -flow*c2*tempDiff + g, "
      "t' = 1, deadline' = -1 & t <= T}"));
  DiVc vc = di_vc(parse_formula("disch <= dmax"), coolant, parse_formula("flow = 0"));
  // step: (t <= T & flow = 0) -> flow <= 0
  REQUIRE(vc.step->kind == FormulaKind::Imply);
  FormulaPtr obligation = vc.step->right;
  REQUIRE(obligation->kind == FormulaKind::Cmp);
  CHECK(obligation->op == CmpOp::Le);
  CHECK(to_polynomial(obligation->term_left) == to_polynomial(parse_term("flow")));
}

TEST_CASE("di_vc with a constants-only invariant has a trivial step obligation") {
  OdeSystem sys = lotka_ode();
  DiVc vc = di_vc(parse_formula("c1 >= 0"), sys, f_true());
  FormulaPtr obligation = simplify(vc.step->right);
  CHECK(obligation->kind == FormulaKind::True);  // 0 >= 0
}
