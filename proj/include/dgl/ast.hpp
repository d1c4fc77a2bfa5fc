#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dgl/rational.hpp"

namespace dgl {

// Abstract syntax of dGL terms, formulas and games. All nodes are immutable
// and shared; builders below are the only way to construct them.

struct Term;
struct Formula;
struct Game;
using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;
using GamePtr = std::shared_ptr<const Game>;

enum class TermKind { Variable, Constant, Add, Sub, Mul, Div, Neg, Power };

struct Term {
  TermKind kind;
  std::string name;    // Variable
  Rational value;      // Constant
  TermPtr left, right; // binary nodes; Neg and Power use left only
  unsigned exponent = 0; // Power, a natural number
};

TermPtr t_var(std::string name);
TermPtr t_const(Rational value);
TermPtr t_const(long value);
TermPtr t_add(TermPtr l, TermPtr r);
TermPtr t_sub(TermPtr l, TermPtr r);
TermPtr t_mul(TermPtr l, TermPtr r);
TermPtr t_div(TermPtr l, TermPtr r);
TermPtr t_neg(TermPtr t);
TermPtr t_power(TermPtr base, unsigned exponent);

enum class CmpOp { Lt, Le, Eq, Ge, Gt };

enum class FormulaKind {
  True, False, Cmp, Not, And, Or, Imply, Equiv, Forall, Exists, Diamond, Box
};

struct Formula {
  FormulaKind kind;
  CmpOp op = CmpOp::Eq;  // Cmp
  TermPtr term_left, term_right;
  FormulaPtr left, right;  // Not uses left only
  std::string var;         // quantifiers
  GamePtr game;            // modalities, with `left` as the postcondition
};

FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_cmp(CmpOp op, TermPtr l, TermPtr r);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_and(FormulaPtr l, FormulaPtr r);
FormulaPtr f_or(FormulaPtr l, FormulaPtr r);
FormulaPtr f_imply(FormulaPtr l, FormulaPtr r);
FormulaPtr f_equiv(FormulaPtr l, FormulaPtr r);
FormulaPtr f_forall(std::string var, FormulaPtr body);
FormulaPtr f_exists(std::string var, FormulaPtr body);
FormulaPtr f_diamond(GamePtr game, FormulaPtr post);
FormulaPtr f_box(GamePtr game, FormulaPtr post);

enum class GameKind { Assign, AssignAny, Test, Seq, Choice, Repeat, Ode, Dual };

struct OdeEquation {
  std::string var;
  TermPtr rhs;
};

struct Game {
  GameKind kind;
  std::string var;       // Assign/AssignAny target
  TermPtr term;          // Assign rhs
  FormulaPtr formula;    // Test condition, Ode domain (may be null = true)
  GamePtr left, right;   // Seq/Choice; Repeat and Dual use left only
  std::vector<OdeEquation> equations;  // Ode, non-empty with distinct vars
};

GamePtr g_assign(std::string var, TermPtr rhs);
GamePtr g_assign_any(std::string var);
GamePtr g_test(FormulaPtr cond);
GamePtr g_seq(GamePtr a, GamePtr b);
GamePtr g_choice(GamePtr a, GamePtr b);
GamePtr g_repeat(GamePtr body);
GamePtr g_dual(GamePtr body);
// domain may be null for an unconstrained ODE.
GamePtr g_ode(std::vector<OdeEquation> equations, FormulaPtr domain);

bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);
bool equal(const GamePtr& a, const GamePtr& b);

const char* cmp_op_text(CmpOp op);
CmpOp cmp_flip(CmpOp op);  // mirror around '=': < <-> >, <= <-> >=

}  // namespace dgl
