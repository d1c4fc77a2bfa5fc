#pragma once

// Random AST generators shared by the property tests and the acceptance
// suite. Deterministic for a fixed seed.

#include <random>
#include <string>
#include <vector>

#include "dgl/ast.hpp"

namespace dgl::testgen {

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline std::string pick_var(Rng& rng) {
  static const char* names[] = {"x", "y", "z", "w", "v"};
  return names[pick(rng, 0, 4)];
}

inline TermPtr gen_term(Rng& rng, int depth) {
  if (depth <= 0 || pick(rng, 0, 3) == 0) {
    if (pick(rng, 0, 1) == 0) return t_var(pick_var(rng));
    switch (pick(rng, 0, 4)) {
      case 0: return t_const(Rational(pick(rng, 0, 9)));
      case 1: return t_const(Rational(1, 2));
      case 2: return t_const(Rational(5, 4));
      default: return t_const(Rational(pick(rng, 0, 20)));
    }
  }
  switch (pick(rng, 0, 6)) {
    case 0: return t_add(gen_term(rng, depth - 1), gen_term(rng, depth - 1));
    case 1: return t_sub(gen_term(rng, depth - 1), gen_term(rng, depth - 1));
    case 2: return t_mul(gen_term(rng, depth - 1), gen_term(rng, depth - 1));
    case 3: return t_div(gen_term(rng, depth - 1), gen_term(rng, depth - 1));
    case 4: return t_neg(gen_term(rng, depth - 1));
    case 5: return t_power(gen_term(rng, depth - 1), (unsigned)pick(rng, 0, 3));
    default: return t_var(pick_var(rng));
  }
}

inline CmpOp gen_cmp_op(Rng& rng) {
  switch (pick(rng, 0, 4)) {
    case 0: return CmpOp::Lt;
    case 1: return CmpOp::Le;
    case 2: return CmpOp::Eq;
    case 3: return CmpOp::Ge;
    default: return CmpOp::Gt;
  }
}

GamePtr gen_game(Rng& rng, int depth);

inline FormulaPtr gen_formula(Rng& rng, int depth, bool with_modalities = false) {
  if (depth <= 0 || pick(rng, 0, 3) == 0) {
    switch (pick(rng, 0, 5)) {
      case 0: return f_true();
      case 1: return f_false();
      default: return f_cmp(gen_cmp_op(rng), gen_term(rng, depth), gen_term(rng, depth));
    }
  }
  int hi = with_modalities ? 8 : 6;
  switch (pick(rng, 0, hi)) {
    case 0: return f_not(gen_formula(rng, depth - 1, with_modalities));
    case 1: return f_and(gen_formula(rng, depth - 1, with_modalities),
                         gen_formula(rng, depth - 1, with_modalities));
    case 2: return f_or(gen_formula(rng, depth - 1, with_modalities),
                        gen_formula(rng, depth - 1, with_modalities));
    case 3: return f_imply(gen_formula(rng, depth - 1, with_modalities),
                           gen_formula(rng, depth - 1, with_modalities));
    case 4: return f_equiv(gen_formula(rng, depth - 1, with_modalities),
                           gen_formula(rng, depth - 1, with_modalities));
    case 5: return f_forall(pick_var(rng), gen_formula(rng, depth - 1, with_modalities));
    case 6: return f_exists(pick_var(rng), gen_formula(rng, depth - 1, with_modalities));
    case 7: return f_diamond(gen_game(rng, depth - 1), gen_formula(rng, depth - 1, true));
    default: return f_box(gen_game(rng, depth - 1), gen_formula(rng, depth - 1, true));
  }
}

inline GamePtr gen_game(Rng& rng, int depth) {
  if (depth <= 0 || pick(rng, 0, 3) == 0) {
    switch (pick(rng, 0, 2)) {
      case 0: return g_assign(pick_var(rng), gen_term(rng, 1));
      case 1: return g_assign_any(pick_var(rng));
      default: return g_test(gen_formula(rng, 1));
    }
  }
  switch (pick(rng, 0, 6)) {
    case 0: return g_seq(gen_game(rng, depth - 1), gen_game(rng, depth - 1));
    case 1: return g_choice(gen_game(rng, depth - 1), gen_game(rng, depth - 1));
    case 2: return g_repeat(gen_game(rng, depth - 1));
    case 3: return g_dual(gen_game(rng, depth - 1));
    case 4: {
      std::vector<OdeEquation> eqs;
      std::vector<std::string> vars = {"x", "y", "z"};
      int n = pick(rng, 1, 3);
      for (int i = 0; i < n; ++i) eqs.push_back(OdeEquation{vars[(size_t)i], gen_term(rng, 1)});
      FormulaPtr dom = pick(rng, 0, 1) ? gen_formula(rng, 1) : nullptr;
      return g_ode(std::move(eqs), std::move(dom));
    }
    default: return g_test(gen_formula(rng, depth - 1));
  }
}

// Loop-, ODE- and nondeterministic-assignment-free games over small integer
// terms, for comparison against the finite-domain reference interpreter.
inline TermPtr gen_simple_term(Rng& rng, int depth) {
  if (depth <= 0 || pick(rng, 0, 2) == 0) {
    if (pick(rng, 0, 1) == 0) return t_var(pick_var(rng));
    return t_const(Rational(pick(rng, -2, 2)));
  }
  switch (pick(rng, 0, 2)) {
    case 0: return t_add(gen_simple_term(rng, depth - 1), gen_simple_term(rng, depth - 1));
    case 1: return t_sub(gen_simple_term(rng, depth - 1), gen_simple_term(rng, depth - 1));
    default: return t_mul(gen_simple_term(rng, depth - 1), gen_simple_term(rng, depth - 1));
  }
}

inline FormulaPtr gen_simple_formula(Rng& rng, int depth) {
  if (depth <= 0 || pick(rng, 0, 2) == 0)
    return f_cmp(gen_cmp_op(rng), gen_simple_term(rng, 1), gen_simple_term(rng, 1));
  switch (pick(rng, 0, 3)) {
    case 0: return f_and(gen_simple_formula(rng, depth - 1), gen_simple_formula(rng, depth - 1));
    case 1: return f_or(gen_simple_formula(rng, depth - 1), gen_simple_formula(rng, depth - 1));
    case 2: return f_not(gen_simple_formula(rng, depth - 1));
    default: return f_cmp(gen_cmp_op(rng), gen_simple_term(rng, 1), gen_simple_term(rng, 1));
  }
}

inline GamePtr gen_decidable_game(Rng& rng, int depth) {
  if (depth <= 0 || pick(rng, 0, 3) == 0) {
    switch (pick(rng, 0, 1)) {
      case 0: return g_assign(pick_var(rng), gen_simple_term(rng, 1));
      default: return g_test(gen_simple_formula(rng, 1));
    }
  }
  switch (pick(rng, 0, 3)) {
    case 0: return g_seq(gen_decidable_game(rng, depth - 1), gen_decidable_game(rng, depth - 1));
    case 1: return g_choice(gen_decidable_game(rng, depth - 1), gen_decidable_game(rng, depth - 1));
    case 2: return g_dual(gen_decidable_game(rng, depth - 1));
    default: return g_test(gen_simple_formula(rng, depth - 1));
  }
}

}  // namespace dgl::testgen
