#include "dgl/vars.hpp"

#include <functional>
#include <stdexcept>

namespace dgl {

namespace {

void collect_term(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  switch (t->kind) {
    case TermKind::Variable: out.insert(t->name); return;
    case TermKind::Constant: return;
    default:
      collect_term(t->left, out);
      collect_term(t->right, out);
  }
}

void collect_formula(const FormulaPtr& f, std::set<std::string>& out);

void collect_game(const GamePtr& g, std::set<std::string>& out) {
  switch (g->kind) {
    case GameKind::Assign:
      out.insert(g->var);  // read-or-write occurrence; conservative superset
      collect_term(g->term, out);
      return;
    case GameKind::AssignAny:
      return;
    case GameKind::Test:
      collect_formula(g->formula, out);
      return;
    case GameKind::Seq:
    case GameKind::Choice:
      collect_game(g->left, out);
      collect_game(g->right, out);
      return;
    case GameKind::Repeat:
    case GameKind::Dual:
      collect_game(g->left, out);
      return;
    case GameKind::Ode:
      for (const auto& eq : g->equations) {
        out.insert(eq.var);
        collect_term(eq.rhs, out);
      }
      if (g->formula) collect_formula(g->formula, out);
      return;
  }
}

void collect_formula(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      return;
    case FormulaKind::Cmp:
      collect_term(f->term_left, out);
      collect_term(f->term_right, out);
      return;
    case FormulaKind::Not:
      collect_formula(f->left, out);
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      std::set<std::string> inner;
      collect_formula(f->left, inner);
      inner.erase(f->var);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case FormulaKind::Diamond:
    case FormulaKind::Box:
      collect_game(f->game, out);
      collect_formula(f->left, out);
      return;
    default:
      collect_formula(f->left, out);
      collect_formula(f->right, out);
      return;
  }
}

void collect_bound(const GamePtr& g, std::set<std::string>& out) {
  switch (g->kind) {
    case GameKind::Assign:
    case GameKind::AssignAny:
      out.insert(g->var);
      return;
    case GameKind::Test:
      return;
    case GameKind::Seq:
    case GameKind::Choice:
      collect_bound(g->left, out);
      collect_bound(g->right, out);
      return;
    case GameKind::Repeat:
    case GameKind::Dual:
      collect_bound(g->left, out);
      return;
    case GameKind::Ode:
      for (const auto& eq : g->equations) out.insert(eq.var);
      return;
  }
}

}  // namespace

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> out;
  collect_term(t, out);
  return out;
}

std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> out;
  collect_formula(f, out);
  return out;
}

std::set<std::string> free_vars(const GamePtr& g) {
  std::set<std::string> out;
  collect_game(g, out);
  return out;
}

std::set<std::string> bound_vars(const GamePtr& g) {
  std::set<std::string> out;
  collect_bound(g, out);
  return out;
}

TermPtr substitute_term(const TermPtr& t, const std::string& var, const TermPtr& replacement) {
  switch (t->kind) {
    case TermKind::Variable:
      return t->name == var ? replacement : t;
    case TermKind::Constant:
      return t;
    case TermKind::Add:
      return t_add(substitute_term(t->left, var, replacement),
                   substitute_term(t->right, var, replacement));
    case TermKind::Sub:
      return t_sub(substitute_term(t->left, var, replacement),
                   substitute_term(t->right, var, replacement));
    case TermKind::Mul:
      return t_mul(substitute_term(t->left, var, replacement),
                   substitute_term(t->right, var, replacement));
    case TermKind::Div:
      return t_div(substitute_term(t->left, var, replacement),
                   substitute_term(t->right, var, replacement));
    case TermKind::Neg:
      return t_neg(substitute_term(t->left, var, replacement));
    case TermKind::Power:
      return t_power(substitute_term(t->left, var, replacement), t->exponent);
  }
  return t;
}

namespace {

FormulaPtr rename_bound(const FormulaPtr& quantified, const std::string& fresh) {
  // quantified is Forall/Exists; rename its bound variable to `fresh`.
  FormulaPtr body = substitute(quantified->left, quantified->var, t_var(fresh));
  return quantified->kind == FormulaKind::Forall ? f_forall(fresh, body)
                                                 : f_exists(fresh, body);
}

}  // namespace

FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const TermPtr& replacement) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Cmp:
      return f_cmp(f->op, substitute_term(f->term_left, var, replacement),
                   substitute_term(f->term_right, var, replacement));
    case FormulaKind::Not:
      return f_not(substitute(f->left, var, replacement));
    case FormulaKind::And:
      return f_and(substitute(f->left, var, replacement), substitute(f->right, var, replacement));
    case FormulaKind::Or:
      return f_or(substitute(f->left, var, replacement), substitute(f->right, var, replacement));
    case FormulaKind::Imply:
      return f_imply(substitute(f->left, var, replacement), substitute(f->right, var, replacement));
    case FormulaKind::Equiv:
      return f_equiv(substitute(f->left, var, replacement), substitute(f->right, var, replacement));
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      if (f->var == var) return f;  // shadowed
      std::set<std::string> repl_vars = free_vars(replacement);
      if (repl_vars.count(f->var)) {
        std::set<std::string> taken = free_vars(f->left);
        taken.insert(repl_vars.begin(), repl_vars.end());
        taken.insert(var);
        FormulaPtr renamed = rename_bound(f, fresh_name(f->var, taken));
        return substitute(renamed, var, replacement);
      }
      FormulaPtr body = substitute(f->left, var, replacement);
      return f->kind == FormulaKind::Forall ? f_forall(f->var, body) : f_exists(f->var, body);
    }
    case FormulaKind::Diamond:
    case FormulaKind::Box: {
      std::set<std::string> game_writes = bound_vars(f->game);
      if (game_writes.count(var))
        throw std::invalid_argument(
            "substitution into a modality whose game binds '" + var + "' is inadmissible");
      for (const auto& v : free_vars(replacement))
        if (game_writes.count(v))
          throw std::invalid_argument(
              "substitution would capture '" + v + "' bound by the modal game");
      // The game only reads `var` in terms/tests; rebuild it structurally.
      std::function<GamePtr(const GamePtr&)> in_game = [&](const GamePtr& g) -> GamePtr {
        switch (g->kind) {
          case GameKind::Assign:
            return g_assign(g->var, substitute_term(g->term, var, replacement));
          case GameKind::AssignAny:
            return g;
          case GameKind::Test:
            return g_test(substitute(g->formula, var, replacement));
          case GameKind::Seq:
            return g_seq(in_game(g->left), in_game(g->right));
          case GameKind::Choice:
            return g_choice(in_game(g->left), in_game(g->right));
          case GameKind::Repeat:
            return g_repeat(in_game(g->left));
          case GameKind::Dual:
            return g_dual(in_game(g->left));
          case GameKind::Ode: {
            std::vector<OdeEquation> eqs;
            for (const auto& eq : g->equations)
              eqs.push_back(OdeEquation{eq.var, substitute_term(eq.rhs, var, replacement)});
            FormulaPtr dom = g->formula ? substitute(g->formula, var, replacement) : nullptr;
            return g_ode(std::move(eqs), std::move(dom));
          }
        }
        return g;
      };
      FormulaPtr post = substitute(f->left, var, replacement);
      GamePtr game = in_game(f->game);
      return f->kind == FormulaKind::Diamond ? f_diamond(game, post) : f_box(game, post);
    }
  }
  return f;
}

namespace {

bool try_const(const TermPtr& t, Rational& out) {
  switch (t->kind) {
    case TermKind::Constant: out = t->value; return true;
    case TermKind::Neg: {
      Rational v;
      if (!try_const(t->left, v)) return false;
      out = -v;
      return true;
    }
    default:
      return false;
  }
}

bool cmp_holds(CmpOp op, const Rational& a, const Rational& b) {
  switch (op) {
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Eq: return a == b;
    case CmpOp::Ge: return a >= b;
    case CmpOp::Gt: return a > b;
  }
  return false;
}

void flatten(FormulaKind kind, const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (f->kind == kind) {
    flatten(kind, f->left, out);
    flatten(kind, f->right, out);
  } else {
    out.push_back(f);
  }
}

FormulaPtr rebuild(FormulaKind kind, const std::vector<FormulaPtr>& parts) {
  FormulaPtr acc = parts.front();
  for (size_t i = 1; i < parts.size(); ++i)
    acc = kind == FormulaKind::And ? f_and(acc, parts[i]) : f_or(acc, parts[i]);
  return acc;
}

}  // namespace

FormulaPtr simplify(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::Cmp: {
      Rational a, b;
      if (try_const(f->term_left, a) && try_const(f->term_right, b))
        return cmp_holds(f->op, a, b) ? f_true() : f_false();
      return f;
    }
    case FormulaKind::Not: {
      FormulaPtr c = simplify(f->left);
      if (c->kind == FormulaKind::True) return f_false();
      if (c->kind == FormulaKind::False) return f_true();
      return f_not(c);
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
      bool is_and = f->kind == FormulaKind::And;
      std::vector<FormulaPtr> raw;
      flatten(f->kind, f, raw);
      std::vector<FormulaPtr> kept;
      for (const auto& part : raw) {
        FormulaPtr s = simplify(part);
        if (s->kind == FormulaKind::True) {
          if (!is_and) return f_true();
          continue;
        }
        if (s->kind == FormulaKind::False) {
          if (is_and) return f_false();
          continue;
        }
        bool dup = false;
        for (const auto& k : kept)
          if (equal(k, s)) { dup = true; break; }
        if (!dup) kept.push_back(s);
      }
      if (kept.empty()) return is_and ? f_true() : f_false();
      return rebuild(f->kind, kept);
    }
    case FormulaKind::Imply: {
      FormulaPtr l = simplify(f->left), r = simplify(f->right);
      if (l->kind == FormulaKind::True) return r;
      if (l->kind == FormulaKind::False) return f_true();
      if (r->kind == FormulaKind::True) return f_true();
      return f_imply(l, r);
    }
    case FormulaKind::Equiv: {
      FormulaPtr l = simplify(f->left), r = simplify(f->right);
      if (l->kind == FormulaKind::True) return r;
      if (r->kind == FormulaKind::True) return l;
      return f_equiv(l, r);
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      FormulaPtr body = simplify(f->left);
      if (body->kind == FormulaKind::True || body->kind == FormulaKind::False) return body;
      return f->kind == FormulaKind::Forall ? f_forall(f->var, body) : f_exists(f->var, body);
    }
    default:
      return f;
  }
}

std::vector<FormulaPtr> conjuncts(const FormulaPtr& f) {
  std::vector<FormulaPtr> out;
  flatten(FormulaKind::And, f, out);
  return out;
}

FormulaPtr conjoin(const std::vector<FormulaPtr>& fs) {
  if (fs.empty()) return f_true();
  return rebuild(FormulaKind::And, fs);
}

std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  if (!taken.count(base)) return base;
  for (int i = 0;; ++i) {
    std::string candidate = base + std::to_string(i);
    if (!taken.count(candidate)) return candidate;
  }
}

}  // namespace dgl
