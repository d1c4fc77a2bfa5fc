#include "dgl/printer.hpp"

#include <sstream>

namespace dgl {

namespace {

// Term precedence: + - (1) < * / (2) < unary - (3) < ^ (4) < atom (5).
int term_prec(const Term& t) {
  switch (t.kind) {
    case TermKind::Add:
    case TermKind::Sub: return 1;
    case TermKind::Mul:
    case TermKind::Div: return 2;
    case TermKind::Neg: return 3;
    case TermKind::Power: return 4;
    default: return 5;
  }
}

void term_out(std::ostream& os, const TermPtr& t, int min_prec) {
  int prec = term_prec(*t);
  bool parens = prec < min_prec;
  if (parens) os << "(";
  switch (t->kind) {
    case TermKind::Variable: os << t->name; break;
    case TermKind::Constant: os << rational_to_string(t->value); break;
    case TermKind::Add:
      term_out(os, t->left, 1); os << " + "; term_out(os, t->right, 2); break;
    case TermKind::Sub:
      term_out(os, t->left, 1); os << " - "; term_out(os, t->right, 2); break;
    case TermKind::Mul:
      term_out(os, t->left, 2); os << " * "; term_out(os, t->right, 3); break;
    case TermKind::Div:
      term_out(os, t->left, 2); os << " / "; term_out(os, t->right, 3); break;
    case TermKind::Neg:
      os << "-"; term_out(os, t->left, 3); break;
    case TermKind::Power:
      term_out(os, t->left, 5); os << "^" << t->exponent; break;
  }
  if (parens) os << ")";
}

// Formula precedence: <-> (1) < -> (2) < | (3) < & (4) < prefix (5) < atom (6).
int formula_prec(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Equiv: return 1;
    case FormulaKind::Imply: return 2;
    case FormulaKind::Or: return 3;
    case FormulaKind::And: return 4;
    case FormulaKind::Not:
    case FormulaKind::Forall:
    case FormulaKind::Exists:
    case FormulaKind::Diamond:
    case FormulaKind::Box: return 5;
    default: return 6;
  }
}

void game_out(std::ostream& os, const GamePtr& g, const GameDecorator* decorate);

void formula_out(std::ostream& os, const FormulaPtr& f, int min_prec,
                 const GameDecorator* decorate) {
  int prec = formula_prec(*f);
  bool parens = prec < min_prec;
  if (parens) os << "(";
  switch (f->kind) {
    case FormulaKind::True: os << "true"; break;
    case FormulaKind::False: os << "false"; break;
    case FormulaKind::Cmp:
      term_out(os, f->term_left, 1);
      os << " " << cmp_op_text(f->op) << " ";
      term_out(os, f->term_right, 1);
      break;
    case FormulaKind::Not:
      os << "!(";
      formula_out(os, f->left, 1, decorate);
      os << ")";
      break;
    case FormulaKind::And:
      formula_out(os, f->left, 4, decorate); os << " & ";
      formula_out(os, f->right, 5, decorate);
      break;
    case FormulaKind::Or:
      formula_out(os, f->left, 3, decorate); os << " | ";
      formula_out(os, f->right, 4, decorate);
      break;
    case FormulaKind::Imply:
      formula_out(os, f->left, 3, decorate); os << " -> ";
      formula_out(os, f->right, 2, decorate);
      break;
    case FormulaKind::Equiv:
      formula_out(os, f->left, 1, decorate); os << " <-> ";
      formula_out(os, f->right, 2, decorate);
      break;
    case FormulaKind::Forall:
      os << "\\forall " << f->var << " (";
      formula_out(os, f->left, 1, decorate);
      os << ")";
      break;
    case FormulaKind::Exists:
      os << "\\exists " << f->var << " (";
      formula_out(os, f->left, 1, decorate);
      os << ")";
      break;
    case FormulaKind::Diamond:
    case FormulaKind::Box: {
      os << (f->kind == FormulaKind::Diamond ? "<" : "[");
      game_out(os, f->game, decorate);
      os << (f->kind == FormulaKind::Diamond ? ">" : "]");
      bool atom = false;
      switch (f->left->kind) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Cmp: atom = true; break;
        default: break;
      }
      if (atom) {
        formula_out(os, f->left, 6, decorate);
      } else {
        os << "(";
        formula_out(os, f->left, 1, decorate);
        os << ")";
      }
      break;
    }
  }
  if (parens) os << ")";
}

void ode_out(std::ostream& os, const Game& g, const GameDecorator* decorate) {
  os << "{";
  for (size_t i = 0; i < g.equations.size(); ++i) {
    if (i) os << ", ";
    os << g.equations[i].var << "' = ";
    term_out(os, g.equations[i].rhs, 1);
  }
  if (g.formula) {
    os << " & ";
    formula_out(os, g.formula, 1, decorate);
  }
  os << "}";
}

// Renders a node suitable for postfix chains: `{...}`-wrapped unless it is
// itself a postfix chain or an ODE (which brings its own braces).
void postfix_operand_out(std::ostream& os, const GamePtr& g, const GameDecorator* decorate) {
  switch (g->kind) {
    case GameKind::Repeat:
      postfix_operand_out(os, g->left, decorate); os << "*"; break;
    case GameKind::Dual:
      postfix_operand_out(os, g->left, decorate); os << "^@"; break;
    case GameKind::Ode:
      ode_out(os, *g, decorate); break;
    default:
      os << "{";
      game_out(os, g, decorate);
      os << "}";
      break;
  }
}

const Game* strip_duals(const Game* g) {
  while (g->kind == GameKind::Dual) g = g->left.get();
  return g;
}

// Game grammar levels: choice (1) < seq (2) < postfix/atom (3).
int game_prec(const Game& g) {
  switch (g.kind) {
    case GameKind::Choice: return 1;
    case GameKind::Seq: return 2;
    default: return 3;
  }
}

void game_level_out(std::ostream& os, const GamePtr& g, int min_prec,
                    const GameDecorator* decorate) {
  std::ostringstream body;
  int prec = game_prec(*g);
  switch (g->kind) {
    case GameKind::Assign:
      body << g->var << " := ";
      term_out(body, g->term, 1);
      body << ";";
      break;
    case GameKind::AssignAny:
      body << g->var << " := *;";
      break;
    case GameKind::Test:
      body << "?";
      formula_out(body, g->formula, 1, decorate);
      body << ";";
      break;
    case GameKind::Seq: {
      std::ostringstream left;
      game_level_out(left, g->left, 2, decorate);
      std::string left_text = left.str();
      body << left_text;
      // statements carry their own ';'; groups and postfix chains need one
      if (!left_text.empty() && left_text.back() != ';') body << ";";
      body << " ";
      game_level_out(body, g->right, 3, decorate);
      break;
    }
    case GameKind::Choice:
      game_level_out(body, g->left, 1, decorate);
      body << " ++ ";
      game_level_out(body, g->right, 2, decorate);
      break;
    case GameKind::Repeat:
    case GameKind::Dual:
      postfix_operand_out(body, g, decorate);
      break;
    case GameKind::Ode:
      ode_out(body, *g, decorate);
      break;
  }
  std::string text = body.str();
  if (decorate) text = (*decorate)(strip_duals(g.get()), text);
  if (prec < min_prec) os << "{" << text << "}";
  else os << text;
}

void game_out(std::ostream& os, const GamePtr& g, const GameDecorator* decorate) {
  game_level_out(os, g, 1, decorate);
}

}  // namespace

std::string print_term(const TermPtr& t) {
  std::ostringstream os;
  term_out(os, t, 1);
  return os.str();
}

std::string print_formula(const FormulaPtr& f) {
  std::ostringstream os;
  formula_out(os, f, 1, nullptr);
  return os.str();
}

std::string print_game(const GamePtr& g) {
  std::ostringstream os;
  game_out(os, g, nullptr);
  return os.str();
}

std::string print_game(const GamePtr& g, const GameDecorator& decorate) {
  std::ostringstream os;
  game_out(os, g, &decorate);
  return os.str();
}

}  // namespace dgl
