#include "dgl/smt.hpp"

#include <cctype>
#include <sstream>
#include <vector>

#include "dgl/printer.hpp"
#include "dgl/vars.hpp"

namespace dgl {

Rational eval_term_exact(const TermPtr& t, const std::map<std::string, Rational>& env) {
  switch (t->kind) {
    case TermKind::Variable: {
      auto it = env.find(t->name);
      if (it == env.end()) throw std::invalid_argument("no value for variable " + t->name);
      return it->second;
    }
    case TermKind::Constant: return t->value;
    case TermKind::Add: return eval_term_exact(t->left, env) + eval_term_exact(t->right, env);
    case TermKind::Sub: return eval_term_exact(t->left, env) - eval_term_exact(t->right, env);
    case TermKind::Mul: return eval_term_exact(t->left, env) * eval_term_exact(t->right, env);
    case TermKind::Neg: return -eval_term_exact(t->left, env);
    case TermKind::Power: {
      Rational base = eval_term_exact(t->left, env);
      Rational v = 1;
      for (unsigned i = 0; i < t->exponent; ++i) v *= base;
      return v;
    }
    case TermKind::Div: {
      Rational den = eval_term_exact(t->right, env);
      if (den == 0) throw EvalError("division by zero in " + print_term(t));
      return eval_term_exact(t->left, env) / den;
    }
  }
  throw std::logic_error("unreachable");
}

bool eval_formula_exact(const FormulaPtr& f, const std::map<std::string, Rational>& env) {
  switch (f->kind) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Cmp: {
      Rational l = eval_term_exact(f->term_left, env);
      Rational r = eval_term_exact(f->term_right, env);
      switch (f->op) {
        case CmpOp::Lt: return l < r;
        case CmpOp::Le: return l <= r;
        case CmpOp::Eq: return l == r;
        case CmpOp::Ge: return l >= r;
        case CmpOp::Gt: return l > r;
      }
      return false;
    }
    case FormulaKind::Not: return !eval_formula_exact(f->left, env);
    case FormulaKind::And: return eval_formula_exact(f->left, env) && eval_formula_exact(f->right, env);
    case FormulaKind::Or: return eval_formula_exact(f->left, env) || eval_formula_exact(f->right, env);
    case FormulaKind::Imply: return !eval_formula_exact(f->left, env) || eval_formula_exact(f->right, env);
    case FormulaKind::Equiv: return eval_formula_exact(f->left, env) == eval_formula_exact(f->right, env);
    default:
      throw std::invalid_argument("cannot evaluate quantifiers or modalities pointwise");
  }
}

bool is_modality_free(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::Diamond:
    case FormulaKind::Box: return false;
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Cmp: return true;
    case FormulaKind::Not:
    case FormulaKind::Forall:
    case FormulaKind::Exists: return is_modality_free(f->left);
    default: return is_modality_free(f->left) && is_modality_free(f->right);
  }
}

bool is_quantifier_free(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::Forall:
    case FormulaKind::Exists: return false;
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Cmp: return true;
    case FormulaKind::Not: return is_quantifier_free(f->left);
    case FormulaKind::Diamond:
    case FormulaKind::Box: return is_quantifier_free(f->left);
    default: return is_quantifier_free(f->left) && is_quantifier_free(f->right);
  }
}

namespace {

void smt_rational(std::ostream& os, const Rational& r) {
  Integer num = boost::multiprecision::numerator(r);
  Integer den = boost::multiprecision::denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  std::ostringstream body;
  if (den == 1) body << num.str() << ".0";
  else body << "(/ " << num.str() << ".0 " << den.str() << ".0)";
  if (neg) os << "(- " << body.str() << ")";
  else os << body.str();
}

void smt_term(std::ostream& os, const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Variable: os << t->name; return;
    case TermKind::Constant: smt_rational(os, t->value); return;
    case TermKind::Add:
      os << "(+ "; smt_term(os, t->left); os << " "; smt_term(os, t->right); os << ")"; return;
    case TermKind::Sub:
      os << "(- "; smt_term(os, t->left); os << " "; smt_term(os, t->right); os << ")"; return;
    case TermKind::Mul:
      os << "(* "; smt_term(os, t->left); os << " "; smt_term(os, t->right); os << ")"; return;
    case TermKind::Div:
      os << "(/ "; smt_term(os, t->left); os << " "; smt_term(os, t->right); os << ")"; return;
    case TermKind::Neg:
      os << "(- "; smt_term(os, t->left); os << ")"; return;
    case TermKind::Power: {
      if (t->exponent == 0) { os << "1.0"; return; }
      std::ostringstream base;
      smt_term(base, t->left);
      if (t->exponent == 1) { os << base.str(); return; }
      os << "(*";
      for (unsigned i = 0; i < t->exponent; ++i) os << " " << base.str();
      os << ")";
      return;
    }
  }
}

void smt_formula(std::ostream& os, const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::True: os << "true"; return;
    case FormulaKind::False: os << "false"; return;
    case FormulaKind::Cmp: {
      const char* op = nullptr;
      switch (f->op) {
        case CmpOp::Lt: op = "<"; break;
        case CmpOp::Le: op = "<="; break;
        case CmpOp::Eq: op = "="; break;
        case CmpOp::Ge: op = ">="; break;
        case CmpOp::Gt: op = ">"; break;
      }
      os << "(" << op << " ";
      smt_term(os, f->term_left);
      os << " ";
      smt_term(os, f->term_right);
      os << ")";
      return;
    }
    case FormulaKind::Not:
      os << "(not "; smt_formula(os, f->left); os << ")"; return;
    case FormulaKind::And:
      os << "(and "; smt_formula(os, f->left); os << " "; smt_formula(os, f->right); os << ")"; return;
    case FormulaKind::Or:
      os << "(or "; smt_formula(os, f->left); os << " "; smt_formula(os, f->right); os << ")"; return;
    case FormulaKind::Imply:
      os << "(=> "; smt_formula(os, f->left); os << " "; smt_formula(os, f->right); os << ")"; return;
    case FormulaKind::Equiv:
      os << "(= "; smt_formula(os, f->left); os << " "; smt_formula(os, f->right); os << ")"; return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      os << (f->kind == FormulaKind::Forall ? "(forall ((" : "(exists ((")
         << f->var << " Real)) ";
      smt_formula(os, f->left);
      os << ")";
      return;
    default:
      throw std::invalid_argument("modal formula cannot be encoded for the SMT solver");
  }
}

// Denominators of divisions whose variables are all free in the formula.
void collect_denominators(const TermPtr& t, const std::set<std::string>& allowed,
                          std::vector<TermPtr>& out) {
  if (!t) return;
  if (t->kind == TermKind::Div) {
    bool ok = true;
    for (const auto& v : free_vars(t->right))
      if (!allowed.count(v)) { ok = false; break; }
    if (ok) {
      bool dup = false;
      for (const auto& d : out)
        if (equal(d, t->right)) { dup = true; break; }
      if (!dup) out.push_back(t->right);
    }
  }
  collect_denominators(t->left, allowed, out);
  collect_denominators(t->right, allowed, out);
}

void collect_denominators_formula(const FormulaPtr& f, const std::set<std::string>& allowed,
                                  std::vector<TermPtr>& out) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::False: return;
    case FormulaKind::Cmp:
      collect_denominators(f->term_left, allowed, out);
      collect_denominators(f->term_right, allowed, out);
      return;
    case FormulaKind::Not:
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      collect_denominators_formula(f->left, allowed, out);
      return;
    default:
      collect_denominators_formula(f->left, allowed, out);
      collect_denominators_formula(f->right, allowed, out);
      return;
  }
}

}  // namespace

std::string formula_to_smt(const FormulaPtr& f) {
  if (!is_modality_free(f))
    throw std::invalid_argument("modal formula cannot be encoded for the SMT solver");
  std::set<std::string> fv = free_vars(f);
  std::vector<TermPtr> denominators;
  collect_denominators_formula(f, fv, denominators);

  FormulaPtr goal = f;
  if (!denominators.empty()) {
    FormulaPtr guard;
    for (const auto& d : denominators) {
      FormulaPtr ne = f_not(f_cmp(CmpOp::Eq, d, t_const(0L)));
      guard = guard ? f_and(guard, ne) : ne;
    }
    goal = f_imply(guard, f);
  }

  std::ostringstream os;
  os << "(set-logic " << (is_quantifier_free(goal) ? "QF_NRA" : "NRA") << ")\n";
  for (const auto& v : fv) os << "(declare-const " << v << " Real)\n";
  os << "(assert (not ";
  smt_formula(os, goal);
  os << "))\n(check-sat)\n(get-model)\n";
  return os.str();
}

namespace {

struct SExprReader {
  const std::string& text;
  size_t pos = 0;

  explicit SExprReader(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  // Reads one atom or parenthesized list as a token vector (flattened).
  std::string next_atom() {
    skip_ws();
    std::string out;
    while (pos < text.size() && !std::isspace((unsigned char)text[pos]) &&
           text[pos] != '(' && text[pos] != ')')
      out += text[pos++];
    return out;
  }
};

std::optional<Rational> parse_value(SExprReader& r);

std::optional<Rational> parse_list_value(SExprReader& r) {
  // at '('
  ++r.pos;
  std::string head = r.next_atom();
  if (head == "-") {
    auto v = parse_value(r);
    r.skip_ws();
    if (!v || r.pos >= r.text.size() || r.text[r.pos] != ')') return std::nullopt;
    ++r.pos;
    return -*v;
  }
  if (head == "/") {
    auto num = parse_value(r);
    auto den = parse_value(r);
    r.skip_ws();
    if (!num || !den || *den == 0 || r.pos >= r.text.size() || r.text[r.pos] != ')')
      return std::nullopt;
    ++r.pos;
    return *num / *den;
  }
  return std::nullopt;  // root-obj or other non-rational value
}

std::optional<Rational> parse_value(SExprReader& r) {
  r.skip_ws();
  if (r.pos >= r.text.size()) return std::nullopt;
  if (r.text[r.pos] == '(') return parse_list_value(r);
  std::string atom = r.next_atom();
  if (atom.empty()) return std::nullopt;
  try {
    if (atom.back() == '?') atom.pop_back();  // z3 prints approximations as "1.5?"
    return rational_from_decimal(atom);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace

std::optional<std::map<std::string, Rational>> parse_smt_model(const std::string& text) {
  std::map<std::string, Rational> model;
  size_t pos = 0;
  bool any = false;
  for (;;) {
    size_t at = text.find("define-fun", pos);
    if (at == std::string::npos) break;
    SExprReader r(text);
    r.pos = at + 10;
    std::string name = r.next_atom();
    r.skip_ws();
    // skip the () argument list
    if (r.pos + 1 < text.size() && text[r.pos] == '(' && text[r.pos + 1] == ')') r.pos += 2;
    std::string sort = r.next_atom();
    if (sort != "Real" && sort != "Int") { pos = at + 10; continue; }
    auto value = parse_value(r);
    if (!value) return std::nullopt;
    model[name] = *value;
    any = true;
    pos = r.pos;
  }
  if (!any) return std::nullopt;
  return model;
}

}  // namespace dgl
