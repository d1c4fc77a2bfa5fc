#include "dgl/polynomial.hpp"

#include "dgl/printer.hpp"

namespace dgl {

Polynomial::Polynomial(Rational constant) {
  if (constant != 0) terms_[Monomial{}] = std::move(constant);
}

Polynomial Polynomial::variable(const std::string& name) {
  Polynomial p;
  p.terms_[Monomial{{name, 1}}] = 1;
  return p;
}

void Polynomial::add_term(Monomial m, Rational c) {
  if (c == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(std::move(m), std::move(c));
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(m, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(m, -c);
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out;
  for (const auto& [m, c] : terms_) out.terms_[m] = -c;
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out;
  for (const auto& [m1, c1] : terms_) {
    for (const auto& [m2, c2] : o.terms_) {
      Monomial m = m1;
      for (const auto& [v, e] : m2) m[v] += e;
      out.add_term(std::move(m), c1 * c2);
    }
  }
  return out;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial out{Rational(1)};
  for (unsigned i = 0; i < e; ++i) out = out * *this;
  return out;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  Polynomial out;
  if (c == 0) return out;
  for (const auto& [m, coeff] : terms_) out.terms_[m] = coeff * c;
  return out;
}

Polynomial Polynomial::partial_derivative(const std::string& var) const {
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    auto it = m.find(var);
    if (it == m.end()) continue;
    Monomial d = m;
    unsigned e = it->second;
    if (e == 1) d.erase(var);
    else d[var] = e - 1;
    out.add_term(std::move(d), c * e);
  }
  return out;
}

Rational Polynomial::evaluate(const std::map<std::string, Rational>& assignment) const {
  Rational total = 0;
  for (const auto& [m, c] : terms_) {
    Rational v = c;
    for (const auto& [name, e] : m) {
      auto it = assignment.find(name);
      if (it == assignment.end())
        throw std::invalid_argument("no value for variable " + name);
      for (unsigned i = 0; i < e; ++i) v *= it->second;
    }
    total += v;
  }
  return total;
}

unsigned Polynomial::total_degree() const {
  unsigned deg = 0;
  for (const auto& [m, c] : terms_) {
    unsigned d = 0;
    for (const auto& [v, e] : m) d += e;
    deg = std::max(deg, d);
  }
  return deg;
}

Polynomial to_polynomial(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Variable: return Polynomial::variable(t->name);
    case TermKind::Constant: return Polynomial(t->value);
    case TermKind::Add: return to_polynomial(t->left) + to_polynomial(t->right);
    case TermKind::Sub: return to_polynomial(t->left) - to_polynomial(t->right);
    case TermKind::Mul: return to_polynomial(t->left) * to_polynomial(t->right);
    case TermKind::Neg: return -to_polynomial(t->left);
    case TermKind::Power: return to_polynomial(t->left).pow(t->exponent);
    case TermKind::Div: {
      Polynomial den = to_polynomial(t->right);
      bool constant = den.terms().size() <= 1 &&
                      (den.terms().empty() || den.terms().begin()->first.empty());
      if (!constant)
        throw NonPolynomialError("non-polynomial term: division by '" +
                                 print_term(t->right) + "' which contains a variable");
      if (den.is_zero())
        throw NonPolynomialError("division by the constant zero in '" + print_term(t) + "'");
      Rational inv = Rational(1) / den.terms().begin()->second;
      return to_polynomial(t->left).scaled(inv);
    }
  }
  return Polynomial();
}

TermPtr to_term(const Polynomial& p) {
  if (p.is_zero()) return t_const(0L);
  TermPtr acc;
  for (const auto& [m, c] : p.terms()) {
    TermPtr piece;
    Rational coeff = c < 0 ? Rational(-c) : c;
    for (const auto& [v, e] : m) {
      TermPtr factor = e == 1 ? t_var(v) : t_power(t_var(v), e);
      piece = piece ? t_mul(piece, factor) : factor;
    }
    if (!piece) {
      piece = t_const(coeff);
    } else if (coeff != 1) {
      piece = t_mul(t_const(coeff), piece);
    }
    if (!acc) acc = c < 0 ? t_neg(piece) : piece;
    else acc = c < 0 ? t_sub(acc, piece) : t_add(acc, piece);
  }
  return acc;
}

}  // namespace dgl
