#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "dgl/ast.hpp"

namespace dgl {

struct NonPolynomialError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// variable -> exponent; no zero exponents stored.
using Monomial = std::map<std::string, unsigned>;

// Multivariate polynomial with exact rational coefficients in a canonical
// sorted monomial order; no zero coefficients stored.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(Rational constant);
  static Polynomial variable(const std::string& name);

  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Rational>& terms() const { return terms_; }

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial pow(unsigned e) const;
  Polynomial scaled(const Rational& c) const;

  bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }
  bool operator!=(const Polynomial& o) const { return terms_ != o.terms_; }

  Polynomial partial_derivative(const std::string& var) const;

  Rational evaluate(const std::map<std::string, Rational>& assignment) const;

  unsigned total_degree() const;

  void add_term(Monomial m, Rational c);

 private:
  std::map<Monomial, Rational> terms_;
};

// Canonical expanded form; constant denominators are folded into coefficients,
// division by anything containing a variable is rejected.
Polynomial to_polynomial(const TermPtr& t);

// Canonical term rendering of a polynomial (sorted monomial order).
TermPtr to_term(const Polynomial& p);

}  // namespace dgl
