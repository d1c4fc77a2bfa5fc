#include "dgl/rational.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace dgl {

Rational rational_from_decimal(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty numeric literal");
  size_t dot = text.find('.');
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (i != dot) throw std::invalid_argument("malformed numeric literal: " + text);
      continue;
    }
    if (c < '0' || c > '9') throw std::invalid_argument("malformed numeric literal: " + text);
  }
  if (dot == std::string::npos) return Rational(Integer(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  if (digits.empty()) throw std::invalid_argument("malformed numeric literal: " + text);
  size_t frac_len = text.size() - dot - 1;
  Integer num(digits.empty() ? "0" : digits);
  Integer den = 1;
  for (size_t i = 0; i < frac_len; ++i) den *= 10;
  return Rational(num, den);
}

bool has_finite_decimal(const Rational& r) {
  Integer den = boost::multiprecision::denominator(r);
  if (den < 0) den = -den;
  while (den % 2 == 0) den /= 2;
  while (den % 5 == 0) den /= 5;
  return den == 1;
}

std::string rational_to_string(const Rational& r) {
  Integer num = boost::multiprecision::numerator(r);
  Integer den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  if (!has_finite_decimal(r)) return num.str() + "/" + den.str();
  // Scale the denominator up to a power of ten.
  Integer d = den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  int digits = std::max(twos, fives);
  Integer scale = 1;
  for (int i = twos; i < digits; ++i) scale *= 2;
  for (int i = fives; i < digits; ++i) scale *= 5;
  Integer scaled = num * scale;
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string s = scaled.str();
  if ((int)s.size() <= digits) s = std::string(digits + 1 - s.size(), '0') + s;
  s.insert(s.size() - digits, ".");
  return (negative ? "-" : "") + s;
}

}  // namespace dgl
