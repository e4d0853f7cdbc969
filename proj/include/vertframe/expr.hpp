#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vertframe/coord.hpp"
#include "vertframe/rational.hpp"

namespace vertframe {

// Sparse exponent vector; factors sorted by CoordName, exponents >= 1.
struct Monomial {
  std::vector<std::pair<CoordName, int>> factors;

  static Monomial one();
  static Monomial variable(const CoordName& v, int exp = 1);

  bool is_one() const { return factors.empty(); }
  int degree() const;
  int exponent_of(const CoordName& v) const;

  Monomial times(const Monomial& other) const;
  // Componentwise quotient; nullopt when any exponent would go negative.
  std::optional<Monomial> divided_by(const Monomial& other) const;
  static Monomial gcd(const Monomial& a, const Monomial& b);

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

// Graded lexicographic order (total degree, then lex with earlier coordinate
// and higher exponent winning). Multiplicative, so leading-term division is
// well founded.
bool operator<(const Monomial& a, const Monomial& b);

// Expanded multivariate polynomial with exact rational coefficients.
class Poly {
 public:
  Poly() = default;
  static Poly constant(const Rational& c);
  static Poly variable(const CoordName& v);
  static Poly term(const Monomial& m, const Rational& c);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  const Rational& constant_value() const;  // requires is_constant()
  int total_degree() const;
  const std::map<Monomial, Rational>& terms() const { return terms_; }

  void add_term(const Monomial& m, const Rational& c);
  std::pair<Monomial, Rational> leading() const;  // largest monomial; requires !is_zero()

  Poly operator-() const;
  Poly& operator+=(const Poly& other);
  Poly& operator-=(const Poly& other);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const Rational& c) const;

  Poly derivative(const CoordName& v) const;
  // Largest monomial dividing every term; Monomial::one() for zero input.
  Monomial monomial_content() const;
  Poly divided_by_monomial(const Monomial& m) const;

  // Leading-term reduction; nullopt unless the division is exact.
  static std::optional<Poly> divide_exact(const Poly& num, const Poly& den);

  Rational evaluate(const std::map<CoordName, Rational>& point) const;
  std::vector<CoordName> variables() const;

  friend bool operator==(const Poly&, const Poly&) = default;

 private:
  std::map<Monomial, Rational> terms_;  // zero coefficients never stored
};

// Immutable rational function in canonical form: numerator and denominator
// expanded, no common monomial factor, denominator monic under the fixed
// monomial order, exact quotients reduced, zero represented uniquely as 0/1.
class Expr {
 public:
  Expr() : num_(), den_(Poly::constant(1)) {}  // zero
  explicit Expr(const Rational& c);
  explicit Expr(long value) : Expr(Rational(value)) {}
  explicit Expr(const CoordName& v);
  static Expr from_poly(Poly p);
  static Expr fraction(Poly num, Poly den);  // normalizes; throws on zero denominator

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const;  // requires is_constant()

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);  // throws on zero divisor
  Expr& operator+=(const Expr& b) { return *this = *this + b; }
  Expr& operator-=(const Expr& b) { return *this = *this - b; }
  Expr& operator*=(const Expr& b) { return *this = *this * b; }
  Expr& operator/=(const Expr& b) { return *this = *this / b; }
  Expr pow(int exponent) const;  // exponent >= 0

  Expr derivative(const CoordName& v) const;
  Rational evaluate(const std::map<CoordName, Rational>& point) const;
  Expr substitute(const std::map<CoordName, Expr>& map) const;  // unmapped vars unchanged
  std::vector<CoordName> variables() const;
  bool depends_on(const CoordName& v) const;

  // Exact value equality (cross-multiplied difference normalizes to zero).
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  std::string str() const;

 private:
  Expr(Poly num, Poly den, bool already_canonical);
  static Expr normalized(Poly num, Poly den);

  Poly num_, den_;
};

// Recursive-descent parser for the expression grammar: rational/decimal
// literals, coordinate spellings (x1, y2, pi_1_2, piA_1_2, piA_1_x2, p_1_A2,
// p), free parameter identifiers, + - * / ^ and parentheses. Throws
// std::invalid_argument with position information on malformed input.
Expr parse_expr(const std::string& text);

}  // namespace vertframe
