#include "vertframe/expr.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace vertframe {

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::one() {
  return {};
}

Monomial Monomial::variable(const CoordName& v, int exp) {
  if (exp < 0) throw std::domain_error("negative exponent");
  Monomial m;
  if (exp > 0) m.factors.emplace_back(v, exp);
  return m;
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& [v, e] : factors) d += e;
  return d;
}

int Monomial::exponent_of(const CoordName& v) const {
  for (const auto& [var, e] : factors)
    if (var == v) return e;
  return 0;
}

Monomial Monomial::times(const Monomial& other) const {
  Monomial out;
  out.factors.reserve(factors.size() + other.factors.size());
  auto a = factors.begin(), b = other.factors.begin();
  while (a != factors.end() || b != other.factors.end()) {
    if (b == other.factors.end() || (a != factors.end() && a->first < b->first)) {
      out.factors.push_back(*a++);
    } else if (a == factors.end() || b->first < a->first) {
      out.factors.push_back(*b++);
    } else {
      out.factors.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  return out;
}

std::optional<Monomial> Monomial::divided_by(const Monomial& other) const {
  Monomial out;
  auto a = factors.begin();
  for (const auto& [v, e] : other.factors) {
    while (a != factors.end() && a->first < v) out.factors.push_back(*a++);
    if (a == factors.end() || !(a->first == v) || a->second < e) return std::nullopt;
    if (a->second > e) out.factors.emplace_back(v, a->second - e);
    ++a;
  }
  while (a != factors.end()) out.factors.push_back(*a++);
  return out;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
  Monomial out;
  auto ia = a.factors.begin(), ib = b.factors.begin();
  while (ia != a.factors.end() && ib != b.factors.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      out.factors.emplace_back(ia->first, std::min(ia->second, ib->second));
      ++ia;
      ++ib;
    }
  }
  return out;
}

bool operator<(const Monomial& a, const Monomial& b) {
  int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  auto ia = a.factors.begin(), ib = b.factors.begin();
  while (ia != a.factors.end() || ib != b.factors.end()) {
    if (ia == a.factors.end()) return true;   // b has the earliest differing variable
    if (ib == b.factors.end()) return false;  // a does
    if (ia->first < ib->first) return false;
    if (ib->first < ia->first) return true;
    if (ia->second != ib->second) return ia->second < ib->second;
    ++ia;
    ++ib;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Poly

Poly Poly::constant(const Rational& c) {
  Poly p;
  p.add_term(Monomial::one(), c);
  return p;
}

Poly Poly::variable(const CoordName& v) {
  Poly p;
  p.add_term(Monomial::variable(v), 1);
  return p;
}

Poly Poly::term(const Monomial& m, const Rational& c) {
  Poly p;
  p.add_term(m, c);
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

const Rational& Poly::constant_value() const {
  static const Rational zero(0);
  if (terms_.empty()) return zero;
  if (!is_constant()) throw std::domain_error("polynomial is not constant");
  return terms_.begin()->second;
}

int Poly::total_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

std::pair<Monomial, Rational> Poly::leading() const {
  if (terms_.empty()) throw std::domain_error("leading term of zero polynomial");
  return *terms_.rbegin();
}

Poly Poly::operator-() const {
  Poly out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

Poly& Poly::operator+=(const Poly& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma.times(mb), ca * cb);
  return out;
}

Poly Poly::scaled(const Rational& c) const {
  Poly out;
  if (c == 0) return out;
  for (const auto& [m, coeff] : terms_) out.terms_.emplace(m, coeff * c);
  return out;
}

Poly Poly::derivative(const CoordName& v) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    int e = m.exponent_of(v);
    if (e == 0) continue;
    Monomial reduced = *m.divided_by(Monomial::variable(v));
    out.add_term(reduced, c * e);
  }
  return out;
}

Monomial Poly::monomial_content() const {
  if (terms_.empty()) return Monomial::one();
  Monomial g = terms_.begin()->first;
  for (const auto& [m, c] : terms_) {
    g = Monomial::gcd(g, m);
    if (g.is_one()) break;
  }
  return g;
}

Poly Poly::divided_by_monomial(const Monomial& m) const {
  Poly out;
  for (const auto& [mono, c] : terms_) {
    auto q = mono.divided_by(m);
    if (!q) throw std::domain_error("monomial does not divide polynomial term");
    out.terms_.emplace(*q, c);
  }
  return out;
}

std::optional<Poly> Poly::divide_exact(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw std::domain_error("division by zero polynomial");
  Poly rem = num, quot;
  const auto [dm, dc] = den.leading();
  while (!rem.is_zero()) {
    const auto [rm, rc] = rem.leading();
    auto mq = rm.divided_by(dm);
    if (!mq) return std::nullopt;
    Rational cq = rc / dc;
    quot.add_term(*mq, cq);
    rem -= den * Poly::term(*mq, cq);
  }
  return quot;
}

Rational Poly::evaluate(const std::map<CoordName, Rational>& point) const {
  Rational acc(0);
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (const auto& [v, e] : m.factors) {
      auto it = point.find(v);
      if (it == point.end())
        throw std::invalid_argument("no value supplied for " + v.str());
      for (int r = 0; r < e; ++r) t *= it->second;
    }
    acc += t;
  }
  return acc;
}

std::vector<CoordName> Poly::variables() const {
  std::set<CoordName> vars;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m.factors) vars.insert(v);
  return {vars.begin(), vars.end()};
}

// ---------------------------------------------------------------------------
// Expr

Expr::Expr(const Rational& c) : num_(Poly::constant(c)), den_(Poly::constant(1)) {}

Expr::Expr(const CoordName& v) : num_(Poly::variable(v)), den_(Poly::constant(1)) {}

Expr::Expr(Poly num, Poly den, bool) : num_(std::move(num)), den_(std::move(den)) {}

Expr Expr::from_poly(Poly p) {
  return Expr(std::move(p), Poly::constant(1), true);
}

Expr Expr::fraction(Poly num, Poly den) {
  return normalized(std::move(num), std::move(den));
}

Expr Expr::normalized(Poly num, Poly den) {
  if (den.is_zero()) throw std::domain_error("division by zero");
  if (num.is_zero()) return Expr();

  Monomial common = Monomial::gcd(num.monomial_content(), den.monomial_content());
  if (!common.is_one()) {
    num = num.divided_by_monomial(common);
    den = den.divided_by_monomial(common);
  }

  if (den.is_constant()) return from_poly(num.scaled(1 / den.constant_value()));

  if (auto q = Poly::divide_exact(num, den)) return from_poly(std::move(*q));
  if (!num.is_constant()) {
    if (auto q = Poly::divide_exact(den, num)) {
      num = Poly::constant(1);
      den = std::move(*q);
    }
  }

  Rational lc = den.leading().second;
  if (lc != 1) {
    num = num.scaled(1 / lc);
    den = den.scaled(1 / lc);
  }
  return Expr(std::move(num), std::move(den), true);
}

Rational Expr::constant_value() const {
  if (!is_constant()) throw std::domain_error("expression is not constant");
  return num_.constant_value() / den_.constant_value();
}

Expr Expr::operator-() const {
  return Expr(-num_, den_, true);
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_polynomial() && b.is_polynomial()) return Expr::from_poly(a.num_ + b.num_);
  return Expr::normalized(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_polynomial() && b.is_polynomial()) return Expr::from_poly(a.num_ - b.num_);
  return Expr::normalized(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_polynomial() && b.is_polynomial()) return Expr::from_poly(a.num_ * b.num_);
  return Expr::normalized(a.num_ * b.num_, a.den_ * b.den_);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw std::domain_error("division by zero");
  return Expr::normalized(a.num_ * b.den_, a.den_ * b.num_);
}

Expr Expr::pow(int exponent) const {
  if (exponent < 0) throw std::domain_error("negative exponent");
  Expr out(Rational(1));
  Expr base = *this;
  int e = exponent;
  while (e > 0) {
    if (e & 1) out = out * base;
    base = (e >>= 1) > 0 ? base * base : base;
  }
  return out;
}

Expr Expr::derivative(const CoordName& v) const {
  if (is_polynomial()) return from_poly(num_.derivative(v));
  return normalized(num_.derivative(v) * den_ - num_ * den_.derivative(v), den_ * den_);
}

Rational Expr::evaluate(const std::map<CoordName, Rational>& point) const {
  Rational d = den_.evaluate(point);
  if (d == 0) throw std::domain_error("evaluation hit a zero denominator");
  return num_.evaluate(point) / d;
}

Expr Expr::substitute(const std::map<CoordName, Expr>& map) const {
  auto substitute_poly = [&map](const Poly& p) {
    Expr acc;
    for (const auto& [m, c] : p.terms()) {
      Expr t((Rational(c)));
      for (const auto& [v, e] : m.factors) {
        auto it = map.find(v);
        Expr base = (it != map.end()) ? it->second : Expr(v);
        t = t * base.pow(e);
      }
      acc = acc + t;
    }
    return acc;
  };
  return substitute_poly(num_) / substitute_poly(den_);
}

std::vector<CoordName> Expr::variables() const {
  std::set<CoordName> vars;
  for (const auto& v : num_.variables()) vars.insert(v);
  for (const auto& v : den_.variables()) vars.insert(v);
  return {vars.begin(), vars.end()};
}

bool Expr::depends_on(const CoordName& v) const {
  auto vars = variables();
  return std::find(vars.begin(), vars.end(), v) != vars.end();
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.den_ == b.den_) return a.num_ == b.num_;
  return (a.num_ * b.den_ - b.num_ * a.den_).is_zero();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string monomial_to_string(const Monomial& m) {
  std::string out;
  for (size_t f = 0; f < m.factors.size(); ++f) {
    if (f) out += "*";
    out += m.factors[f].first.str();
    if (m.factors[f].second != 1) out += "^" + std::to_string(m.factors[f].second);
  }
  return out;
}

std::string poly_to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    if (first) {
      if (c < 0) out += "-";
      first = false;
    } else {
      out += (c < 0) ? " - " : " + ";
    }
    Rational a = abs(c);
    std::string vars = monomial_to_string(m);
    if (vars.empty())
      out += rational_to_string(a);
    else if (a == 1)
      out += vars;
    else
      out += rational_to_string(a) + "*" + vars;
  }
  return out;
}

}  // namespace

std::string Expr::str() const {
  if (is_polynomial()) return poly_to_string(num_);
  return "(" + poly_to_string(num_) + ")/(" + poly_to_string(den_) + ")";
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw std::invalid_argument("parse error at offset " + std::to_string(pos_) + ": " +
                                message + " in '" + text_ + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_sum() {
    Expr acc = parse_product();
    for (;;) {
      if (eat('+'))
        acc = acc + parse_product();
      else if (eat('-'))
        acc = acc - parse_product();
      else
        return acc;
    }
  }

  Expr parse_product() {
    Expr acc = parse_unary();
    for (;;) {
      if (eat('*')) {
        acc = acc * parse_unary();
      } else if (eat('/')) {
        Expr d = parse_unary();
        if (d.is_zero()) fail("division by zero");
        acc = acc / d;
      } else {
        return acc;
      }
    }
  }

  Expr parse_unary() {
    if (eat('-')) return -parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (eat('^')) {
      skip_ws();
      size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected a nonnegative integer exponent");
      if (pos_ - start > 4) fail("exponent too large");
      base = base.pow(std::stoi(text_.substr(start, pos_ - start)));
    }
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    return Expr(rational_from_string(text_.substr(start, pos_ - start)));
  }

  Expr parse_ident() {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return Expr(coord_from_ident(text_.substr(start, pos_ - start)));
  }

  CoordName coord_from_ident(const std::string& name) const {
    auto as_index = [](const std::string& s) -> int {
      if (s.empty()) return -1;
      for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
      long v = std::stol(s);
      return v >= 1 && v <= 64 ? static_cast<int>(v) : -1;
    };
    auto reserved = [&](const std::string& why) -> CoordName {
      throw std::invalid_argument("malformed coordinate name '" + name + "' (" + why + ")");
    };

    if (name == "p") return CoordName::mom_scalar();
    if (name.size() > 1 && (name[0] == 'x' || name[0] == 'y') &&
        std::isdigit(static_cast<unsigned char>(name[1]))) {
      int idx = as_index(name.substr(1));
      if (idx < 0) reserved("index must be a 1-based integer");
      return name[0] == 'x' ? CoordName::base_x(idx) : CoordName::fiber_y(idx);
    }
    if (name.rfind("piA_", 0) == 0) {
      std::string rest = name.substr(4);
      auto sep = rest.find('_');
      if (sep == std::string::npos) reserved("expected piA_<A>_<B> or piA_<A>_x<i>");
      int a = as_index(rest.substr(0, sep));
      std::string col = rest.substr(sep + 1);
      if (a < 0) reserved("fiber index must be a 1-based integer");
      if (!col.empty() && col[0] == 'x') {
        int i = as_index(col.substr(1));
        if (i < 0) reserved("base index must be a 1-based integer");
        return CoordName::frame_kn(a, i);
      }
      int b = as_index(col);
      if (b < 0) reserved("fiber index must be a 1-based integer");
      return CoordName::frame_kk(a, b);
    }
    if (name.rfind("pi_", 0) == 0) {
      std::string rest = name.substr(3);
      auto sep = rest.find('_');
      if (sep == std::string::npos) reserved("expected pi_<i>_<j>");
      int i = as_index(rest.substr(0, sep));
      int j = as_index(rest.substr(sep + 1));
      if (i < 0 || j < 0) reserved("indices must be 1-based integers");
      return CoordName::frame_nn(i, j);
    }
    if (name.rfind("p_", 0) == 0) {
      std::string rest = name.substr(2);
      auto sep = rest.find('_');
      if (sep == std::string::npos || sep + 1 >= rest.size() || rest[sep + 1] != 'A')
        reserved("expected p_<i>_A<A>");
      int i = as_index(rest.substr(0, sep));
      int a = as_index(rest.substr(sep + 2));
      if (i < 0 || a < 0) reserved("indices must be 1-based integers");
      return CoordName::mom_p(i, a);
    }
    return CoordName::parameter(name);
  }

  const std::string& text_;
  size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text) {
  return Parser(text).parse();
}

}  // namespace vertframe
