#include "vertframe/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace vertframe {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational rational_from_string(const std::string& text) {
  std::string s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    negative = (s[0] == '-');
    s.erase(0, 1);
  }
  if (s.empty()) throw std::invalid_argument("empty rational literal: '" + text + "'");

  Rational value;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw std::invalid_argument("malformed rational literal: '" + text + "'");
    mpz_class d(den);
    if (d == 0) throw std::invalid_argument("zero denominator in literal: '" + text + "'");
    value = Rational(mpz_class(num), d);
  } else if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || (!frac.empty() && !all_digits(frac)))
      throw std::invalid_argument("malformed decimal literal: '" + text + "'");
    mpz_class scale = 1;
    for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
    value = Rational(mpz_class(whole) * scale + mpz_class(frac.empty() ? "0" : frac), scale);
  } else {
    if (!all_digits(s)) throw std::invalid_argument("malformed integer literal: '" + text + "'");
    value = Rational(mpz_class(s));
  }
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

std::string rational_to_string(const Rational& r) {
  return r.get_str();
}

double rational_to_double(const Rational& r) {
  return r.get_d();
}

Rational random_small_rational(std::mt19937_64& rng, long max_num, long max_den) {
  std::uniform_int_distribution<long> num(-max_num, max_num);
  std::uniform_int_distribution<long> den(1, max_den);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

Rational random_small_rational_nonzero(std::mt19937_64& rng, long max_num, long max_den) {
  for (;;) {
    Rational r = random_small_rational(rng, max_num, max_den);
    if (r != 0) return r;
  }
}

}  // namespace vertframe
