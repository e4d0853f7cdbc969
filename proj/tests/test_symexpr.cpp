#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "vertframe/coord.hpp"
#include "vertframe/expr.hpp"
#include "vertframe/rational.hpp"

using namespace vertframe;

namespace {

const CoordName X1 = CoordName::base_x(1);
const CoordName Y1 = CoordName::fiber_y(1);
const CoordName PA = CoordName::parameter("a");
const CoordName PB = CoordName::parameter("b");

Expr var(const CoordName& c) { return Expr(c); }

// Small random expression over {x1, y1, a, b}; division kept safe by retry.
Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 1);
  switch (pick(rng)) {
    case 0: {
      return Expr(random_small_rational(rng, 5, 4));
    }
    case 1: {
      std::uniform_int_distribution<int> v(0, 3);
      const CoordName names[] = {X1, Y1, PA, PB};
      return var(names[v(rng)]);
    }
    case 2:
      return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 3:
      return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 4:
      return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    default: {
      Expr d = random_expr(rng, depth - 1);
      if (d.is_zero()) d = var(X1) + Expr(1);
      return random_expr(rng, depth - 1) / d;
    }
  }
}

std::map<CoordName, Rational> random_point(std::mt19937_64& rng) {
  std::map<CoordName, Rational> pt;
  for (const CoordName& c : {X1, Y1, PA, PB}) pt[c] = random_small_rational_nonzero(rng, 7, 5);
  return pt;
}

// Evaluate with retry on denominator zeros so property checks never abort.
Rational eval_somewhere(const Expr& e, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      return e.evaluate(random_point(rng));
    } catch (const std::domain_error&) {
    }
  }
  throw std::runtime_error("could not find a regular evaluation point");
}

}  // namespace

TEST_CASE("rational literals") {
  CHECK(rational_from_string("3") == Rational(3));
  CHECK(rational_from_string("-7/2") == Rational(-7, 2));
  CHECK(rational_from_string("1.5") == Rational(3, 2));
  CHECK(rational_from_string("0.25") == Rational(1, 4));
  CHECK(rational_from_string("-2.") == Rational(-2));
  CHECK(rational_to_string(Rational(-7, 2)) == "-7/2");
  CHECK(rational_to_string(Rational(4)) == "4");
  CHECK(rational_to_double(Rational(1, 4)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(rational_from_string("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(rational_from_string("abc"), std::invalid_argument);
  CHECK_THROWS_AS(rational_from_string(""), std::invalid_argument);
}

TEST_CASE("coordinate spellings and chart layout") {
  CHECK(CoordName::base_x(2).str() == "x2");
  CHECK(CoordName::fiber_y(1).str() == "y1");
  CHECK(CoordName::frame_nn(1, 2).str() == "pi_1_2");
  CHECK(CoordName::frame_kk(2, 1).str() == "piA_2_1");
  CHECK(CoordName::frame_kn(1, 2).str() == "piA_1_x2");
  CHECK(CoordName::mom_p(1, 2).str() == "p_1_A2");
  CHECK(CoordName::mom_scalar().str() == "p");
  CHECK_THROWS_AS(CoordName::base_x(0), std::invalid_argument);
  CHECK_THROWS_AS(CoordName::frame_nn(1, 0), std::invalid_argument);

  Chart ch = make_chart(2, 2);
  CHECK(ch.base.dim() == 4);
  CHECK(ch.z.dim() == 9);
  CHECK(ch.lvy.dim() == 16);
  CHECK(ch.z.index_of(CoordName::mom_scalar()) == 8);
  CHECK(ch.z.index_of(CoordName::frame_nn(1, 1)) == -1);
  CHECK(ch.lvy.require(CoordName::frame_kn(2, 1)) >= 0);
  CHECK_THROWS_AS(ch.base.require(CoordName::mom_scalar()), std::out_of_range);
}

TEST_CASE("monomial order is graded lex and multiplicative") {
  Monomial x = Monomial::variable(X1);
  Monomial y = Monomial::variable(Y1);
  Monomial x2 = Monomial::variable(X1, 2);
  Monomial xy = x.times(y);
  CHECK(y < x);            // earlier coordinate wins at equal degree
  CHECK(x < x2);           // degree dominates
  CHECK(xy < x2);          // equal degree, lex on first coordinate
  CHECK(y.times(y) < xy);  // equal degree again
  CHECK(!(x < x));
  // multiplicative: a<b implies a*m < b*m
  CHECK(xy.times(y) < x2.times(y));
  CHECK(Monomial::gcd(x2.times(y), xy) == xy);
  CHECK(x2.divided_by(x) == x);
  CHECK(!x.divided_by(x2).has_value());
}

TEST_CASE("polynomial exact division oracle") {
  Expr x = var(X1), y = var(Y1);
  Expr num = x.pow(3) - y.pow(3);
  Expr den = x - y;
  Expr expect = x * x + x * y + y * y;
  auto q = Poly::divide_exact(num.num(), den.num());
  REQUIRE(q.has_value());
  CHECK(Expr::from_poly(*q) == expect);
  CHECK(!Poly::divide_exact((x * y + Expr(1)).num(), (x + y).num()).has_value());
}

TEST_CASE("normalization cancels exact factors") {
  Expr x = var(X1);
  Expr e = (x * x - Expr(1)) / (x - Expr(1));
  CHECK(e.is_polynomial());
  CHECK(e == x + Expr(1));
  CHECK(e.str() == "x1 + 1");

  // reversed divisibility collapses to a reciprocal
  Expr r = (Expr(2) * x - Expr(2)) / (x * x - Expr(1));
  CHECK(!r.is_polynomial());
  CHECK(r.str() == "(2)/(x1 + 1)");

  // common monomial content
  Expr y = var(Y1);
  Expr c = (x * x * y + x * y * y) / (x * y);
  CHECK(c == x + y);

  // non-factorable quotients stay put but the denominator is monic
  Expr f = Expr(1) / (Expr(2) * x + Expr(2) * y + Expr(2));
  CHECK(f.den().leading().second == Rational(1));
  CHECK(f.str() == "(1/2)/(x1 + y1 + 1)");
}

TEST_CASE("zero has a unique representation") {
  Expr x = var(X1), y = var(Y1);
  Expr z = (x + y) * (x - y) - (x * x - y * y);
  CHECK(z.is_zero());
  CHECK(z.str() == "0");
  Expr q = (x.pow(2) - Expr(1)) / (x + Expr(1)) - (x - Expr(1));
  CHECK(q.is_zero());
}

TEST_CASE("field identities at random expressions") {
  std::mt19937_64 rng(20260814u);
  for (int trial = 0; trial < 40; ++trial) {
    Expr a = random_expr(rng, 2);
    Expr b = random_expr(rng, 2);
    Expr c = random_expr(rng, 2);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + b == b + a);
    CHECK(a - a == Expr());
    if (!b.is_zero()) {
      CHECK((a / b) * b == a);
      CHECK((a / b) * (b / (b * b)) == a / (b * b));
    }
  }
}

TEST_CASE("reciprocal product collapses to one") {
  std::mt19937_64 rng(7u);
  for (int trial = 0; trial < 20; ++trial) {
    Expr a = random_expr(rng, 2);
    Expr b = random_expr(rng, 2);
    if (a.is_zero() || b.is_zero()) continue;
    Expr p = (a / b) * (b / a);
    CHECK(p == Expr(1));
    CHECK(p.str() == "1");
  }
}

TEST_CASE("evaluation agrees with structural identities at random points") {
  std::mt19937_64 rng(99u);
  Expr x = var(X1), y = var(Y1), a = var(PA);
  Expr lhs = (x + y + a).pow(2);
  Expr rhs = x * x + y * y + a * a + Expr(2) * (x * y + x * a + y * a);
  CHECK(lhs == rhs);
  for (int trial = 0; trial < 100; ++trial) {
    auto pt = random_point(rng);
    CHECK(lhs.evaluate(pt) == rhs.evaluate(pt));
    CHECK((lhs - rhs).evaluate(pt) == Rational(0));
  }
}

TEST_CASE("derivative rules") {
  Expr x = var(X1), y = var(Y1);
  CHECK((x.pow(3)).derivative(X1) == Expr(3) * x * x);
  CHECK((x * y).derivative(Y1) == x);
  Expr inv = Expr(1) / x;
  CHECK(inv.derivative(X1) == -(Expr(1) / (x * x)));

  // quotient rule against the product it came from
  std::mt19937_64 rng(5u);
  for (int trial = 0; trial < 15; ++trial) {
    Expr f = random_expr(rng, 2);
    Expr g = random_expr(rng, 2);
    CHECK((f * g).derivative(X1) == f.derivative(X1) * g + f * g.derivative(X1));
    CHECK(f.derivative(X1).derivative(Y1) == f.derivative(Y1).derivative(X1));
  }
}

TEST_CASE("derivative matches a finite difference") {
  Expr x = var(X1);
  Expr f = Expr(1) / x;
  Rational two(2);
  double exact = rational_to_double(f.derivative(X1).evaluate({{X1, two}}));
  double h = 1e-4;
  auto at = [&](double v) {
    // evaluate 1/x1 numerically without rational rounding
    return 1.0 / v;
  };
  double fd = (at(2 + h) - at(2 - h)) / (2 * h);
  CHECK(std::abs(exact - fd) < 1e-8);
  CHECK(exact == doctest::Approx(-0.25));
}

TEST_CASE("substitution composes") {
  Expr x = var(X1), y = var(Y1), a = var(PA), b = var(PB);
  Expr e = x * x + y;
  Expr s = e.substitute({{X1, a + b}});
  CHECK(s == (a + b).pow(2) + y);

  // substitution into a quotient
  Expr q = (x + Expr(1)) / (x - Expr(1));
  Expr sq = q.substitute({{X1, y * y}});
  CHECK(sq == (y * y + Expr(1)) / (y * y - Expr(1)));

  // chained substitution equals substitution of the composition
  Expr once = e.substitute({{X1, a}}).substitute({{PA, b + Expr(1)}});
  Expr direct = e.substitute({{X1, b + Expr(1)}});
  CHECK(once == direct);
}

TEST_CASE("printer output reparses to the same value") {
  std::mt19937_64 rng(31337u);
  for (int trial = 0; trial < 60; ++trial) {
    Expr e = random_expr(rng, 3);
    Expr back = parse_expr(e.str());
    CHECK(back == e);
    CHECK(back.str() == e.str());  // canonical print is a fixed point
  }
  // spellings for every coordinate family survive the trip
  Expr mixed = var(CoordName::frame_nn(1, 2)) * var(CoordName::frame_kk(2, 1)) +
               var(CoordName::frame_kn(1, 2)) * var(CoordName::mom_p(2, 1)) -
               var(CoordName::mom_scalar()) * var(CoordName::parameter("lam"));
  CHECK(parse_expr(mixed.str()) == mixed);
}

TEST_CASE("parser handles grammar and rejects malformed input") {
  CHECK(parse_expr("x1 + 2*y1^2") == var(X1) + Expr(2) * var(Y1).pow(2));
  CHECK(parse_expr("-x1^2") == -(var(X1).pow(2)));
  CHECK(parse_expr("3/4") == Expr(Rational(3, 4)));
  CHECK(parse_expr("1.25*x1") == Expr(Rational(5, 4)) * var(X1));
  CHECK(parse_expr("(x1+1)/(x1-1)") == (var(X1) + Expr(1)) / (var(X1) - Expr(1)));
  CHECK(parse_expr("2 - - 3") == Expr(5));
  CHECK(parse_expr("pi_2_1 * piA_1_x1") ==
        var(CoordName::frame_nn(2, 1)) * var(CoordName::frame_kn(1, 1)));
  CHECK(parse_expr("p_1_A1 + p") == var(CoordName::mom_p(1, 1)) + var(CoordName::mom_scalar()));
  CHECK(parse_expr("t") == var(CoordName::parameter("t")));

  CHECK_THROWS_AS(parse_expr("x0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expr("y0 + 1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expr("pi_1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expr("piA_0_1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expr("p_1_B2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expr("(x1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expr("x1 +"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expr("x1^-2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expr("x1^1.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expr("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expr(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_expr("x1 x1"), std::invalid_argument);
}

TEST_CASE("division by a zero expression throws") {
  Expr x = var(X1);
  CHECK_THROWS_AS(x / Expr(), std::domain_error);
  CHECK_THROWS_AS(Expr::fraction(Poly::constant(1), Poly()), std::domain_error);
  CHECK_THROWS_AS(x.pow(-1), std::domain_error);
  Expr inv = Expr(1) / x;
  CHECK_THROWS_AS(inv.evaluate({{X1, Rational(0)}}), std::domain_error);
}

TEST_CASE("random-point zero oracle for normalization") {
  // If normalization says two expressions are equal, numeric evaluation must
  // agree everywhere; conversely a nonzero normal form must be nonzero
  // somewhere reachable.
  std::mt19937_64 rng(424242u);
  for (int trial = 0; trial < 30; ++trial) {
    Expr a = random_expr(rng, 3);
    Expr b = random_expr(rng, 3);
    Expr diff = a - b;
    if (diff.is_zero()) {
      for (int probe = 0; probe < 5; ++probe) CHECK(eval_somewhere(diff, rng) == Rational(0));
    } else {
      bool somewhere_nonzero = false;
      for (int probe = 0; probe < 40 && !somewhere_nonzero; ++probe)
        somewhere_nonzero = eval_somewhere(diff, rng) != Rational(0);
      CHECK(somewhere_nonzero);
    }
  }
}
