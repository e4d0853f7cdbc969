#pragma once

#include <gmpxx.h>

#include <random>
#include <string>

namespace vertframe {

// Exact arbitrary-precision rational scalar used by every symbolic layer.
using Rational = mpq_class;

// Parses "p", "p/q" or a decimal literal ("1.5" -> 3/2). Throws
// std::invalid_argument on malformed input or zero denominator.
Rational rational_from_string(const std::string& text);

// Canonical "p" / "p/q" spelling (no spaces, lowest terms, q > 0).
std::string rational_to_string(const Rational& r);

double rational_to_double(const Rational& r);

// Uniform numerator in [-max_num, max_num], denominator in [1, max_den].
Rational random_small_rational(std::mt19937_64& rng, long max_num, long max_den);

// Same distribution but never zero; used where a guard (determinant,
// denominator) must stay away from the origin.
Rational random_small_rational_nonzero(std::mt19937_64& rng, long max_num, long max_den);

}  // namespace vertframe
