#pragma once

#include <gmpxx.h>

#include <string>

namespace fglchern {

/// Exact rational scalar. GMP keeps values canonical (lowest terms, positive
/// denominator) as long as they are built through the helpers below or ring
/// arithmetic; raw two-argument mpq_class construction does not canonicalize.
using Rational = mpq_class;

/// Builds num/den in canonical form. Throws on den == 0.
Rational rational(long num, long den = 1);

/// Parses "p" or "p/q" (optional leading '-'). Throws on malformed input.
Rational parse_rational(const std::string& text);

bool is_integer(const Rational& q);

/// Renders "p" or "p/q" with q > 1; integers never carry "/1".
std::string to_string(const Rational& q);

}  // namespace fglchern
