#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace qes {

/// Exact rational scalar. gmpxx keeps results canonical (den > 0, gcd 1).
using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "p", "p/q", "-p/q" (whitespace allowed around the sign and slash).
/// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& r);

double to_double(const Rational& r);

/// num/den in canonical form. (mpq_class(num, den) does not canonicalize.)
inline Rational ratio(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational ratio(const BigInt& num, const BigInt& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

}  // namespace qes
