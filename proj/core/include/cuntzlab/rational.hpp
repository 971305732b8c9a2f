#pragma once

#include <gmpxx.h>

#include <string>

namespace cuntzlab {

// All invariant bookkeeping (trace weights, rc bounds, stage products,
// measure masses) runs in exact rational arithmetic.  GMP supplies the
// arbitrary-precision integers; these helpers pin down the one textual
// format used across JSON, CSV and CLI output.

using BigInt = mpz_class;
using Rational = mpq_class;

/// Canonical rational from an integer pair; normalises sign and gcd.
Rational make_rational(const BigInt& num, const BigInt& den);
Rational make_rational(long num, long den = 1);

/// Parses "p/q", "p", or a decimal integer string.  Throws ValidationError.
Rational rational_from_string(const std::string& text);

/// Serialises canonically: "p/q", or just "p" when the denominator is 1.
std::string rational_to_string(const Rational& value);

std::string bigint_to_string(const BigInt& value);
BigInt bigint_from_string(const std::string& text);

double to_double(const Rational& value);

} // namespace cuntzlab
