#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace opscale {

// Exact arithmetic substrate. mpq_class keeps values in lowest terms with a
// positive denominator once canonicalized, which is exactly the invariant the
// rest of the library relies on. All construction paths below canonicalize.
using Rational = mpq_class;
using Integer = mpz_class;

// Accepts the external text format: optional sign, digits, optional
// "/<positive digits>". Throws ParseError on anything else (including a zero
// denominator).
Rational parse_rational(std::string_view text);

// Canonical text form, "p" or "p/q" with q > 1.
std::string to_string(const Rational& q);

// Fixed-point decimal rendering with `digits` places after the point.
// Deterministic; used for trace export where consumers expect plain decimals.
std::string decimal_string(const Rational& q, int digits = 18);

// Round toward zero onto the dyadic grid with 2^-bits spacing:
// sign(x) * floor(|x| * 2^bits) / 2^bits.
Rational truncate_toward_zero(const Rational& q, unsigned bits);

Rational pow_rational(const Rational& base, long exponent);

double to_double(const Rational& q);

// Exact: every finite double is a dyadic rational.
Rational from_double(double x);

// max(bits(numerator), bits(denominator)); cheap blow-up guard.
std::size_t bit_size(const Rational& q);

// A rational u with u >= sqrt(x) and u - sqrt(x) <= 2^-96, for x >= 0.
// Newton from above keeps every iterate an upper bound; the result is snapped
// to a bounded-size dyadic so callers can use it in certified inequalities.
Rational sqrt_upper_bound(const Rational& x);

}  // namespace opscale
