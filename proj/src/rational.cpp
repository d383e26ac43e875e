#include "opscale/rational.hpp"

#include <cctype>
#include <cstdlib>

#include "opscale/errors.hpp"

namespace opscale {

Rational parse_rational(std::string_view text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto fail = [&](const char* msg, std::size_t pos) -> Rational {
    throw ParseError(std::string(msg) + " in rational literal \"" +
                         std::string(text) + "\"",
                     pos);
  };

  if (n == 0) return fail("empty string", 0);
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  std::size_t num_begin = i;
  while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i == num_begin) return fail("expected digits", i);
  // GMP's string constructor rejects a leading '+', so the sign is applied
  // separately.
  std::string num(text.substr(num_begin, i - num_begin));

  std::string den = "1";
  if (i < n) {
    if (text[i] != '/') return fail("unexpected character", i);
    ++i;
    std::size_t den_begin = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == den_begin) return fail("expected denominator digits", i);
    if (i != n) return fail("unexpected trailing characters", i);
    den.assign(text.substr(den_begin, n - den_begin));
  }

  Integer num_z(num, 10);
  if (negative) num_z = -num_z;
  Integer den_z(den, 10);
  if (den_z == 0) return fail("zero denominator", n - 1);
  Rational q(num_z, den_z);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string decimal_string(const Rational& q, int digits) {
  if (digits < 0) digits = 0;
  Integer num = q.get_num();
  Integer den = q.get_den();
  std::string out;
  if (num < 0) {
    out += '-';
    num = -num;
  }
  Integer ip = num / den;
  Integer rem = num - ip * den;
  out += ip.get_str();
  if (digits == 0) return out;
  out += '.';
  for (int k = 0; k < digits; ++k) {
    rem *= 10;
    Integer d = rem / den;
    rem -= d * den;
    out += static_cast<char>('0' + d.get_si());
  }
  return out;
}

Rational truncate_toward_zero(const Rational& q, unsigned bits) {
  if (q == 0) return Rational(0);
  Integer scaled_num = q.get_num();
  bool negative = scaled_num < 0;
  if (negative) scaled_num = -scaled_num;
  scaled_num <<= bits;
  Integer floor_part = scaled_num / q.get_den();
  Integer denom(1);
  denom <<= bits;
  Rational out(negative ? Integer(-floor_part) : floor_part, denom);
  out.canonicalize();
  return out;
}

Rational pow_rational(const Rational& base, long exponent) {
  if (exponent == 0) return Rational(1);
  bool invert = exponent < 0;
  unsigned long e = invert ? static_cast<unsigned long>(-exponent)
                           : static_cast<unsigned long>(exponent);
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), e);
  if (invert) {
    if (num == 0) throw Error("pow_rational: negative power of zero");
    std::swap(num, den);
  }
  Rational out(num, den);
  out.canonicalize();
  return out;
}

double to_double(const Rational& q) { return q.get_d(); }

Rational from_double(double x) {
  Rational q;
  mpq_set_d(q.get_mpq_t(), x);
  q.canonicalize();
  return q;
}

std::size_t bit_size(const Rational& q) {
  std::size_t nb = mpz_sizeinbase(q.get_num().get_mpz_t(), 2);
  std::size_t db = mpz_sizeinbase(q.get_den().get_mpz_t(), 2);
  return nb > db ? nb : db;
}

Rational sqrt_upper_bound(const Rational& x) {
  if (x < 0) throw Error("sqrt_upper_bound: negative argument");
  if (x == 0) return Rational(0);
  // (x+1)/2 >= sqrt(x) by AM-GM; Newton from above preserves the bound.
  Rational s = (x + 1) / 2;
  for (int k = 0; k < 8; ++k) {
    s = (s + x / s) / 2;
    // Snap to 96 fractional bits, rounding up, so iterate sizes stay bounded.
    Rational snapped = truncate_toward_zero(s, 96);
    if (snapped < s) snapped += Rational(Integer(1), Integer(1) << 96);
    s = snapped;
  }
  return s;
}

}  // namespace opscale
