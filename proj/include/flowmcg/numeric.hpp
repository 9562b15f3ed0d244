#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace flowmcg {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline Integer gcd(const Integer& a, const Integer& b) {
  return boost::multiprecision::gcd(a, b);
}

inline Integer lcm(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::abs(a / gcd(a, b) * b);
}

inline Integer abs(const Integer& a) { return a < 0 ? Integer(-a) : a; }
inline Rational abs(const Rational& a) { return a < 0 ? Rational(-a) : a; }

inline int sign(const Integer& a) { return a < 0 ? -1 : (a > 0 ? 1 : 0); }
inline int sign(const Rational& a) { return a < 0 ? -1 : (a > 0 ? 1 : 0); }

/// Floor division for arbitrary-precision integers.
inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Integer floor(const Rational& q) { return floor_div(numerator(q), denominator(q)); }

inline Integer ipow(Integer base, unsigned exp) {
  Integer r = 1;
  while (exp) {
    if (exp & 1u) r *= base;
    base *= base;
    exp >>= 1u;
  }
  return r;
}

inline Rational rpow(const Rational& base, int exp) {
  Rational r = 1;
  Rational b = exp < 0 ? Rational(1 / base) : base;
  for (int e = exp < 0 ? -exp : exp; e > 0; --e) r *= b;
  return r;
}

/// "p/q" or "p".
inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

inline std::string to_string(const Integer& z) { return z.str(); }

/// Decimal rendering of a rational with `digits` fractional digits (truncated toward zero).
inline std::string to_decimal(const Rational& q, int digits) {
  Integer num = numerator(q);
  Integer den = denominator(q);
  std::string out;
  if (num < 0) {
    out += "-";
    num = -num;
  }
  Integer whole = num / den;
  Integer rem = num % den;
  out += whole.str();
  if (digits > 0) {
    out += ".";
    for (int i = 0; i < digits; ++i) {
      rem *= 10;
      out += static_cast<char>('0' + static_cast<int>(rem / den));
      rem %= den;
    }
  }
  return out;
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace flowmcg
