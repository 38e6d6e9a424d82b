#include "toeplab/rational.hpp"

#include "toeplab/errors.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace toeplab {

namespace {

Integer pow10(long e) {
  Integer p = 1;
  for (long i = 0; i < e; ++i) p *= 10;
  return p;
}

Integer parse_integer(std::string_view digits, std::string_view full) {
  if (digits.empty()) throw ValidationError("parse_rational: empty number in '" + std::string(full) + "'");
  Integer v = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ValidationError("parse_rational: bad character in '" + std::string(full) + "'");
    v = v * 10 + (c - '0');
  }
  return v;
}

Rational parse_decimal(std::string_view s, std::string_view full) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    exponent = parse_integer(exp_part, full).convert_to<long>();
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
    exponent -= static_cast<long>(s.size() - dot - 1);
  } else {
    digits = std::string(s);
  }
  Rational value = parse_integer(digits, full);
  if (exponent >= 0)
    value *= pow10(exponent);
  else
    value /= pow10(-exponent);
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw ValidationError("rational_from_double: non-finite value");
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational r = Integer(scaled);
  Integer two_power = Integer(1) << std::abs(exponent);
  if (exponent >= 0)
    r *= two_power;
  else
    r /= two_power;
  return r;
}

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(text.substr(0, slash), text);
    Rational den = parse_decimal(text.substr(slash + 1), text);
    if (den == 0) throw ValidationError("parse_rational: zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return parse_decimal(text, text);
}

std::string to_string(const Rational& r) {
  const Integer num = numerator(r);
  const Integer den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Integer lcm_of_denominators(const RationalVector& v) {
  Integer l = 1;
  for (const auto& r : v) l = boost::multiprecision::lcm(l, denominator(r));
  return l;
}

std::int64_t floor_to_int64(const Rational& r) {
  Integer q = numerator(r) / denominator(r);  // truncates toward zero
  if (r < 0 && q * denominator(r) != numerator(r)) q -= 1;
  if (q > std::numeric_limits<std::int64_t>::max() || q < std::numeric_limits<std::int64_t>::min())
    throw OverflowError("floor_to_int64: value out of 64-bit range");
  return q.convert_to<std::int64_t>();
}

}  // namespace toeplab
