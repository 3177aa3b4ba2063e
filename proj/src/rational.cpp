#include "astprove/rational.hpp"

#include <cmath>

namespace astprove {

namespace {
unsigned g_digits = 30;

void apply_digits() {
  // +25 guard digits so that the 15-digit directed rounding in round_up_15
  // cannot be defeated by accumulated representation error.
  BigFloat::default_precision(g_digits + 25);
}

struct PrecisionInit {
  PrecisionInit() { apply_digits(); }
} g_precision_init;
} // namespace

void set_float_digits(unsigned digits) {
  if (digits < 10) digits = 10;
  g_digits = digits;
  apply_digits();
}

void apply_float_precision() { apply_digits(); }

unsigned float_digits() { return g_digits; }

Rat parse_rat(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return Rat(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational literal '" + s + "'");
  }
}

std::string rat_to_string(const Rat& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

long long isqrt_floor(long long v) {
  if (v <= 0) return 0;
  auto r = static_cast<long long>(std::sqrt(static_cast<double>(v)));
  while (r > 0 && r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

BigFloat to_bigfloat(const Rat& q) {
  return BigFloat(numerator(q)) / BigFloat(denominator(q));
}

BigFloat round_up_15(const BigFloat& v) {
  if (v <= 0) return v;
  long e = static_cast<long>(floor(log10(v)));
  // Scale so the 15 significant digits sit left of the decimal point.
  BigFloat scale = pow(BigFloat(10), 14 - e);
  BigFloat r = ceil(v * scale) / scale;
  if (r < v) r += 1 / scale; // paranoia against a downward-rounded product
  return r;
}

std::string bigfloat_str(const BigFloat& v, unsigned digits) {
  return v.str(digits);
}

} // namespace astprove
