#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace astprove {

// Exact arithmetic everywhere a verdict depends on a comparison; arbitrary
// precision floats only for transcendental tail-bound evaluation.
using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;
using BigFloat = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>>;

// Working decimal precision for BigFloat operations. `digits` is the number of
// significant digits requested by the caller (default 30); a guard margin is
// added on top so directed rounding at output stays sound.
void set_float_digits(unsigned digits);
unsigned float_digits();

// The default BigFloat precision is per-thread; worker threads entering a
// region that does BigFloat arithmetic must call this first so every thread
// computes at the same (correctly rounded) precision.
void apply_float_precision();

// Parses "num", "-num", or "num/den" with an optional sign. Throws
// std::invalid_argument on malformed input or zero denominator.
Rat parse_rat(const std::string& s);

// Renders as "num" or "num/den" in lowest terms (mpq keeps it canonical).
std::string rat_to_string(const Rat& q);

// Floor of sqrt for v >= 0; 0 for v < 0 (updates must be total on all of Z).
long long isqrt_floor(long long v);

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

BigFloat to_bigfloat(const Rat& q);

// Smallest 15-significant-digit decimal that is >= v (v > 0). Rounding the
// published bound upward keeps "bound >= truth" intact after formatting.
BigFloat round_up_15(const BigFloat& v);

// Decimal string of v with `digits` significant digits.
std::string bigfloat_str(const BigFloat& v, unsigned digits = 15);

} // namespace astprove
