#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <string_view>

namespace mixext {

using Rational = mpq_class;

/// Numeric mode of a game: exact rationals or 64-bit floats.
enum class NumericMode { kFloat, kRational };

// Uniform scalar helpers so templated code reads the same for double and
// Rational.
inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.get_d(); }

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Rational& x) { return sgn(x) == 0; }

inline double abs_value(double x) { return std::fabs(x); }
inline Rational abs_value(const Rational& x) { return abs(x); }

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Rational&) { return true; }

/// Parses `p/q`, integers and decimals (with optional exponent) exactly.
/// Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// Parses the same grammar as parse_rational into the nearest double;
/// decimals go through from_chars so that shortest-form output round-trips.
double parse_double(std::string_view text);

template <class Scalar>
Scalar parse_scalar(std::string_view text);

template <>
inline double parse_scalar<double>(std::string_view text) {
  return parse_double(text);
}
template <>
inline Rational parse_scalar<Rational>(std::string_view text) {
  return parse_rational(text);
}

/// Shortest decimal representation that reads back bit-exactly.
std::string format_scalar(double x);
/// `p/q`, or `p` for integers.
std::string format_scalar(const Rational& x);

}  // namespace mixext
