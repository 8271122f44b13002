#pragma once

#include <gmpxx.h>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polysmooth {

using Rational = mpq_class;

/// A point of R^p with exact coordinates.
using Point = std::vector<Rational>;

/// Parses "7", "-3/4", "0.125", "1e-3", "2.5E2". Decimal strings convert
/// exactly. Throws Error(ParseError).
Rational parse_rational(std::string_view text);

/// Exact conversion of a finite double.
Rational from_double(double value);

std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

/// r with r >= 0, r*r <= x and r close to sqrt(x); exact when x is a square
/// of a rational, otherwise a double within a few ulps.
Rational sqrt_lower(const Rational& x);
/// r with r*r >= x and r close to sqrt(x).
Rational sqrt_upper(const Rational& x);

Rational pow2(int exponent);

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

// Small exact vector helpers.
Point operator-(const Point& a, const Point& b);
Point operator+(const Point& a, const Point& b);
Point operator*(const Rational& s, const Point& a);
Rational dot(const Point& a, const Point& b);
Rational squared_norm(const Point& a);
Rational squared_distance(const Point& a, const Point& b);

std::vector<double> to_doubles(const Point& p);
Point from_doubles(std::span<const double> values);

std::string to_string(const Point& p);

}  // namespace polysmooth
