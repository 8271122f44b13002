#include "polysmooth/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "polysmooth/errors.hpp"

namespace polysmooth {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AffineDependence: return "AffineDependence";
    case ErrorCode::BadGluing: return "BadGluing";
    case ErrorCode::DuplicateVertex: return "DuplicateVertex";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyComplex: return "EmptyComplex";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::NotInComplex: return "NotInComplex";
    case ErrorCode::SubdivisionLimit: return "SubdivisionLimit";
    case ErrorCode::Undecided: return "Undecided";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::OutsideTube: return "OutsideTube";
    case ErrorCode::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::EvaluationFailure: return "EvaluationFailure";
    case ErrorCode::CarrierViolation: return "CarrierViolation";
    case ErrorCode::ModulusUnavailable: return "ModulusUnavailable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RangeError: return "RangeError";
  }
  return "Unknown";
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

mpz_class parse_integer(std::string_view s, std::string_view whole) {
  std::string_view body = s;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (!all_digits(body)) throw Error(ErrorCode::ParseError, "not a rational: '" + std::string(whole) + "'");
  mpz_class z(std::string(body), 10);
  return negative ? mpz_class(-z) : z;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty rational");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    mpz_class num = parse_integer(s.substr(0, slash), text);
    mpz_class den = parse_integer(s.substr(slash + 1), text);
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mpz_class ez = parse_integer(s.substr(e + 1), text);
    if (!ez.fits_slong_p() || abs(ez) > 100000)
      throw Error(ErrorCode::ParseError, "exponent out of range in '" + std::string(text) + "'");
    exponent = ez.get_si();
    s = s.substr(0, e);
  }
  std::string digits;
  if (auto dot_pos = s.find('.'); dot_pos != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot_pos);
    std::string_view frac_part = s.substr(dot_pos + 1);
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)) ||
        (int_part.empty() && frac_part.empty()))
      throw Error(ErrorCode::ParseError, "not a rational: '" + std::string(text) + "'");
    digits = std::string(int_part) + std::string(frac_part);
    exponent -= static_cast<long>(frac_part.size());
  } else {
    if (!all_digits(s)) throw Error(ErrorCode::ParseError, "not a rational: '" + std::string(text) + "'");
    digits = std::string(s);
  }
  mpz_class mantissa(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational q = exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

Rational from_double(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::RangeError, "non-finite value");
  return Rational(value);
}

std::string to_string(const Rational& value) { return value.get_str(); }

Rational pow2(int exponent) {
  mpz_class p = 1;
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(exponent < 0 ? -exponent : exponent));
  return exponent >= 0 ? Rational(p) : Rational(mpz_class(1), p);
}

namespace {

std::optional<Rational> exact_sqrt(const Rational& x) {
  if (!mpz_perfect_square_p(x.get_num_mpz_t()) || !mpz_perfect_square_p(x.get_den_mpz_t())) return std::nullopt;
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), x.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), x.get_den_mpz_t());
  return Rational(n, d);
}

}  // namespace

Rational sqrt_lower(const Rational& x) {
  if (sgn(x) <= 0) return Rational(0);
  if (auto e = exact_sqrt(x)) return *e;
  double r = std::sqrt(x.get_d());
  while (r > 0 && Rational(r) * Rational(r) > x) r = std::nextafter(r, 0.0);
  return Rational(r);
}

Rational sqrt_upper(const Rational& x) {
  if (sgn(x) <= 0) return Rational(0);
  if (auto e = exact_sqrt(x)) return *e;
  double r = std::max(std::sqrt(x.get_d()), std::numeric_limits<double>::denorm_min());
  while (Rational(r) * Rational(r) < x) r = std::nextafter(r, INFINITY);
  return Rational(r);
}

Point operator-(const Point& a, const Point& b) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Point operator+(const Point& a, const Point& b) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Point operator*(const Rational& s, const Point& a) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

Rational dot(const Point& a, const Point& b) {
  Rational acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Rational squared_norm(const Point& a) { return dot(a, a); }

Rational squared_distance(const Point& a, const Point& b) {
  Rational acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Rational d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

std::vector<double> to_doubles(const Point& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i].get_d();
  return out;
}

Point from_doubles(std::span<const double> values) {
  Point out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = from_double(values[i]);
  return out;
}

std::string to_string(const Point& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i].get_str();
  os << ")";
  return os.str();
}

}  // namespace polysmooth
