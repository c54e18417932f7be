#pragma once

/// \file
/// Number types shared by every module: exact rationals (GMP) and
/// variable-precision reals (MPFR), plus the precision scope that governs
/// every Real computation on the current thread.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace logrowth {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;
using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

inline constexpr unsigned kDefaultPrecisionBits = 128;
inline constexpr unsigned kMinPrecisionBits = 64;

/// Decimal digits that give at least `bits` binary digits of mantissa.
inline unsigned digits10_for_bits(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

/// Opens the MPFR exponent range as far as the library allows, so that
/// values such as exp(10^12) are representable rather than overflowing, and
/// installs the 128-bit ambient default. Runs once.
inline void widen_exponent_range() {
  static const bool done = [] {
    mpfr_set_emax(mpfr_get_emax_max());
    mpfr_set_emin(mpfr_get_emin_min());
    Real::default_precision(digits10_for_bits(kDefaultPrecisionBits));
    return true;
  }();
  (void)done;
}

/// Current working precision in bits (as seen by newly created Reals).
inline unsigned current_precision_bits() {
  widen_exponent_range();
  Real probe;
  return static_cast<unsigned>(mpfr_get_prec(probe.backend().data()));
}

/// Precision used by an operation that accepts a `precision_bits` option
/// where 0 means "ambient".
inline unsigned resolve_precision(unsigned requested) {
  return requested == 0 ? current_precision_bits() : requested;
}

/// RAII guard setting the default Real precision for its lifetime.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits)
      : saved_digits10_((widen_exponent_range(), Real::default_precision())) {
    if (bits < kMinPrecisionBits) bits = kMinPrecisionBits;
    Real::default_precision(digits10_for_bits(bits));
  }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;
  ~PrecisionScope() { Real::default_precision(saved_digits10_); }

 private:
  unsigned saved_digits10_;
};

/// Precision requested through the LOGROWTH_PRECISION environment variable,
/// falling back to the library default.
inline unsigned precision_from_env() {
  if (const char* env = std::getenv("LOGROWTH_PRECISION")) {
    unsigned value = 0;
    std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size() &&
        value >= kMinPrecisionBits)
      return value;
  }
  return kDefaultPrecisionBits;
}

/// Copy of x carrying the current default precision. Boost keeps the
/// precision of the source operand in arithmetic, so values must be rebased
/// before they are mixed into a computation at a different precision.
inline Real rebase(const Real& x) {
  Real y;
  mpfr_set(y.backend().data(), x.backend().data(), MPFR_RNDN);
  return y;
}

/// Binary precision carried by x.
inline unsigned precision_of(const Real& x) {
  return static_cast<unsigned>(mpfr_get_prec(x.backend().data()));
}

inline Real real_pi() { return boost::math::constants::pi<Real>(); }
inline Real real_e() { return exp(Real(1)); }

inline double to_double(const Real& x) { return x.convert_to<double>(); }
inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline Real to_real(const Rational& q) { return Real(q); }

/// Exact rational value of a finite double (every finite double is a dyadic
/// rational, so no rounding occurs).
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
  return Rational(x);
}

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

/// Smallest integer >= q.
inline Integer ceil_rational(const Rational& q) {
  Integer n = numerator(q);
  Integer d = denominator(q);
  Integer quotient = n / d;  // truncates toward zero
  if (quotient * d != n && n > 0) quotient += 1;
  return quotient;
}

inline long to_long(const Integer& z) { return z.convert_to<long>(); }

/// "p/q" with q >= 1; integers render as "p/1" when `always_fraction`.
inline std::string rational_to_string(const Rational& q, bool always_fraction = false) {
  std::string num = numerator(q).str();
  std::string den = denominator(q).str();
  if (den == "1" && !always_fraction) return num;
  return num + "/" + den;
}

/// Parses "p", "p/q", "-p/q" or a plain decimal literal ("0.25", "-3.5").
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] {
    throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");
  };
  if (text.empty()) fail();
  auto parse_int = [&](std::string_view digits) {
    std::size_t start = (digits.size() && (digits[0] == '-' || digits[0] == '+')) ? 1 : 0;
    if (digits.size() == start) fail();
    for (std::size_t i = start; i < digits.size(); ++i)
      if (digits[i] < '0' || digits[i] > '9') fail();
    return Integer(std::string(digits[0] == '+' ? digits.substr(1) : digits));
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer n = parse_int(text.substr(0, slash));
    std::string_view den_text = text.substr(slash + 1);
    if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+')) fail();
    Integer d = parse_int(den_text);
    if (d == 0) fail();
    return Rational(n, d);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole = whole.substr(1);
    if (whole.empty() && frac.empty()) fail();
    Integer w = whole.empty() ? Integer(0) : parse_int(whole);
    Integer f = frac.empty() ? Integer(0) : parse_int(frac);
    if (!frac.empty() && (frac[0] == '-' || frac[0] == '+')) fail();
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rational value = Rational(w) + Rational(f, scale);
    return negative ? Rational(-value) : value;
  }
  return Rational(parse_int(text));
}

/// Locale-independent shortest round-trip rendering of a double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace logrowth
