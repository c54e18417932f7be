#pragma once

/// \file
/// Truncated asymptotic series over the log-power scale. Coefficients are
/// exact rationals, or rational balls (midpoint and radius) when a
/// transcendental step such as log(2) or 2^(1/3) is involved. The remainder
/// after the listed terms is O(order) for an explicit monomial `order`.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "logrowth/expr.hpp"
#include "logrowth/logpow.hpp"
#include "logrowth/numeric.hpp"

namespace logrowth {

/// Raised when an expression leaves the normalizable fragment.
class OutOfFragment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when cancellation consumed every term before a dominant term was
/// found.
class DepthExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precision for transcendental coefficients unless a caller asks for more.
inline constexpr unsigned kCoefficientBits = 256;

namespace detail {

inline Rational mpfr_to_rational(mpfr_srcptr x) {
  if (!mpfr_number_p(x)) throw std::domain_error("non-finite value has no rational form");
  if (mpfr_zero_p(x)) return Rational(0);
  Integer mantissa;
  mpfr_exp_t e = mpfr_get_z_2exp(mantissa.backend().data(), x);
  Rational q(mantissa);
  Integer scale(1);
  if (e > 0) {
    scale <<= static_cast<unsigned long>(e);
    return Rational(q * scale);
  }
  scale <<= static_cast<unsigned long>(-e);
  return Rational(q / scale);
}

/// Smallest 64-bit dyadic >= r (r >= 0).
inline Rational round_up_dyadic(const Rational& r) {
  mpfr_t t;
  mpfr_init2(t, 64);
  mpfr_set_q(t, r.backend().data(), MPFR_RNDU);
  Rational out = mpfr_to_rational(t);
  mpfr_clear(t);
  return out;
}

inline Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace detail

/// Exact value (of a finite Real) as a dyadic rational.
inline Rational real_to_rational(const Real& x) { return detail::mpfr_to_rational(x.backend().data()); }

/// Exact rational, or a ball [value - radius, value + radius] known to
/// contain the true coefficient.
class Coefficient {
 public:
  Coefficient() = default;
  Coefficient(Rational value) : value_(std::move(value)) {}
  Coefficient(long value) : value_(value) {}

  static Coefficient ball(Rational mid, Rational radius) {
    Coefficient c(std::move(mid));
    c.radius_ = detail::rational_abs(radius);
    c.tidy();
    return c;
  }

  const Rational& value() const { return value_; }
  const Rational& radius() const { return radius_; }
  bool exact() const { return radius_ == 0; }
  bool is_zero() const { return exact() && value_ == 0; }
  double approx() const { return to_double(value_); }

  /// Certified sign (-1, 0, +1); nullopt when the ball straddles zero.
  std::optional<int> sign() const {
    if (exact()) return value_ > 0 ? 1 : (value_ < 0 ? -1 : 0);
    if (value_ - radius_ > 0) return 1;
    if (value_ + radius_ < 0) return -1;
    return std::nullopt;
  }

  friend Coefficient operator+(const Coefficient& a, const Coefficient& b) {
    return ball_or_exact(a.value_ + b.value_, a.radius_ + b.radius_);
  }
  friend Coefficient operator-(const Coefficient& a, const Coefficient& b) {
    return ball_or_exact(a.value_ - b.value_, a.radius_ + b.radius_);
  }
  friend Coefficient operator-(const Coefficient& a) { return ball_or_exact(-a.value_, a.radius_); }
  friend Coefficient operator*(const Coefficient& a, const Coefficient& b) {
    Rational r = detail::rational_abs(a.value_) * b.radius_ +
                 detail::rational_abs(b.value_) * a.radius_ + a.radius_ * b.radius_;
    return ball_or_exact(a.value_ * b.value_, r);
  }
  friend bool operator==(const Coefficient&, const Coefficient&) = default;

  Coefficient inverse() const {
    if (!sign() || *sign() == 0) throw OutOfFragment("division by a coefficient that may vanish");
    if (exact()) return Coefficient(Rational(1 / value_));
    Rational m = detail::rational_abs(value_);
    return ball_or_exact(Rational(1 / value_), radius_ / (m * (m - radius_)));
  }

 private:
  static Coefficient ball_or_exact(Rational v, Rational r) {
    Coefficient c(std::move(v));
    c.radius_ = std::move(r);
    c.tidy();
    return c;
  }

  /// Rounds an inexact midpoint to the ambient precision (moving the
  /// rounding error into the radius) so rational sizes stay bounded.
  void tidy() {
    if (radius_ == 0) return;
    Rational rounded = real_to_rational(Real(value_));
    radius_ += detail::rational_abs(value_ - rounded);
    value_ = std::move(rounded);
    radius_ = detail::round_up_dyadic(radius_);
  }

  Rational value_{0};
  Rational radius_{0};
};

inline Coefficient pow_integer(const Coefficient& c, long n) {
  if (n < 0) return pow_integer(c.inverse(), -n);
  Coefficient acc(1L);
  Coefficient base = c;
  while (n > 0) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

/// Ball image of c under a function monotone on the ball, evaluated at the
/// ambient precision. The caller guarantees the ball lies in the domain.
template <class F>
Coefficient monotone_image(const Coefficient& c, F fn) {
  unsigned bits = current_precision_bits();
  Real mid = fn(Real(c.value()));
  Real lo = fn(Real(Rational(c.value() - c.radius())));
  Real hi = fn(Real(Rational(c.value() + c.radius())));
  Rational m = real_to_rational(mid);
  Rational spread = std::max(detail::rational_abs(real_to_rational(lo) - m),
                             detail::rational_abs(real_to_rational(hi) - m));
  // Input and output rounding: a few ulps of everything involved.
  Rational slack = (detail::rational_abs(m) + detail::rational_abs(real_to_rational(lo)) +
                    detail::rational_abs(real_to_rational(hi)) + 1);
  Integer scale(1);
  scale <<= (bits - 8);
  slack /= scale;
  return Coefficient::ball(m, spread + slack);
}

inline Coefficient log_coefficient(const Coefficient& c) {
  if (c.sign() != 1) throw OutOfFragment("log of a coefficient not certified positive");
  if (c.exact() && c.value() == 1) return Coefficient(0L);
  return monotone_image(c, [](const Real& x) { return Real(log(x)); });
}

/// c^q for rational q; non-integer q needs c certified positive.
inline Coefficient pow_coefficient(const Coefficient& c, const Rational& q) {
  if (is_integer(q)) {
    if (c.sign() == 0 && q < 0) throw OutOfFragment("negative power of zero");
    if (!c.sign()) throw OutOfFragment("power of a coefficient that may vanish");
    return pow_integer(c, to_long(numerator(q)));
  }
  if (c.sign() != 1) throw OutOfFragment("rational power of a coefficient not certified positive");
  if (c.exact()) {
    // Exact when c is a perfect power: try integer roots of num and den.
    long den = to_long(denominator(q));
    Integer rn, rd;
    mpz_t tmp;
    mpz_init(tmp);
    bool exact_n = mpz_root(tmp, numerator(c.value()).backend().data(), den) != 0;
    rn = Integer(tmp);
    bool exact_d = mpz_root(tmp, denominator(c.value()).backend().data(), den) != 0;
    rd = Integer(tmp);
    mpz_clear(tmp);
    if (exact_n && exact_d) return pow_integer(Coefficient(Rational(rn, rd)), to_long(numerator(q)));
  }
  Real exponent(q);
  return monotone_image(c, [&](const Real& x) { return Real(pow(x, exponent)); });
}

struct Term {
  Coefficient c;
  LogPowMonomial m;
  friend bool operator==(const Term&, const Term&) = default;
};

/// sum c_i m_i + O(order); terms strictly decreasing and above `order`.
/// No terms and no order is the exact zero.
struct Series {
  std::vector<Term> terms;
  std::optional<LogPowMonomial> order;

  bool is_exact_zero() const { return terms.empty() && !order; }
  bool is_exact() const { return !order; }
  /// Largest monomial present, term or remainder.
  const LogPowMonomial& lead_or_order() const {
    if (!terms.empty()) return terms.front().m;
    if (order) return *order;
    throw std::logic_error("lead_or_order of the zero series");
  }
  std::size_t max_depth() const {
    std::size_t k = order ? order->depth() : 0;
    for (const Term& t : terms) k = std::max(k, t.m.depth());
    return k;
  }
};

inline Series constant_series(const Coefficient& c) {
  Series s;
  if (!c.is_zero()) s.terms.push_back({c, LogPowMonomial::unit()});
  return s;
}

inline Series monomial_series(const Coefficient& c, const LogPowMonomial& m) {
  Series s;
  if (!c.is_zero()) s.terms.push_back({c, m});
  return s;
}

/// Merges equal monomials, absorbs coefficients that may vanish into the
/// remainder, drops terms swallowed by the remainder and truncates to K.
inline Series normalize(Series s, std::size_t K) {
  std::sort(s.terms.begin(), s.terms.end(), [](const Term& a, const Term& b) { return a.m > b.m; });
  std::vector<Term> merged;
  for (Term& t : s.terms) {
    if (!merged.empty() && merged.back().m == t.m) merged.back().c = merged.back().c + t.c;
    else merged.push_back(std::move(t));
  }
  auto raise_order = [&](const LogPowMonomial& m) {
    if (!s.order || *s.order < m) s.order = m;
  };
  std::vector<Term> kept;
  for (Term& t : merged) {
    if (t.c.is_zero()) continue;
    if (!t.c.sign()) {
      raise_order(t.m);
      continue;
    }
    kept.push_back(std::move(t));
  }
  if (s.order)
    std::erase_if(kept, [&](const Term& t) { return t.m <= *s.order; });
  if (kept.size() > K) {
    raise_order(kept[K].m);
    kept.resize(K);
  }
  s.terms = std::move(kept);
  return s;
}

inline Series add(const Series& a, const Series& b, std::size_t K) {
  Series s;
  s.terms = a.terms;
  s.terms.insert(s.terms.end(), b.terms.begin(), b.terms.end());
  if (a.order) s.order = a.order;
  if (b.order && (!s.order || *s.order < *b.order)) s.order = b.order;
  return normalize(std::move(s), K);
}

inline Series negate(const Series& a) {
  Series s = a;
  for (Term& t : s.terms) t.c = -t.c;
  return s;
}

inline Series subtract(const Series& a, const Series& b, std::size_t K) { return add(a, negate(b), K); }

inline Series mul(const Series& a, const Series& b, std::size_t K) {
  if (a.is_exact_zero() || b.is_exact_zero()) return {};
  Series s;
  for (const Term& x : a.terms)
    for (const Term& y : b.terms) s.terms.push_back({x.c * y.c, mul(x.m, y.m)});
  auto raise_order = [&](const LogPowMonomial& m) {
    if (!s.order || *s.order < m) s.order = m;
  };
  if (a.order) raise_order(mul(*a.order, b.lead_or_order()));
  if (b.order) raise_order(mul(*b.order, a.lead_or_order()));
  return normalize(std::move(s), K);
}

namespace detail {

/// Dominant term, or DepthExhausted when only a remainder is left.
inline const Term& lead_term(const Series& s, const char* context) {
  if (s.terms.empty()) {
    if (s.order)
      throw DepthExhausted(std::string(context) + ": cancellation left only a remainder term");
    throw OutOfFragment(std::string(context) + ": series is identically zero");
  }
  return s.terms.front();
}

/// (s - lead)/lead, a series whose monomials are all below the unit.
inline Series relative_correction(const Series& s, const Term& lead, std::size_t K) {
  Series eps;
  Coefficient inv = lead.c.inverse();
  for (std::size_t i = 1; i < s.terms.size(); ++i)
    eps.terms.push_back({s.terms[i].c * inv, div(s.terms[i].m, lead.m)});
  if (s.order) eps.order = div(*s.order, lead.m);
  return normalize(std::move(eps), K);
}

}  // namespace detail

/// s^q via c^q m^q (1 + eps)^q with the binomial series truncated at K.
inline Series pow(const Series& s, const Rational& q, std::size_t K) {
  if (q == 0) return constant_series(Coefficient(1L));
  if (s.is_exact_zero()) {
    if (q > 0) return {};
    throw OutOfFragment("non-positive power of the zero function");
  }
  bool nonneg_integer = is_integer(q) && q > 0;
  if (s.terms.empty()) {
    if (nonneg_integer) {
      Series r;
      r.order = pow(*s.order, q);
      return r;
    }
    throw DepthExhausted("power: cancellation left only a remainder term");
  }
  const Term& lead = s.terms.front();
  if (!is_integer(q) && lead.c.sign() != 1)
    throw OutOfFragment("rational power of a series whose dominant coefficient is not positive");
  Series front = monomial_series(pow_coefficient(lead.c, q), pow(lead.m, q));
  Series eps = detail::relative_correction(s, lead, K);
  if (eps.is_exact_zero()) return front;

  std::size_t J = K;
  if (nonneg_integer) J = std::min<std::size_t>(K, to_long(numerator(q)));
  Series expansion = constant_series(Coefficient(1L));
  Series eps_power = constant_series(Coefficient(1L));
  Rational binom(1);
  for (std::size_t j = 1; j <= J; ++j) {
    binom *= (q - Rational(static_cast<long>(j - 1))) / Rational(static_cast<long>(j));
    eps_power = mul(eps_power, eps, K);
    Series term = mul(constant_series(Coefficient(binom)), eps_power, K);
    expansion = add(expansion, term, K);
  }
  bool binomial_terminates = nonneg_integer && J == static_cast<std::size_t>(to_long(numerator(q)));
  if (!binomial_terminates) {
    Series rest;
    rest.order = pow(eps.lead_or_order(), Rational(static_cast<long>(J + 1)));
    expansion = add(expansion, rest, K);
  }
  return mul(front, expansion, K);
}

/// log s = log c + sum_j q_j log_{j+1}(x) + log(1 + eps).
inline Series log(const Series& s, std::size_t K) {
  if (s.is_exact_zero()) throw OutOfFragment("log of the zero function");
  const Term& lead = detail::lead_term(s, "log");
  if (lead.c.sign() != 1)
    throw OutOfFragment("log of a series whose dominant coefficient is not positive");
  if (lead.m.depth() + 1 > IteratedExpTable::kMaxLevel - 1)
    throw OutOfFragment("iterated logarithm deeper than supported");
  Series out = constant_series(log_coefficient(lead.c));
  for (std::size_t j = 0; j <= lead.m.depth(); ++j)
    if (lead.m[j] != 0)
      out = add(out, monomial_series(Coefficient(lead.m[j]), LogPowMonomial::iterated_log(j + 1)), K);
  Series eps = detail::relative_correction(s, lead, K);
  if (eps.is_exact_zero()) return out;
  Series eps_power = constant_series(Coefficient(1L));
  for (std::size_t j = 1; j <= K; ++j) {
    eps_power = mul(eps_power, eps, K);
    Rational c(j % 2 == 1 ? 1 : -1, static_cast<long>(j));
    out = add(out, mul(constant_series(Coefficient(c)), eps_power, K), K);
  }
  Series rest;
  rest.order = pow(eps.lead_or_order(), Rational(static_cast<long>(K + 1)));
  return add(out, rest, K);
}

/// Eventual sign of s: -1, 0 (identically zero) or +1.
inline int eventual_sign(const Series& s, const char* context) {
  if (s.is_exact_zero()) return 0;
  const Term& lead = detail::lead_term(s, context);
  return *lead.c.sign();
}

inline Series abs(const Series& s) {
  return eventual_sign(s, "abs") < 0 ? negate(s) : s;
}

/// Eventually dominant branch of min/max.
inline Series extremum(bool take_max, const std::vector<Series>& branches, std::size_t K) {
  Series best = branches.at(0);
  for (std::size_t i = 1; i < branches.size(); ++i) {
    int sgn = eventual_sign(subtract(branches[i], best, K), take_max ? "max" : "min");
    if ((take_max && sgn > 0) || (!take_max && sgn < 0)) best = branches[i];
  }
  return best;
}

/// Series of a unary log-analytic expression with at most K terms.
inline Series expand_series(const Expr& e, std::size_t K) {
  switch (e.op()) {
    case Op::Const:
      return constant_series(Coefficient(e.value()));
    case Op::Var:
      if (e.index() != 1) throw OutOfFragment("expression is not unary (uses x" + std::to_string(e.index()) + ")");
      return monomial_series(Coefficient(1L), LogPowMonomial::power(1));
    case Op::Add:
      return add(expand_series(e.arg(0), K), expand_series(e.arg(1), K), K);
    case Op::Sub:
      return subtract(expand_series(e.arg(0), K), expand_series(e.arg(1), K), K);
    case Op::Mul:
      return mul(expand_series(e.arg(0), K), expand_series(e.arg(1), K), K);
    case Op::Div:
      return mul(expand_series(e.arg(0), K), pow(expand_series(e.arg(1), K), Rational(-1), K), K);
    case Op::Neg:
      return negate(expand_series(e.arg(), K));
    case Op::Pow:
      return pow(expand_series(e.arg(), K), e.exponent(), K);
    case Op::Log:
      return log(expand_series(e.arg(), K), K);
    case Op::Abs:
      return abs(expand_series(e.arg(), K));
    case Op::Min:
    case Op::Max: {
      std::vector<Series> branches;
      for (const Expr& a : e.args()) branches.push_back(expand_series(a, K));
      return extremum(e.op() == Op::Max, branches, K);
    }
    case Op::Exp:
      throw OutOfFragment("exp is outside the log-analytic fragment");
    case Op::Atan2:
      throw OutOfFragment("atan2 is outside the normalizable fragment");
  }
  throw OutOfFragment("unsupported node");
}

}  // namespace logrowth
