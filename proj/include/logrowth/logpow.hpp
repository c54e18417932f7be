#pragma once

/// \file
/// Log-power monomials x^q0 log(x)^q1 ... log_k(x)^qk with exact rational
/// exponents: the asymptotic scale for unary prepared forms.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "logrowth/numeric.hpp"

namespace logrowth {

/// Tower e_0 = 0, e_j = exp(e_{j-1}); log_j(x) > 0 exactly when x > e_j.
class IteratedExpTable {
 public:
  /// e_5 = exp(e_4) is about exp(3.8e6); e_6 does not fit any float format.
  static constexpr std::size_t kMaxLevel = 5;

  IteratedExpTable() {
    values_.emplace_back(0);
    for (std::size_t j = 1; j <= kMaxLevel; ++j) values_.push_back(exp(values_.back()));
  }
  const Real& operator[](std::size_t j) const {
    if (j > kMaxLevel) throw std::out_of_range("iterated exponential level too large");
    return values_[j];
  }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<Real> values_;
};

/// e_k at the current precision.
inline Real iterated_exp(std::size_t k) {
  Real v = 0;
  for (std::size_t j = 0; j < k; ++j) v = exp(v);
  return v;
}

/// exp applied k times.
inline Real exp_k(const Real& x, std::size_t k) {
  Real v = x;
  for (std::size_t j = 0; j < k; ++j) v = exp(v);
  return v;
}

/// log applied k times; nullopt when an intermediate value is not positive.
inline std::optional<Real> log_k(const Real& x, std::size_t k) {
  Real v = x;
  for (std::size_t j = 0; j < k; ++j) {
    if (v <= 0) return std::nullopt;
    v = log(v);
  }
  return v;
}

class LogPowMonomial {
 public:
  LogPowMonomial() : exponents_{Rational(0)} {}
  explicit LogPowMonomial(std::vector<Rational> exponents) : exponents_(std::move(exponents)) {
    canonicalize();
  }
  LogPowMonomial(std::initializer_list<Rational> exponents)
      : LogPowMonomial(std::vector<Rational>(exponents)) {}

  static LogPowMonomial unit() { return {}; }
  static LogPowMonomial power(Rational q0) { return LogPowMonomial({std::move(q0)}); }
  /// log_j(x), j >= 1.
  static LogPowMonomial iterated_log(std::size_t j) {
    std::vector<Rational> q(j + 1, Rational(0));
    q[j] = 1;
    return LogPowMonomial(std::move(q));
  }

  /// Exponent of log_j; zero past the stored length.
  const Rational& operator[](std::size_t j) const {
    static const Rational zero(0);
    return j < exponents_.size() ? exponents_[j] : zero;
  }
  const std::vector<Rational>& exponents() const { return exponents_; }
  /// Index of the deepest iterated log with nonzero exponent.
  std::size_t depth() const { return exponents_.size() - 1; }
  bool is_unit() const { return exponents_.size() == 1 && exponents_[0] == 0; }

  friend bool operator==(const LogPowMonomial&, const LogPowMonomial&) = default;

 private:
  void canonicalize() {
    while (exponents_.size() > 1 && exponents_.back() == 0) exponents_.pop_back();
    if (exponents_.empty()) exponents_.push_back(Rational(0));
  }
  std::vector<Rational> exponents_;
};

/// Lexicographic comparison of exponent sequences; Greater means m1/m2 -> infinity.
inline std::strong_ordering lex_compare(const LogPowMonomial& m1, const LogPowMonomial& m2) {
  std::size_t n = std::max(m1.exponents().size(), m2.exponents().size());
  for (std::size_t j = 0; j < n; ++j) {
    if (m1[j] < m2[j]) return std::strong_ordering::less;
    if (m1[j] > m2[j]) return std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

inline bool operator<(const LogPowMonomial& a, const LogPowMonomial& b) {
  return lex_compare(a, b) == std::strong_ordering::less;
}
inline bool operator>(const LogPowMonomial& a, const LogPowMonomial& b) { return b < a; }
inline bool operator<=(const LogPowMonomial& a, const LogPowMonomial& b) { return !(b < a); }
inline bool operator>=(const LogPowMonomial& a, const LogPowMonomial& b) { return !(a < b); }

inline LogPowMonomial mul(const LogPowMonomial& m1, const LogPowMonomial& m2) {
  std::size_t n = std::max(m1.exponents().size(), m2.exponents().size());
  std::vector<Rational> q(n);
  for (std::size_t j = 0; j < n; ++j) q[j] = m1[j] + m2[j];
  return LogPowMonomial(std::move(q));
}

inline LogPowMonomial div(const LogPowMonomial& m1, const LogPowMonomial& m2) {
  std::size_t n = std::max(m1.exponents().size(), m2.exponents().size());
  std::vector<Rational> q(n);
  for (std::size_t j = 0; j < n; ++j) q[j] = m1[j] - m2[j];
  return LogPowMonomial(std::move(q));
}

inline LogPowMonomial pow(const LogPowMonomial& m, const Rational& q) {
  std::vector<Rational> e = m.exponents();
  for (Rational& x : e) x *= q;
  return LogPowMonomial(std::move(e));
}

/// m(x) at the current precision; requires x > e_k (every iterated log
/// positive).
inline Real eval_monomial(const LogPowMonomial& m, const Real& x) {
  Real value = 1;
  Real level = x;
  for (std::size_t j = 0; j <= m.depth(); ++j) {
    if (j > 0) level = log(level);
    if (level <= 0)
      throw std::domain_error("eval_monomial: x must exceed e_" + std::to_string(m.depth()));
    if (m[j] != 0) value *= pow(level, Real(m[j]));
  }
  return value;
}

/// log|m(x)| at the current precision; avoids overflow for huge x.
inline Real log_eval_monomial(const LogPowMonomial& m, const Real& x) {
  Real acc = 0;
  Real level = x;
  for (std::size_t j = 0; j <= m.depth(); ++j) {
    if (j > 0) level = log(level);
    if (level <= 0)
      throw std::domain_error("log_eval_monomial: x must exceed e_" + std::to_string(m.depth()));
    if (m[j] != 0) acc += Real(m[j]) * log(level);
  }
  return acc;
}

/// Least integer N with m(x) <= x^N eventually.
inline long bound_exponent(const LogPowMonomial& m) {
  const Rational& q0 = m[0];
  if (!is_integer(q0)) return to_long(ceil_rational(q0));
  long n = to_long(numerator(q0));
  LogPowMonomial tail_only = div(m, LogPowMonomial::power(q0));
  return lex_compare(tail_only, LogPowMonomial::unit()) == std::strong_ordering::greater ? n + 1 : n;
}

/// Text form "x^(3/2) log^(-1) log_2^(2)"; the unit prints as "1".
inline std::string to_string(const LogPowMonomial& m) {
  if (m.is_unit()) return "1";
  std::string out;
  auto exponent = [](const Rational& q) -> std::string {
    if (q == 1) return "";
    return "^(" + rational_to_string(q) + ")";
  };
  for (std::size_t j = 0; j <= m.depth(); ++j) {
    if (m[j] == 0) continue;
    if (!out.empty()) out += " ";
    if (j == 0) out += "x";
    else if (j == 1) out += "log";
    else out += "log_" + std::to_string(j);
    out += exponent(m[j]);
  }
  return out;
}

/// Inverse of to_string; accepts factors in any order, optional "^q" with
/// or without parentheses, and "*" separators.
inline LogPowMonomial parse_monomial(std::string_view text) {
  std::vector<Rational> q;
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("monomial text: " + why + " at position " + std::to_string(pos));
  };
  auto skip = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '*')) ++pos;
  };
  auto bump = [&](std::size_t j, const Rational& e) {
    if (q.size() <= j) q.resize(j + 1, Rational(0));
    q[j] += e;
  };
  skip();
  if (text.substr(pos) == "1") return {};
  while (skip(), pos < text.size()) {
    std::size_t level;
    if (text.substr(pos, 4) == "log_") {
      pos += 4;
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (start == pos) fail("missing log index");
      level = std::stoul(std::string(text.substr(start, pos - start)));
      if (level == 0) fail("log index must be positive");
    } else if (text.substr(pos, 3) == "log") {
      pos += 3;
      level = 1;
    } else if (text[pos] == 'x') {
      pos += 1;
      level = 0;
    } else {
      fail("unexpected character");
    }
    Rational e(1);
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      bool paren = pos < text.size() && text[pos] == '(';
      if (paren) ++pos;
      std::size_t start = pos;
      while (pos < text.size() && text[pos] != ')' && text[pos] != ' ' && text[pos] != '*') ++pos;
      e = parse_rational(text.substr(start, pos - start));
      if (paren) {
        if (pos >= text.size() || text[pos] != ')') fail("missing ')'");
        ++pos;
      }
    }
    bump(level, e);
  }
  if (q.empty()) fail("empty monomial");
  return LogPowMonomial(std::move(q));
}

}  // namespace logrowth
