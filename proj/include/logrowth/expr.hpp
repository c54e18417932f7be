#pragma once

/// \file
/// Expression trees for the log-analytic fragment: exact rational constants
/// and exponents, arithmetic, log, abs, min/max, plus exp and atan2 which
/// exist for oracles only and clear the log-analytic flag.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logrowth/geometry.hpp"
#include "logrowth/numeric.hpp"

namespace logrowth {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Log, Exp, Abs, Min, Max, Atan2 };

class Expr {
 public:
  struct Node {
    Op op;
    Rational value;        // Const value or Pow exponent
    std::size_t index = 0; // Var index, 1-based
    std::vector<Expr> args;
  };

  Expr() : Expr(constant(Rational(0))) {}

  static Expr constant(Rational q) { return Expr(Node{Op::Const, std::move(q), 0, {}}); }
  static Expr constant(long q) { return constant(Rational(q)); }
  static Expr var(std::size_t index) {
    if (index == 0) throw std::invalid_argument("variable indices start at 1");
    return Expr(Node{Op::Var, Rational(0), index, {}});
  }
  static Expr pow(Expr base, Rational exponent) {
    return Expr(Node{Op::Pow, std::move(exponent), 0, {std::move(base)}});
  }
  static Expr sqrt(Expr base) { return pow(std::move(base), Rational(1, 2)); }
  static Expr unary(Op op, Expr arg) {
    if (op != Op::Log && op != Op::Exp && op != Op::Abs && op != Op::Neg)
      throw std::invalid_argument("not a unary operator");
    return Expr(Node{op, Rational(0), 0, {std::move(arg)}});
  }
  static Expr log(Expr arg) { return unary(Op::Log, std::move(arg)); }
  static Expr exp(Expr arg) { return unary(Op::Exp, std::move(arg)); }
  static Expr abs(Expr arg) { return unary(Op::Abs, std::move(arg)); }
  static Expr binary(Op op, Expr lhs, Expr rhs) {
    if (op != Op::Add && op != Op::Sub && op != Op::Mul && op != Op::Div && op != Op::Atan2)
      throw std::invalid_argument("not a binary operator");
    return Expr(Node{op, Rational(0), 0, {std::move(lhs), std::move(rhs)}});
  }
  static Expr atan2(Expr y, Expr x) { return binary(Op::Atan2, std::move(y), std::move(x)); }
  static Expr extremum(Op op, std::vector<Expr> args) {
    if (op != Op::Min && op != Op::Max) throw std::invalid_argument("not min/max");
    if (args.size() < 2) throw std::invalid_argument("min/max need at least two arguments");
    return Expr(Node{op, Rational(0), 0, std::move(args)});
  }

  Op op() const { return node_->op; }
  const Rational& value() const { return node_->value; }
  const Rational& exponent() const { return node_->value; }
  std::size_t index() const { return node_->index; }
  const std::vector<Expr>& args() const { return node_->args; }
  const Expr& arg(std::size_t i = 0) const { return node_->args.at(i); }

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.op() != b.op() || a.args().size() != b.args().size()) return false;
    if ((a.op() == Op::Const || a.op() == Op::Pow) && a.value() != b.value()) return false;
    if (a.op() == Op::Var && a.index() != b.index()) return false;
    for (std::size_t i = 0; i < a.args().size(); ++i)
      if (!(a.args()[i] == b.args()[i])) return false;
    return true;
  }

  friend Expr operator+(Expr a, Expr b) { return binary(Op::Add, std::move(a), std::move(b)); }
  friend Expr operator-(Expr a, Expr b) { return binary(Op::Sub, std::move(a), std::move(b)); }
  friend Expr operator*(Expr a, Expr b) { return binary(Op::Mul, std::move(a), std::move(b)); }
  friend Expr operator/(Expr a, Expr b) { return binary(Op::Div, std::move(a), std::move(b)); }
  friend Expr operator-(Expr a) { return unary(Op::Neg, std::move(a)); }

 private:
  explicit Expr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Structural queries

inline std::size_t max_var_index(const Expr& e) {
  if (e.op() == Op::Var) return e.index();
  std::size_t m = 0;
  for (const Expr& a : e.args()) m = std::max(m, max_var_index(a));
  return m;
}

inline bool contains_op(const Expr& e, Op op) {
  if (e.op() == op) return true;
  return std::any_of(e.args().begin(), e.args().end(),
                     [op](const Expr& a) { return contains_op(a, op); });
}

/// True iff the tree has no Exp node.
inline bool is_log_analytic(const Expr& e) { return !contains_op(e, Op::Exp); }

/// Maximal nesting depth of Log nodes; a syntactic upper bound on the
/// log-analytic order.
inline std::size_t log_depth(const Expr& e) {
  std::size_t inner = 0;
  for (const Expr& a : e.args()) inner = std::max(inner, log_depth(a));
  return e.op() == Op::Log ? inner + 1 : inner;
}

inline std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const Expr& a : e.args()) n += node_count(a);
  return n;
}

/// Replaces Var(i) by replacements[i-1].
inline Expr substitute(const Expr& e, std::span<const Expr> replacements) {
  switch (e.op()) {
    case Op::Const:
      return e;
    case Op::Var:
      if (e.index() > replacements.size())
        throw std::invalid_argument("substitute: variable index exceeds replacement count");
      return replacements[e.index() - 1];
    case Op::Pow:
      return Expr::pow(substitute(e.arg(), replacements), e.exponent());
    case Op::Log:
    case Op::Exp:
    case Op::Abs:
    case Op::Neg:
      return Expr::unary(e.op(), substitute(e.arg(), replacements));
    case Op::Min:
    case Op::Max: {
      std::vector<Expr> args;
      for (const Expr& a : e.args()) args.push_back(substitute(a, replacements));
      return Expr::extremum(e.op(), std::move(args));
    }
    default:
      return Expr::binary(e.op(), substitute(e.arg(0), replacements),
                          substitute(e.arg(1), replacements));
  }
}

/// Unary expression r -> e(o + r v), with o and v converted exactly to
/// rationals.
inline Expr restrict_to_ray(const Expr& e, std::span<const double> o, std::span<const double> v) {
  if (o.size() != v.size()) throw std::invalid_argument("restrict_to_ray: dimension mismatch");
  if (max_var_index(e) > v.size())
    throw std::invalid_argument("restrict_to_ray: expression arity exceeds ray dimension");
  std::vector<Expr> coords;
  Expr r = Expr::var(1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rational oi = exact_rational(o[i]);
    Rational vi = exact_rational(v[i]);
    if (vi == 0) {
      coords.push_back(Expr::constant(oi));
    } else {
      Expr slope = vi == 1 ? r : Expr::constant(vi) * r;
      coords.push_back(oi == 0 ? slope : Expr::constant(oi) + slope);
    }
  }
  return substitute(e, coords);
}

inline Expr restrict_to_ray(const Expr& e, const StandardizedRay& ray) {
  return restrict_to_ray(e, ray.o, ray.v);
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline std::string print_exponent(const Rational& q) {
  if (q >= 0 && is_integer(q)) return rational_to_string(q);
  return "(" + rational_to_string(q) + ")";
}

// Binding levels: 1 sum, 2 product, 3 prefix minus, 4 power, 5 atom.
inline std::string print(const Expr& e, int need) {
  auto wrap = [need](int level, std::string s) {
    return level < need ? "(" + s + ")" : s;
  };
  switch (e.op()) {
    case Op::Const: {
      const Rational& q = e.value();
      if (q < 0) return "(" + rational_to_string(q) + ")";
      return rational_to_string(q);
    }
    case Op::Var:
      return "x" + std::to_string(e.index());
    case Op::Add:
      return wrap(1, print(e.arg(0), 1) + " + " + print(e.arg(1), 2));
    case Op::Sub:
      return wrap(1, print(e.arg(0), 1) + " - " + print(e.arg(1), 2));
    case Op::Mul:
      return wrap(2, print(e.arg(0), 2) + " * " + print(e.arg(1), 3));
    case Op::Div:
      return wrap(2, print(e.arg(0), 2) + " / " + print(e.arg(1), 3));
    case Op::Neg: {
      // A leading digit after '-' would be read back as a negative literal.
      std::string inner = print(e.arg(), 3);
      if (std::isdigit(static_cast<unsigned char>(inner[0]))) inner = "(" + inner + ")";
      return wrap(3, "-" + inner);
    }
    case Op::Pow:
      return wrap(4, print(e.arg(), 5) + "^" + print_exponent(e.exponent()));
    case Op::Log:
      return "log(" + print(e.arg(), 0) + ")";
    case Op::Exp:
      return "exp(" + print(e.arg(), 0) + ")";
    case Op::Abs:
      return "abs(" + print(e.arg(), 0) + ")";
    case Op::Atan2:
      return "atan2(" + print(e.arg(0), 0) + ", " + print(e.arg(1), 0) + ")";
    case Op::Min:
    case Op::Max: {
      std::string s = e.op() == Op::Min ? "min(" : "max(";
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        if (i) s += ", ";
        s += print(e.args()[i], 0);
      }
      return s + ")";
    }
  }
  return "?";
}

}  // namespace detail

/// Source text that parses back to a structurally equal tree.
inline std::string to_string(const Expr& e) { return detail::print(e, 0); }

// ---------------------------------------------------------------------------
// Parsing
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ['^' exponent]
//   exponent := integer ['/' integer] | '-' integer ['/' integer]
//             | '(' ['-'] integer ['/' integer] ')'
//   atom   := rational | 'x' digits | func '(' expr {',' expr} ')' | '(' expr ')'
//
// A rational literal is written without internal spaces ("3/2"); "sqrt(e)"
// is sugar for e^(1/2).

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::invalid_argument(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  bool at_digit() const {
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  std::string digits() {
    std::size_t start = pos_;
    while (at_digit()) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  // Literal at pos_: digits ['.' digits] or digits '/' digits (no spaces).
  Rational number_literal(bool negative) {
    std::size_t start = pos_;
    std::string whole = digits();
    Rational value;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      std::string frac = digits();
      value = parse_rational(whole + "." + frac);
    } else if (pos_ + 1 < text_.size() && text_[pos_] == '/' &&
               std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      std::string den = digits();
      if (Integer(den) == 0) {
        pos_ = start;
        fail("zero denominator in rational literal");
      }
      value = Rational(Integer(whole), Integer(den));
    } else {
      value = Rational(Integer(whole));
    }
    return negative ? Rational(-value) : value;
  }

  Rational exponent_literal() {
    skip_space();
    bool paren = accept('(');
    skip_space();
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    if (!at_digit()) fail("non-rational exponent literal");
    std::size_t start = pos_;
    Rational q = number_literal(negative);
    if (pos_ > start && text_.substr(start, pos_ - start).find('.') != std::string_view::npos)
      fail("non-rational exponent literal");
    if (paren) {
      skip_space();
      if (!accept(')')) fail("non-rational exponent literal");
    }
    return q;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = lhs + parse_term();
      else if (accept('-')) lhs = lhs - parse_term();
      else return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = lhs * parse_unary();
      else if (accept('/')) lhs = lhs / parse_unary();
      else return lhs;
    }
  }

  Expr parse_unary() {
    if (accept('-')) {
      if (at_digit()) {
        Expr lit = Expr::constant(number_literal(true));
        return parse_power_suffix(std::move(lit));
      }
      return -parse_unary();
    }
    return parse_power_suffix(parse_atom());
  }

  Expr parse_power_suffix(Expr base) {
    if (accept('^')) return Expr::pow(std::move(base), exponent_literal());
    return base;
  }

  Expr parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (at_digit()) return Expr::constant(number_literal(false));
    if (accept('(')) {
      Expr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      if (name.size() > 1 && name[0] == 'x' &&
          std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        std::size_t index = std::stoul(name.substr(1));
        if (index == 0 || name[1] == '0') {
          pos_ = start;
          fail("variable index must be a positive integer");
        }
        return Expr::var(index);
      }
      return parse_call(name, start);
    }
    fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
  }

  Expr parse_call(const std::string& name, std::size_t start) {
    static const char* known[] = {"log", "exp", "sqrt", "abs", "min", "max", "atan2"};
    if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return name == k; })) {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    expect('(');
    std::vector<Expr> args{parse_expr()};
    while (accept(',')) args.push_back(parse_expr());
    expect(')');
    auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        pos_ = start;
        fail(name + " takes " + std::to_string(n) + " argument(s)");
      }
    };
    if (name == "log") { arity(1); return Expr::log(args[0]); }
    if (name == "exp") { arity(1); return Expr::exp(args[0]); }
    if (name == "sqrt") { arity(1); return Expr::sqrt(args[0]); }
    if (name == "abs") { arity(1); return Expr::abs(args[0]); }
    if (name == "atan2") { arity(2); return Expr::atan2(args[0], args[1]); }
    if (args.size() < 2) {
      pos_ = start;
      fail(name + " takes at least two arguments");
    }
    return Expr::extremum(name == "min" ? Op::Min : Op::Max, std::move(args));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text`; when `arity` is nonzero, variable indices above it are
/// rejected.
inline Expr parse(std::string_view text, std::size_t arity = 0) {
  Expr e = detail::Parser(text).parse_all();
  if (arity != 0 && max_var_index(e) > arity)
    throw ParseError("variable x" + std::to_string(max_var_index(e)) +
                         " exceeds declared arity " + std::to_string(arity),
                     0);
  return e;
}

// ---------------------------------------------------------------------------
// Evaluation

enum class EvalStatus { Defined, OutOfDomain };

template <class T>
struct EvalResult {
  T value{};
  EvalStatus status = EvalStatus::Defined;
  bool defined() const { return status == EvalStatus::Defined; }
};

namespace detail {

template <class T>
T rational_as(const Rational& q) {
  if constexpr (std::is_same_v<T, double>) return to_double(q);
  else return T(q);
}

template <class T>
std::optional<T> eval_node(const Expr& e, std::span<const T> point) {
  using std::abs;
  using std::atan2;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sqrt;
  auto child = [&](std::size_t i) { return eval_node<T>(e.args()[i], point); };
  switch (e.op()) {
    case Op::Const:
      return rational_as<T>(e.value());
    case Op::Var:
      if (e.index() > point.size()) throw std::invalid_argument("eval: point has too few coordinates");
      return point[e.index() - 1];
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      auto a = child(0);
      if (!a) return std::nullopt;
      auto b = child(1);
      if (!b) return std::nullopt;
      switch (e.op()) {
        case Op::Add: return T(*a + *b);
        case Op::Sub: return T(*a - *b);
        case Op::Mul: return T(*a * *b);
        default:
          if (*b == 0) return std::nullopt;
          return T(*a / *b);
      }
    }
    case Op::Neg: {
      auto a = child(0);
      if (!a) return std::nullopt;
      return T(-*a);
    }
    case Op::Pow: {
      auto b = child(0);
      if (!b) return std::nullopt;
      const Rational& q = e.exponent();
      if (q == 0) return T(1);
      if (is_integer(q)) {
        if (*b == 0 && q < 0) return std::nullopt;
        return T(pow(*b, rational_as<T>(q)));
      }
      if (*b < 0) return std::nullopt;
      if (*b == 0) return q > 0 ? std::optional<T>(T(0)) : std::nullopt;
      if (q == Rational(1, 2)) return T(sqrt(*b));
      return T(pow(*b, rational_as<T>(q)));
    }
    case Op::Log: {
      auto a = child(0);
      if (!a || *a <= 0) return std::nullopt;
      return T(log(*a));
    }
    case Op::Exp: {
      auto a = child(0);
      if (!a) return std::nullopt;
      return T(exp(*a));
    }
    case Op::Abs: {
      auto a = child(0);
      if (!a) return std::nullopt;
      return T(abs(*a));
    }
    case Op::Atan2: {
      auto y = child(0);
      if (!y) return std::nullopt;
      auto x = child(1);
      if (!x) return std::nullopt;
      return T(atan2(*y, *x));
    }
    case Op::Min:
    case Op::Max: {
      std::optional<T> best;
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        auto v = child(i);
        if (!v) return std::nullopt;
        if (!best || (e.op() == Op::Min ? *v < *best : *v > *best)) best = *v;
      }
      return best;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Evaluates at `point` in the number type T (double or Real at the current
/// precision).
template <class T>
EvalResult<T> eval_as(const Expr& e, std::span<const T> point) {
  if (max_var_index(e) > point.size()) throw std::invalid_argument("eval: point dimension below arity");
  auto v = detail::eval_node<T>(e, point);
  if (!v) return {T(0), EvalStatus::OutOfDomain};
  return {*v, EvalStatus::Defined};
}

/// Extra bits carried internally by eval so that rounding errors of the
/// individual nodes stay below the returned precision.
inline constexpr unsigned kEvalGuardBits = 32;

/// Evaluates at `point` and returns a value carrying `precision_bits`.
inline EvalResult<Real> eval(const Expr& e, std::span<const double> point,
                             unsigned precision_bits = kDefaultPrecisionBits) {
  if (precision_bits < kMinPrecisionBits)
    throw std::invalid_argument("eval: precision below 64 bits");
  EvalResult<Real> wide{Real(0), EvalStatus::OutOfDomain};
  {
    PrecisionScope guard(precision_bits + kEvalGuardBits);
    std::vector<Real> p;
    p.reserve(point.size());
    for (double x : point) p.emplace_back(x);
    wide = eval_as<Real>(e, std::span<const Real>(p));
  }
  PrecisionScope scope(precision_bits);
  return {rebase(wide.value), wide.status};
}

/// Exact rational value when the tree uses only field operations, integer
/// powers, abs, min and max; nullopt when out of domain or not rational.
inline std::optional<Rational> eval_exact(const Expr& e, std::span<const Rational> point) {
  auto child = [&](std::size_t i) { return eval_exact(e.args()[i], point); };
  switch (e.op()) {
    case Op::Const:
      return e.value();
    case Op::Var:
      if (e.index() > point.size()) throw std::invalid_argument("eval_exact: point dimension below arity");
      return point[e.index() - 1];
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      auto a = child(0);
      auto b = child(1);
      if (!a || !b) return std::nullopt;
      if (e.op() == Op::Add) return Rational(*a + *b);
      if (e.op() == Op::Sub) return Rational(*a - *b);
      if (e.op() == Op::Mul) return Rational(*a * *b);
      if (*b == 0) return std::nullopt;
      return Rational(*a / *b);
    }
    case Op::Neg: {
      auto a = child(0);
      if (!a) return std::nullopt;
      return Rational(-*a);
    }
    case Op::Abs: {
      auto a = child(0);
      if (!a) return std::nullopt;
      return *a < 0 ? Rational(-*a) : *a;
    }
    case Op::Pow: {
      if (!is_integer(e.exponent())) return std::nullopt;
      auto b = child(0);
      if (!b) return std::nullopt;
      long n = to_long(numerator(e.exponent()));
      if (n < 0 && *b == 0) return std::nullopt;
      Rational base = n < 0 ? Rational(1 / *b) : *b;
      Rational acc(1);
      for (long k = 0; k < std::abs(n); ++k) acc *= base;
      return acc;
    }
    case Op::Min:
    case Op::Max: {
      std::optional<Rational> best;
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        auto v = child(i);
        if (!v) return std::nullopt;
        if (!best || (e.op() == Op::Min ? *v < *best : *v > *best)) best = *v;
      }
      return best;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace logrowth
