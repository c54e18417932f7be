#pragma once

// Shared test helpers: an oracle number type independent of MPFR, seeded
// generators, and relative-error helpers.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "logrowth/expr.hpp"

namespace testing_support {

/// 50 decimal digits in Boost's own binary float, so oracle values do not
/// share code with the library's MPFR path.
using Oracle = boost::multiprecision::cpp_bin_float_50;

/// 120 decimal digits, for residuals that cancel far below the leading term.
using WideOracle = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<120>>;

inline double rel_err(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

inline Oracle rel_err(const Oracle& got, const Oracle& want) {
  using boost::multiprecision::abs;
  if (want == 0) return abs(got);
  return abs(Oracle(got - want)) / abs(want);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen_); }
  bool coin() { return integer(0, 1) == 1; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Random small rational p/q with |p| <= 9, 1 <= q <= 4.
inline logrowth::Rational small_rational(Rng& rng, bool allow_zero = true) {
  while (true) {
    long p = rng.integer(-9, 9);
    long q = rng.integer(1, 4);
    if (p != 0 || allow_zero) return logrowth::Rational(p, q);
  }
}

/// Any grammar construct (including exp, atan2 and negation).
inline logrowth::Expr random_expr(Rng& rng, std::size_t arity, int depth) {
  using logrowth::Expr;
  using logrowth::Op;
  if (depth <= 0 || rng.integer(0, 3) == 0) {
    if (rng.coin()) return Expr::var(static_cast<std::size_t>(rng.integer(1, static_cast<long>(arity))));
    return Expr::constant(small_rational(rng));
  }
  switch (rng.integer(0, 11)) {
    case 0: return random_expr(rng, arity, depth - 1) + random_expr(rng, arity, depth - 1);
    case 1: return random_expr(rng, arity, depth - 1) - random_expr(rng, arity, depth - 1);
    case 2: return random_expr(rng, arity, depth - 1) * random_expr(rng, arity, depth - 1);
    case 3: return random_expr(rng, arity, depth - 1) / random_expr(rng, arity, depth - 1);
    case 4: return -random_expr(rng, arity, depth - 1);
    case 5: return Expr::pow(random_expr(rng, arity, depth - 1), small_rational(rng, false));
    case 6: return Expr::log(random_expr(rng, arity, depth - 1));
    case 7: return Expr::exp(random_expr(rng, arity, depth - 1));
    case 8: return Expr::abs(random_expr(rng, arity, depth - 1));
    case 9:
      return Expr::extremum(rng.coin() ? Op::Min : Op::Max,
                            {random_expr(rng, arity, depth - 1), random_expr(rng, arity, depth - 1)});
    case 10: return Expr::atan2(random_expr(rng, arity, depth - 1), random_expr(rng, arity, depth - 1));
    default: return Expr::sqrt(random_expr(rng, arity, depth - 1));
  }
}

/// Positive-valued, well-conditioned expressions (no cancellation): sums
/// and products of positive terms, positive powers, log(1 + .), max.
inline logrowth::Expr positive_expr(Rng& rng, std::size_t arity, int depth) {
  using logrowth::Expr;
  using logrowth::Op;
  using logrowth::Rational;
  if (depth <= 0 || rng.integer(0, 3) == 0) {
    if (rng.coin()) {
      Expr v = Expr::var(static_cast<std::size_t>(rng.integer(1, static_cast<long>(arity))));
      return Expr::pow(v, Rational(2)) + Expr::constant(Rational(rng.integer(1, 5), rng.integer(1, 3)));
    }
    return Expr::constant(Rational(rng.integer(1, 9), rng.integer(1, 4)));
  }
  switch (rng.integer(0, 5)) {
    case 0: return positive_expr(rng, arity, depth - 1) + positive_expr(rng, arity, depth - 1);
    case 1: return positive_expr(rng, arity, depth - 1) * positive_expr(rng, arity, depth - 1);
    case 2: return positive_expr(rng, arity, depth - 1) / positive_expr(rng, arity, depth - 1);
    case 3: return Expr::pow(positive_expr(rng, arity, depth - 1), small_rational(rng, false));
    case 4: return Expr::log(Expr::constant(1) + positive_expr(rng, arity, depth - 1));
    default:
      return Expr::extremum(Op::Max, {positive_expr(rng, arity, depth - 1), positive_expr(rng, arity, depth - 1)});
  }
}

/// Evaluates in the oracle type by a walk written independently of the
/// library evaluator; false when out of domain.
template <class O = Oracle>
bool oracle_eval(const logrowth::Expr& e, const std::vector<O>& x, O& out) {
  using logrowth::Op;
  using namespace boost::multiprecision;
  using Oracle = O;
  std::vector<Oracle> a;
  for (const auto& c : e.args()) {
    Oracle v;
    if (!oracle_eval(c, x, v)) return false;
    a.push_back(v);
  }
  auto q = [&](const logrowth::Rational& r) {
    return Oracle(numerator(r).str()) / Oracle(denominator(r).str());
  };
  switch (e.op()) {
    case Op::Const: out = q(e.value()); return true;
    case Op::Var: out = x.at(e.index() - 1); return true;
    case Op::Add: out = a[0] + a[1]; return true;
    case Op::Sub: out = a[0] - a[1]; return true;
    case Op::Mul: out = a[0] * a[1]; return true;
    case Op::Div:
      if (a[1] == 0) return false;
      out = a[0] / a[1];
      return true;
    case Op::Neg: out = -a[0]; return true;
    case Op::Pow: {
      const logrowth::Rational& p = e.value();
      if (denominator(p) == 1) {
        if (a[0] == 0 && p < 0) return false;
        out = pow(a[0], q(p));
        if (a[0] < 0) {
          long n = numerator(p).convert_to<long>();
          out = pow(Oracle(-a[0]), q(p));
          if (n % 2 != 0) out = -out;
        }
        return true;
      }
      if (a[0] < 0 || (a[0] == 0 && p < 0)) return false;
      out = pow(a[0], q(p));
      return true;
    }
    case Op::Log:
      if (!(a[0] > 0)) return false;
      out = log(a[0]);
      return true;
    case Op::Exp: out = exp(a[0]); return true;
    case Op::Abs: out = abs(a[0]); return true;
    case Op::Min:
    case Op::Max: {
      out = a[0];
      for (const Oracle& v : a) out = e.op() == Op::Min ? (v < out ? v : out) : (v > out ? v : out);
      return true;
    }
    case Op::Atan2:
      if (a[0] == 0 && a[1] == 0) return false;
      out = atan2(a[0], a[1]);
      return true;
  }
  return false;
}

/// Unary expressions in the normalizable fragment, with the growth
/// exponent N expected from their dominant monomial.
struct CorpusEntry {
  const char* text;
  long N;
};

inline const std::vector<CorpusEntry>& fragment_corpus() {
  static const std::vector<CorpusEntry> corpus = {
      {"x1^2*log(x1)", 3},
      {"x1^2*log(x1) + 5*x1*log(log(x1))^3", 3},
      {"log(x1^3 + x1)", 1},
      {"sqrt(x1^2 + log(x1))", 1},
      {"x1^(3/2)*log(x1)^7", 2},
      {"(x1^3 + 2*x1)/(x1 + 1)", 2},
      {"7", 0},
      {"log(log(x1))", 1},
      {"max(x1^2, x1*log(x1)^5)", 2},
      {"min(x1^3, x1^2*log(x1))", 3},
      {"abs(x1 - x1^2)", 2},
      {"x1^(-1/2) + log(x1)^(-1)", 0},
      {"(x1^2 + 1)^(1/3)", 1},
      {"log(x1)^2/x1 + 3", 0},
      {"x1*log(x1)/log(log(x1))", 2},
      {"(x1 + log(x1))^(5/2)", 3},
      {"log(1 + x1^4)/log(x1)", 0},
      {"1/(x1^2 + 1)", -2},
      {"x1^4 - x1^3*log(x1)", 4},
      {"sqrt(x1)*log(log(x1))^2 + x1^(1/3)", 1},
  };
  return corpus;
}

}  // namespace testing_support
