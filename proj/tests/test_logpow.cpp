#include <compare>
#include <vector>

#include <gtest/gtest.h>

#include "logrowth/expr.hpp"
#include "logrowth/logpow.hpp"
#include "support.hpp"

using namespace logrowth;
using testing_support::Oracle;
using testing_support::Rng;

namespace {

using M = LogPowMonomial;

Oracle to_oracle(const Rational& q) {
  return Oracle(numerator(q).str()) / Oracle(denominator(q).str());
}

/// log m(e^L) computed in the oracle type: q0 L + q1 log L + q2 log log L ...
Oracle oracle_log_at_exp(const M& m, const Oracle& L) {
  Oracle acc = to_oracle(m[0]) * L;
  Oracle level = L;
  for (std::size_t j = 1; j <= m.depth(); ++j) {
    acc += to_oracle(m[j]) * log(level);
    level = log(level);
  }
  return acc;
}

/// Exponents from a small alphabet so that ties and equal prefixes are common.
M tiny_monomial(Rng& rng) {
  static const Rational alphabet[] = {Rational(-1), Rational(0), Rational(0), Rational(1, 2), Rational(1)};
  std::size_t len = static_cast<std::size_t>(rng.integer(1, 3));
  std::vector<Rational> q;
  for (std::size_t j = 0; j < len; ++j) q.push_back(alphabet[rng.integer(0, 4)]);
  return M(q);
}

/// q0 = p/d with d <= 4, and |q_{j+1}| <= |q_j| <= 4 for the log exponents.
/// At x = e^200 this keeps each exponent numerically dominant over the
/// deeper ones (log_2 200 = 5.3, log_3 = 1.7, log_4 = 0.5), and the
/// non-integer gap of q0 (at least 50 in log scale) above the whole tail.
M dominant_monomial(Rng& rng, std::size_t max_depth) {
  std::vector<Rational> q{Rational(rng.integer(-20, 20), rng.integer(1, 4))};
  std::size_t depth = static_cast<std::size_t>(rng.integer(0, static_cast<long>(max_depth)));
  long bound = 16;  // in quarters
  for (std::size_t j = 1; j <= depth; ++j) {
    long k = rng.integer(-bound, bound);
    q.push_back(Rational(k, 4));
    if (k != 0) bound = std::abs(k);
  }
  return M(q);
}

}  // namespace

TEST(LexCompare, Examples) {
  EXPECT_EQ(lex_compare(M{1, 0}, M{0, 5}), std::strong_ordering::greater);
  EXPECT_EQ(lex_compare(M{Rational(1, 2), -2}, M{Rational(1, 2), -3}), std::strong_ordering::greater);
  EXPECT_EQ(lex_compare(M{2, -1}, M{2, -1}), std::strong_ordering::equal);
  EXPECT_EQ(lex_compare(M{0, 0, 1}, M{0, 1}), std::strong_ordering::less);
  EXPECT_EQ(lex_compare(M{0, 0, -1}, M::unit()), std::strong_ordering::less);
}

TEST(Monomial, CanonicalForm) {
  EXPECT_EQ(M({1, 0, 0}).exponents().size(), 1u);
  EXPECT_EQ(M({0, 0, 0}), M::unit());
  EXPECT_TRUE(M({0, 0}).is_unit());
  EXPECT_EQ(M({0, 2, 0, 0}).depth(), 1u);
  EXPECT_EQ(M::iterated_log(2), M({0, 0, 1}));
}

TEST(Monomial, MulAndPowExamples) {
  EXPECT_EQ(mul(M{1, 2}, M{-1, 1}), M({0, 3}));
  EXPECT_EQ(pow(M{Rational(3, 2), 1}, Rational(2)), M({3, 2}));
  M m{Rational(-5, 3), 0, 7};
  EXPECT_EQ(mul(m, M::unit()), m);
  EXPECT_EQ(mul(M{1, -1}, M{-1, 1}), M::unit());
  EXPECT_EQ(pow(m, Rational(0)), M::unit());
}

TEST(Monomial, TextRoundTrip) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    M m = dominant_monomial(rng, 4);
    EXPECT_EQ(parse_monomial(to_string(m)), m) << to_string(m);
  }
  EXPECT_EQ(parse_monomial("x^(3/2) log^(-1) log_2^(2)"), M({Rational(3, 2), -1, 2}));
  EXPECT_EQ(parse_monomial("1"), M::unit());
  EXPECT_EQ(to_string(M{2, 1}), "x^(2) log");
}

TEST(IteratedExp, TableMatchesOracle) {
  PrecisionScope scope(128);
  IteratedExpTable table;
  EXPECT_EQ(table[0], Real(0));
  Oracle e = 0;
  for (std::size_t j = 1; j <= 4; ++j) {
    e = exp(e);
    Oracle got(table[j].str(45, std::ios_base::scientific));
    EXPECT_LT(testing_support::rel_err(got, e), Oracle(1e-35)) << j;
    EXPECT_EQ(table[j], exp(table[j - 1]));
  }
  EXPECT_THROW(table[IteratedExpTable::kMaxLevel + 1], std::out_of_range);
}

TEST(EvalMonomial, Examples) {
  PrecisionScope scope(128);
  Real e = real_e();
  EXPECT_LT(abs(eval_monomial(M{0, 1}, Real(e * e)) - 2), Real(1e-35));
  EXPECT_LT(abs(eval_monomial(M{1, 1}, e) - e), Real(1e-35));
  Real x = exp(Real(e * e));
  EXPECT_LT(abs(eval_monomial(M{0, 0, 1}, x) - 2), Real(1e-35));
  // The expression evaluator, from a double point near e^(e^2).
  double xd = to_double(x);
  Real via_expr = eval(parse("log(log(x1))"), std::vector<double>{xd}).value;
  EXPECT_LT(abs(via_expr - 2), Real(1e-14));
}

TEST(EvalMonomial, RequiresPositiveIteratedLogs) {
  PrecisionScope scope(128);
  EXPECT_THROW(eval_monomial(M{0, 0, 1}, Real(2)), std::domain_error);
  EXPECT_THROW(eval_monomial(M{0, 1}, Real(1)), std::domain_error);
  EXPECT_NO_THROW(eval_monomial(M{0, 0, 1}, Real(3)));
}

TEST(BoundExponent, Examples) {
  EXPECT_EQ(bound_exponent(M{2, -1}), 2);
  EXPECT_EQ(bound_exponent(M{2, 1}), 3);
  EXPECT_EQ(bound_exponent(M{Rational(3, 2), 7}), 2);
  EXPECT_EQ(bound_exponent(M{3}), 3);
  EXPECT_EQ(bound_exponent(M::unit()), 0);
  EXPECT_EQ(bound_exponent(M{Rational(-1, 2)}), 0);
  EXPECT_EQ(bound_exponent(M{0, 0, 1}), 1);
}

TEST(BoundExponent, XSquaredLogAgainstOracle) {
  // x^2 log x <= x^3 and > x^2 at e^10 and e^20.
  for (int L : {10, 20}) {
    Oracle log_m = oracle_log_at_exp(M{2, 1}, Oracle(L));
    EXPECT_LE(log_m, Oracle(3 * L));
    EXPECT_GT(log_m, Oracle(2 * L));
  }
}

TEST(BoundExponent, ThreeHalvesLogSevenAgainstOracle) {
  // m(x)/x^2 is below 1 and strictly decreasing between e^100 and e^200.
  Oracle r100 = oracle_log_at_exp(M{Rational(3, 2), 7}, Oracle(100)) - 200;
  Oracle r200 = oracle_log_at_exp(M{Rational(3, 2), 7}, Oracle(200)) - 400;
  EXPECT_LT(r100, 0);
  EXPECT_LT(r200, r100);
  PrecisionScope scope(256);
  Real x = exp(Real(200));
  Real ratio = eval_monomial(M{Rational(3, 2), 7}, x) / (x * x);
  Oracle from_lib(ratio.str(40, std::ios_base::scientific));
  EXPECT_LT(testing_support::rel_err(from_lib, Oracle(exp(r200))), Oracle(1e-30));
}

TEST(Properties, LexCompareIsATotalOrder) {
  Rng rng(10007);
  for (int i = 0; i < 10000; ++i) {
    M a = tiny_monomial(rng), b = tiny_monomial(rng), c = tiny_monomial(rng);
    auto ab = lex_compare(a, b), ba = lex_compare(b, a);
    // Totality and antisymmetry.
    ASSERT_TRUE(ab == std::strong_ordering::less || ab == std::strong_ordering::equal ||
                ab == std::strong_ordering::greater);
    ASSERT_EQ(ab == std::strong_ordering::less, ba == std::strong_ordering::greater);
    ASSERT_EQ(ab == std::strong_ordering::equal, a.exponents() == b.exponents());
    // Transitivity.
    if (a <= b && b <= c) {
      ASSERT_TRUE(a <= c) << to_string(a) << " " << to_string(b) << " " << to_string(c);
    }
    if (a < b && b < c) {
      ASSERT_TRUE(a < c);
    }
    // Compatibility with multiplication.
    ASSERT_EQ(lex_compare(mul(a, c), mul(b, c)), ab);
  }
}

TEST(Properties, OrderMatchesEvaluation) {
  // m1 < m2 => m1/m2 decreases along e^10, e^20, e^40, e^80. The pair is
  // m2 = m1 * d with d > 1 dominant, so the ratio is 1/d on the schedule.
  Rng rng(271828);
  PrecisionScope scope(128);
  for (int i = 0; i < 1000; ++i) {
    M m1 = dominant_monomial(rng, 3);
    std::vector<Rational> dq;
    long lead = rng.integer(0, 3);
    for (long j = 0; j < lead; ++j) dq.push_back(0);
    dq.push_back(Rational(rng.integer(1, 8), 4));
    Rational mag = dq.back();
    for (std::size_t j = dq.size(); j <= 3; ++j) {
      mag /= 2;
      dq.push_back(rng.coin() ? mag : Rational(-mag));
    }
    M d(dq);
    M m2 = mul(m1, d);
    ASSERT_EQ(lex_compare(m1, m2), std::strong_ordering::less);
    Real prev = 0;
    bool first = true;
    for (int L : {10, 20, 40, 80}) {
      Real x = exp(Real(L));
      Real ratio = exp(Real(log_eval_monomial(m1, x) - log_eval_monomial(m2, x)));
      Oracle want = exp(oracle_log_at_exp(m1, Oracle(L)) - oracle_log_at_exp(m2, Oracle(L)));
      EXPECT_LT(testing_support::rel_err(Oracle(ratio.str(40, std::ios_base::scientific)), want), Oracle(1e-25));
      if (!first) {
        EXPECT_LT(ratio, prev) << to_string(m1) << " vs " << to_string(m2) << " at e^" << L;
      }
      prev = ratio;
      first = false;
    }
    EXPECT_LT(prev, Real(1));
  }
}

TEST(Properties, MulIsEvaluationHomomorphism) {
  Rng rng(1618);
  PrecisionScope scope(128);
  const Real x = exp(Real(10));
  for (int i = 0; i < 1000; ++i) {
    // e^10 exceeds e_3, so depth up to 3 is admissible.
    M a = dominant_monomial(rng, 3), b = dominant_monomial(rng, 3);
    Real lhs = eval_monomial(mul(a, b), x);
    Real rhs = eval_monomial(a, x) * eval_monomial(b, x);
    EXPECT_LE(abs(lhs - rhs) / abs(rhs), Real(1e-20)) << to_string(a) << " * " << to_string(b);
    Rational q(rng.integer(-6, 6), rng.integer(1, 3));
    Real p = eval_monomial(pow(a, q), x);
    Real pw = pow(eval_monomial(a, x), Real(q));
    EXPECT_LE(abs(p - pw) / abs(pw), Real(1e-20));
  }
}

TEST(Properties, BoundExponentMinimalAtExp200) {
  Rng rng(200);
  PrecisionScope scope(256);
  const Real x = exp(Real(200));
  const Oracle L(200);
  int exact_cases = 0;
  for (int i = 0; i < 1000; ++i) {
    M m = dominant_monomial(rng, 3);
    if (i % 10 == 0) m = M::power(Rational(rng.integer(-5, 5)));
    long N = bound_exponent(m);
    Oracle log_m = oracle_log_at_exp(m, L);
    // Upper bound m(x) <= x^N.
    EXPECT_LE(log_m, Oracle(N) * L) << to_string(m);
    bool exact = m.depth() == 0 && m[0] == N;
    if (exact) {
      ++exact_cases;
      EXPECT_EQ(log_m, Oracle(N) * L);
    } else {
      // Minimality: m(x) > x^(N-1).
      EXPECT_GT(log_m, Oracle(N - 1) * L) << to_string(m);
    }
    // The library's extended-precision log agrees with the oracle.
    Oracle lib(log_eval_monomial(m, x).str(60, std::ios_base::scientific));
    EXPECT_LT(abs(Oracle(lib - log_m)), Oracle(1e-45) * (1 + abs(log_m)));
  }
  EXPECT_GE(exact_cases, 50);
}
