#pragma once

/// \file
/// Unary prepared forms f = a m(x) u(x) with 0 <= u <= d beyond t, the
/// polynomial-growth classifier built on them, and an independent numeric
/// slope oracle.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "logrowth/adaptive.hpp"
#include "logrowth/certificate.hpp"
#include "logrowth/expr.hpp"
#include "logrowth/logpow.hpp"
#include "logrowth/optimize.hpp"
#include "logrowth/series.hpp"

namespace logrowth {

// ---------------------------------------------------------------------------
// Sampling helpers

/// n points log-spaced over [lo, hi]; lo itself is included when `include_lo`.
inline std::vector<double> log_spaced(double lo, double hi, std::size_t n, bool include_lo = true) {
  std::vector<double> out;
  if (n == 0) return out;
  double a = std::log(lo);
  double b = std::log(hi);
  std::size_t first = include_lo ? 0 : 1;
  std::size_t steps = include_lo ? std::max<std::size_t>(n - 1, 1) : n;
  for (std::size_t i = first; i < first + n; ++i)
    out.push_back(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(steps)));
  if (include_lo) out.front() = lo;
  out.back() = hi;
  return out;
}

/// e_k as a double (e_5 does not fit).
inline double iterated_exp_double(std::size_t k) {
  double v = 0.0;
  for (std::size_t j = 0; j < k; ++j) v = std::exp(v);
  return v;
}

/// Threshold candidates: e, 10, 100, ..., 10^12, then sparser decades.
inline std::vector<double> threshold_candidates(std::size_t k) {
  std::vector<double> base = {std::numbers::e};
  for (int p = 1; p <= 12; ++p) base.push_back(std::pow(10.0, p));
  for (int p : {15, 20, 30, 50, 100}) base.push_back(std::pow(10.0, p));
  double floor = iterated_exp_double(k);
  std::vector<double> out;
  for (double c : base)
    if (c > floor) out.push_back(c);
  if (out.empty()) out = {2.0 * floor, 10.0 * floor};
  return out;
}

struct PrepareOptions {
  std::size_t depth = 4;            ///< K, terms kept per series
  std::size_t max_depth = 32;       ///< retry ceiling on DepthExhausted
  std::size_t tail_samples = 64;
  std::size_t unit_samples = 48;
  double tail_margin = 1.25;
  double unit_target = 1.01;        ///< preferred bound on sup u
  unsigned max_bits = 8192;
};

// ---------------------------------------------------------------------------
// MultiSeries

struct MultiSeries {
  Series series;
  /// Remainder scale; absent for an exact (finite) expansion.
  std::optional<LogPowMonomial> tail;
  double d = 0.0;
  double t = 0.0;
  std::size_t depth = 0;  ///< K used
  std::size_t k = 0;      ///< deepest iterated log involved
};

/// log|sum c_i m_i(x)| terms evaluated at the ambient precision.
inline Real series_value(const Series& s, const Real& x) {
  Real v = 0;
  for (const Term& t : s.terms) v += Real(t.c.value()) * eval_monomial(t.m, x);
  return v;
}

/// Sum of coefficient radii times monomials: the slack from inexact
/// coefficients.
inline Real series_radius(const Series& s, const Real& x) {
  Real v = 0;
  for (const Term& t : s.terms)
    if (!t.c.exact()) v += Real(t.c.radius()) * eval_monomial(t.m, x);
  return v;
}

namespace detail {

inline Series expand_at(const Expr& e, std::size_t K, unsigned bits) {
  PrecisionScope scope(bits);
  return expand_series(e, K);
}

inline void require_unary_fragment(const Expr& e) {
  if (!is_log_analytic(e)) throw OutOfFragment("expression contains exp");
  if (max_var_index(e) > 1) throw OutOfFragment("expression is not unary");
}

/// Whether e is defined (adaptively) at every point.
inline bool defined_on(const Expr& e, std::span<const double> xs) {
  for (double x : xs) {
    double p[1] = {x};
    if (!adaptive_eval(e, p)) return false;
  }
  return true;
}

/// Bits needed so the residual f - S survives cancellation at x.
inline unsigned residual_bits(const Series& s, const LogPowMonomial& tail, double x) {
  PrecisionScope scope(kDefaultPrecisionBits);
  Real rx(x);
  double top = -std::numeric_limits<double>::infinity();
  for (const Term& t : s.terms)
    top = std::max(top, to_double(log_eval_monomial(t.m, rx)) + std::log(std::abs(t.c.approx()) + 1e-300));
  double gap = (top - to_double(log_eval_monomial(tail, rx))) / std::numbers::ln2;
  return static_cast<unsigned>(std::max(0.0, gap)) + 96;
}

}  // namespace detail

/// Threshold and tail constant for a series of e, by sampling.
inline void fit_tail(const Expr& e, MultiSeries& ms, const PrepareOptions& opt) {
  ms.k = ms.series.max_depth();
  std::vector<double> candidates = threshold_candidates(ms.k);
  ms.t = candidates.front();
  for (double c : candidates) {
    std::vector<double> probe = log_spaced(c, std::max(1e12, c * 1e6), 12);
    if (detail::defined_on(e, probe)) {
      ms.t = c;
      break;
    }
  }
  if (!ms.tail) {
    // An exact expansion can still hold only eventually (a min/max branch
    // resolved by dominance), so t moves to where the samples agree.
    ms.d = 0.0;
    auto matches = [&](double c) {
      PrecisionScope scope(kCoefficientBits);
      for (double x : log_spaced(c, std::max(1e12, c * 1e6), opt.tail_samples)) {
        Real rx(x);
        Real p[1] = {rx};
        auto f = eval_as<Real>(e, std::span<const Real>(p));
        if (!f.defined()) return false;
        Real slack = series_radius(ms.series, rx) + abs(f.value) * Real(1e-30);
        if (abs(f.value - series_value(ms.series, rx)) > slack) return false;
      }
      return true;
    };
    for (double c : candidates) {
      if (c < ms.t) continue;
      if (matches(c)) {
        ms.t = c;
        return;
      }
    }
    throw OutOfFragment("exact expansion disagrees with the expression at every threshold candidate");
  }
  std::vector<double> xs = log_spaced(ms.t, std::max(1e12, ms.t * 1e6), opt.tail_samples);
  unsigned need = kCoefficientBits;
  for (double x : xs) need = std::max(need, detail::residual_bits(ms.series, *ms.tail, x));
  need = std::min(need, opt.max_bits);
  if (need > kCoefficientBits) ms.series = detail::expand_at(e, ms.depth, need + 64);

  double worst = 0.0;
  for (double x : xs) {
    AdaptiveOptions aopt;
    aopt.start_bits = std::min(opt.max_bits, detail::residual_bits(ms.series, *ms.tail, x));
    aopt.max_bits = opt.max_bits;
    auto residual = adaptive(
        [&](unsigned bits) -> std::optional<SignedLog> {
          PrecisionScope scope(bits);
          Real rx(x);
          Real p[1] = {rx};
          auto f = eval_as<Real>(e, std::span<const Real>(p));
          if (!f.defined()) return std::nullopt;
          Real r = abs(f.value - series_value(ms.series, rx)) + series_radius(ms.series, rx);
          return signed_log(r / eval_monomial(*ms.tail, rx));
        },
        aopt);
    if (!residual) throw OutOfFragment("expression undefined at a tail sample point");
    if (residual->sign != 0) worst = std::max(worst, std::exp(residual->log_abs));
  }
  ms.d = opt.tail_margin * worst;
}

/// Truncated multiseries with at most K terms, remainder scale, tail
/// constant d and threshold t.
inline MultiSeries expand(const Expr& e, std::size_t K, const PrepareOptions& opt = {}) {
  if (K < 1) throw std::invalid_argument("expand: depth must be at least 1");
  detail::require_unary_fragment(e);
  MultiSeries ms;
  ms.depth = K;
  ms.series = detail::expand_at(e, K, kCoefficientBits);
  ms.tail = ms.series.order;
  fit_tail(e, ms, opt);
  return ms;
}

// ---------------------------------------------------------------------------
// Prepared form

struct UnitSample {
  double x;
  double u;
};

struct PreparedForm {
  Coefficient a;
  LogPowMonomial m;
  double d = 0.0;
  double t = 0.0;
  MultiSeries series;
  std::vector<UnitSample> samples;
  /// u values are in [0, d] at every sample.
  bool validated = false;
};

/// Sample points for unit checks: a few just above t, log-spaced in
/// (t, max(1e12, 1e6 t)], and e^(10 2^j) for j = 0..5 beyond t.
inline std::vector<double> unit_sample_points(double t, std::size_t n) {
  std::vector<double> xs = log_spaced(t, std::max(1e12, t * 1e6), n, false);
  for (double f : {1e-9, 1e-4, 1e-2, 1e-1}) xs.push_back(t * (1.0 + f));
  for (int j = 0; j <= 5; ++j) {
    double x = std::exp(10.0 * std::ldexp(1.0, j));
    if (x > t) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

/// u(x) = f(x) / (a m(x)) adaptively; nullopt when f is undefined at x.
inline std::optional<double> unit_value(const Expr& e, const Coefficient& a, const LogPowMonomial& m,
                                        double x, unsigned max_bits = 8192) {
  AdaptiveOptions opt;
  opt.max_bits = max_bits;
  opt.rel_tol = 1e-12;
  auto u = adaptive(
      [&](unsigned bits) -> std::optional<SignedLog> {
        PrecisionScope scope(bits);
        Real rx(x);
        Real p[1] = {rx};
        auto f = eval_as<Real>(e, std::span<const Real>(p));
        if (!f.defined()) return std::nullopt;
        return signed_log(f.value / (Real(a.value()) * eval_monomial(m, rx)));
      },
      opt);
  if (!u) return std::nullopt;
  if (u->sign == 0) return 0.0;
  return u->sign * std::exp(u->log_abs);
}

namespace detail {

inline MultiSeries expand_with_retry(const Expr& e, const PrepareOptions& opt) {
  for (std::size_t K = opt.depth;; K *= 2) {
    try {
      MultiSeries ms = expand(e, K, opt);
      if (ms.series.terms.empty() && ms.series.order)
        throw DepthExhausted("only a remainder term survived");
      return ms;
    } catch (const DepthExhausted&) {
      if (K * 2 > opt.max_depth) throw;
    }
  }
}

}  // namespace detail

inline PreparedForm prepared_form(const Expr& e, const PrepareOptions& opt = {}) {
  PreparedForm pf;
  pf.series = detail::expand_with_retry(e, opt);
  if (pf.series.series.is_exact_zero()) {
    pf.a = Coefficient(0L);
    pf.m = LogPowMonomial::unit();
    pf.d = 0.0;
    pf.t = pf.series.t;
    pf.validated = true;
    return pf;
  }
  const Term& lead = pf.series.series.terms.front();
  pf.a = lead.c;
  pf.m = lead.m;

  // First candidate with u >= 0 and sup u close to 1; else the first with
  // u >= 0. Never below e_k or below the series threshold.
  std::optional<PreparedForm> fallback;
  for (double c : threshold_candidates(pf.series.k)) {
    if (c < pf.series.t) continue;
    std::vector<UnitSample> samples;
    bool ok = true;
    double sup = 0.0;
    for (double x : unit_sample_points(c, opt.unit_samples)) {
      auto u = unit_value(e, pf.a, pf.m, x, opt.max_bits);
      if (!u || *u < 0.0) {
        ok = false;
        break;
      }
      samples.push_back({x, *u});
      sup = std::max(sup, *u);
    }
    if (!ok) continue;
    // An interior maximum of u can fall between samples: refine the
    // largest sampled peaks in log x.
    std::vector<double> us;
    for (const UnitSample& s : samples) us.push_back(s.u);
    std::vector<UnitSample> refined;
    for (std::size_t i : top_local_maxima(us, 4, false)) {
      if (i == 0 || i + 1 >= samples.size()) continue;
      auto u_at = [&](double lx) {
        auto u = unit_value(e, pf.a, pf.m, std::exp(lx), opt.max_bits);
        return u ? *u : -std::numeric_limits<double>::infinity();
      };
      auto ext = golden_section_max(u_at, std::log(samples[i - 1].x), std::log(samples[i + 1].x), 60);
      if (ext.value > us[i]) refined.push_back({std::exp(ext.arg), ext.value});
    }
    for (const UnitSample& s : refined) sup = std::max(sup, s.u);
    samples.insert(samples.end(), refined.begin(), refined.end());
    std::sort(samples.begin(), samples.end(), [](const UnitSample& a, const UnitSample& b) { return a.x < b.x; });
    PreparedForm candidate = pf;
    candidate.t = c;
    candidate.d = std::max(sup, 1.0);
    candidate.samples = std::move(samples);
    candidate.validated = true;
    if (sup <= opt.unit_target) return candidate;
    if (!fallback) fallback = std::move(candidate);
  }
  if (fallback) return *fallback;
  throw OutOfFragment("unit check failed at every threshold candidate");
}

// ---------------------------------------------------------------------------
// Numeric oracle

enum class OracleTrend { Stable, Diverging, Increasing, Decreasing, Erratic, Insufficient };

inline std::string to_string(OracleTrend t) {
  switch (t) {
    case OracleTrend::Stable: return "stable";
    case OracleTrend::Diverging: return "diverging";
    case OracleTrend::Increasing: return "increasing";
    case OracleTrend::Decreasing: return "decreasing";
    case OracleTrend::Erratic: return "erratic";
    case OracleTrend::Insufficient: return "insufficient";
  }
  return "?";
}

struct OracleWindow {
  double x0;
  double x1;
  /// log|f(x1)/f(x0)| / log(x1/x0); absent where f vanishes or is undefined.
  std::optional<double> slope;
};

struct OracleReport {
  std::vector<OracleWindow> windows;
  OracleTrend trend = OracleTrend::Insufficient;
  /// Last slope when the trend is stable.
  std::optional<double> estimate;
};

inline constexpr double kStableSpread = 0.1;

/// 10^(3 2^j), j = 0..4: 1e3, 1e6, 1e12, 1e24, 1e48.
inline std::vector<double> default_oracle_schedule() {
  std::vector<double> xs;
  for (int j = 0; j <= 4; ++j) xs.push_back(std::pow(10.0, 3.0 * std::ldexp(1.0, j)));
  return xs;
}

/// Classifies a slope sequence: stable when the last three lie within the
/// spread, diverging when they grow with non-shrinking increments or an
/// overflow is reached.
inline OracleTrend slope_trend(const std::vector<OracleWindow>& windows, double spread = kStableSpread) {
  std::vector<double> s;
  for (const OracleWindow& w : windows)
    if (w.slope) s.push_back(*w.slope);
  if (s.size() < 3) return OracleTrend::Insufficient;
  std::size_t n = s.size();
  double a = s[n - 3], b = s[n - 2], c = s[n - 1];
  auto first_inf = std::find_if(s.begin(), s.end(), [](double x) { return std::isinf(x); });
  if (first_inf != s.end()) {
    bool tail_inf = std::all_of(first_inf, s.end(), [](double x) { return std::isinf(x) && x > 0; });
    bool prefix_nondecreasing = std::is_sorted(s.begin(), first_inf);
    if (tail_inf && prefix_nondecreasing) return OracleTrend::Diverging;
    return OracleTrend::Erratic;
  }
  double hi = std::max({a, b, c});
  double lo = std::min({a, b, c});
  if (hi - lo < spread) return OracleTrend::Stable;
  if (a < b && b < c) return (c - b >= b - a) ? OracleTrend::Diverging : OracleTrend::Increasing;
  if (a > b && b > c) return OracleTrend::Decreasing;
  return OracleTrend::Erratic;
}

/// Oracle over precomputed signed logs of f at the schedule points.
inline OracleReport oracle_from_logs(std::span<const double> schedule,
                                     std::span<const std::optional<SignedLog>> logs) {
  OracleReport rep;
  for (std::size_t j = 0; j + 1 < schedule.size(); ++j) {
    OracleWindow w{schedule[j], schedule[j + 1], std::nullopt};
    const auto& f0 = logs[j];
    const auto& f1 = logs[j + 1];
    if (f0 && f1 && f0->sign != 0 && f1->sign != 0) {
      if (std::isinf(f1->log_abs)) w.slope = std::numeric_limits<double>::infinity();
      else if (!std::isinf(f0->log_abs))
        w.slope = (f1->log_abs - f0->log_abs) / std::log(schedule[j + 1] / schedule[j]);
    }
    rep.windows.push_back(w);
  }
  rep.trend = slope_trend(rep.windows);
  if (rep.trend == OracleTrend::Stable) {
    for (auto it = rep.windows.rbegin(); it != rep.windows.rend(); ++it)
      if (it->slope) {
        rep.estimate = *it->slope;
        break;
      }
  }
  return rep;
}

inline OracleReport numeric_growth_oracle(const Expr& e, std::span<const double> schedule = {}) {
  std::vector<double> xs(schedule.begin(), schedule.end());
  if (xs.empty()) xs = default_oracle_schedule();
  if (max_var_index(e) > 1) throw std::invalid_argument("oracle: expression is not unary");
  std::vector<std::optional<SignedLog>> logs;
  bool any = false;
  for (double x : xs) {
    double p[1] = {x};
    logs.push_back(adaptive_eval(e, p));
    any = any || logs.back().has_value();
  }
  if (!any) throw std::domain_error("oracle: expression undefined at every schedule point");
  return oracle_from_logs(xs, logs);
}

// ---------------------------------------------------------------------------
// Classifier

enum class GrowthKind { PolyBounded, SuperPolynomial, Unknown };

inline std::string to_string(GrowthKind k) {
  switch (k) {
    case GrowthKind::PolyBounded: return "PolyBounded";
    case GrowthKind::SuperPolynomial: return "SuperPolynomial";
    case GrowthKind::Unknown: return "Unknown";
  }
  return "?";
}

struct GrowthClass {
  GrowthKind kind = GrowthKind::Unknown;
  long N = 0;
  std::optional<PreparedForm> prepared;
  std::optional<GrowthCertificate> certificate;
  std::optional<OracleReport> oracle;
  /// Why the symbolic route did not apply, when it did not.
  std::string reason;
};

/// Certificate |f(x)| <= d_c x^N for x > t from a prepared form:
/// d_c = |a| d sup m(x)/x^N over the samples.
inline GrowthCertificate unary_certificate(const Expr& e, const PreparedForm& pf, long N) {
  GrowthCertificate cert;
  cert.mode = CertificateMode::Unary;
  cert.route = "symbolic";
  cert.N = N;
  cert.t = pf.t;
  if (pf.a.is_zero()) {
    cert.d = 1.0;
  } else {
    LogPowMonomial xN = LogPowMonomial::power(Rational(N));
    double log_S = 0.0;
    if (!(pf.m == xN)) {
      PrecisionScope scope(kDefaultPrecisionBits);
      log_S = -std::numeric_limits<double>::infinity();
      for (const UnitSample& s : pf.samples) {
        Real rx(s.x);
        log_S = std::max(log_S, to_double(log_eval_monomial(div(pf.m, xN), rx)));
      }
      log_S = std::max(log_S, 0.0);
    }
    cert.d = std::abs(pf.a.approx()) * pf.d * std::exp(log_S) * (1.0 + 1e-9);
  }
  bool ok = true;
  for (double x : unit_sample_points(pf.t, 24)) {
    double p[1] = {x};
    auto f = adaptive_eval(e, p);
    if (!f) {
      ok = false;
      continue;
    }
    double log_bound = std::log(cert.d) + static_cast<double>(N) * std::log(x);
    if (f->sign != 0 && f->log_abs > log_bound + 1e-12) ok = false;
    double abs_f = f->sign == 0 ? 0.0 : std::exp(f->log_abs);
    double bound = std::exp(log_bound);
    if (std::isfinite(abs_f) && std::isfinite(bound)) cert.samples.push_back({x, abs_f, bound});
  }
  cert.validated = ok;
  return cert;
}

inline GrowthClass classify_growth(const Expr& e, const PrepareOptions& opt = {}) {
  GrowthClass gc;
  if (max_var_index(e) <= 1) {
    try {
      gc.oracle = numeric_growth_oracle(e);
    } catch (const std::domain_error&) {
    }
  }
  try {
    detail::require_unary_fragment(e);
    PreparedForm pf = prepared_form(e, opt);
    gc.N = pf.a.is_zero() ? 0 : bound_exponent(pf.m);
    gc.certificate = unary_certificate(e, pf, gc.N);
    gc.prepared = std::move(pf);
    gc.kind = GrowthKind::PolyBounded;
    return gc;
  } catch (const OutOfFragment& ex) {
    gc.reason = ex.what();
  } catch (const DepthExhausted& ex) {
    gc.reason = ex.what();
  }
  if (gc.oracle && gc.oracle->trend == OracleTrend::Diverging) gc.kind = GrowthKind::SuperPolynomial;
  return gc;
}

}  // namespace logrowth
