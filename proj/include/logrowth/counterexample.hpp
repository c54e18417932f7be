#pragma once

/// \file
/// The two-variable continuous log-analytic function whose maximum over the
/// circle of radius r is 2 exp(r)(r - 1): f(x, y) = g(x^2 + y^2, arg/(2 pi))
/// with g(x, y) = max{h(x, y/(1-y)), 1} for x > a, 0 < y < 1 and 1
/// otherwise, h(x, y) = -y((log y)^2 - 2 log y + 2 - x), and a the root of
/// 2 exp(sqrt a)(sqrt a - 1) = 1.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "logrowth/numeric.hpp"
#include "logrowth/optimize.hpp"
#include "logrowth/series.hpp"

namespace logrowth {

namespace detail {

template <class T>
T pi_as() {
  if constexpr (std::is_same_v<T, double>) return std::numbers::pi;
  else return real_pi();
}

}  // namespace detail

/// h(x, y) = -y((log y)^2 - 2 log y + 2 - x), defined for x > 1, y > 0.
template <class T>
T eval_h(const T& x, const T& y) {
  using std::log;
  if (!(x > T(1)) || !(y > T(0))) throw std::domain_error("h: requires x > 1 and y > 0");
  T l = log(y);
  return T(-y * (l * l - T(2) * l + T(2) - x));
}

/// d h / d y = x - (log y)^2.
template <class T>
T eval_h_dy(const T& x, const T& y) {
  using std::log;
  T l = log(y);
  return T(x - l * l);
}

/// alpha(x) = 2 exp(sqrt x)(sqrt x - 1) = max_y h(x, y), for x > 1.
template <class T>
T eval_alpha(const T& x) {
  using std::exp;
  using std::sqrt;
  if (!(x > T(1))) throw std::domain_error("alpha: requires x > 1");
  T s = sqrt(x);
  return T(T(2) * exp(s) * (s - T(1)));
}

struct CounterexampleParams {
  /// The root a, exactly as the dyadic rational computed at `precision`.
  Rational a;
  double a_double = 0.0;
  unsigned precision = kDefaultPrecisionBits;
  /// |alpha(a) - 1| at `precision`.
  double residual = 0.0;
};

/// Bisection for alpha(a) = 1 on [1 + 2^-20, 4].
inline CounterexampleParams find_a(unsigned precision_bits = kDefaultPrecisionBits) {
  PrecisionScope scope(precision_bits);
  Real lo = Real(1) + ldexp(Real(1), -20);
  Real hi = Real(4);
  Real root = bisect_increasing(
      [](const Real& x) { return Real(eval_alpha(x) - Real(1)); }, lo, hi,
      static_cast<int>(precision_bits) + 16);
  CounterexampleParams p;
  p.a = real_to_rational(root);
  p.a_double = to_double(root);
  p.precision = precision_bits;
  p.residual = to_double(abs(eval_alpha(root) - Real(1)));
  return p;
}

struct CircleMax {
  double value = 0.0;
  double angle = 0.0;
  /// Refined in extended precision; `value` is its rounding.
  std::string value_text;
};

struct CircleOptions {
  std::size_t grid = 4096;
  std::size_t starts = 8;
  int iterations = 170;
};

/// Value and argument of a one-dimensional maximization.
struct LineMax {
  double argmax = 0.0;
  double value = 0.0;
};

struct DerivativeCheck {
  double y;
  double finite_difference;
  double exact;
  bool ok;
};

struct Claim1Entry {
  double x;
  std::vector<DerivativeCheck> derivatives;
  LineMax maximum;
  double expected_argmax;
  double expected_max;
  bool argmax_ok;
  bool max_ok;
  double value_far;   ///< h(x, 1e6 exp(sqrt x)); must be negative
  double value_near;  ///< h(x, 1e-9); must be within 1e-3 of 0
  bool boundary_ok;
  bool ok() const {
    bool d = true;
    for (const auto& c : derivatives) d = d && c.ok;
    return d && argmax_ok && max_ok && boundary_ok;
  }
};

struct Claim1Report {
  std::vector<Claim1Entry> entries;
  bool ok() const {
    for (const auto& e : entries)
      if (!e.ok()) return false;
    return true;
  }
};

struct LimitSequence {
  std::string name;
  double anchor;  ///< b or c, depending on the limit
  std::vector<double> eps;
  std::vector<double> values;
  bool ok;
};

struct Claim2Report {
  std::vector<LimitSequence> limits;
  bool ok() const {
    for (const auto& l : limits)
      if (!l.ok) return false;
    return true;
  }
};

class Counterexample {
 public:
  explicit Counterexample(unsigned precision_bits = kDefaultPrecisionBits)
      : params_(find_a(precision_bits)) {}
  explicit Counterexample(CounterexampleParams params) : params_(std::move(params)) {}

  const CounterexampleParams& params() const { return params_; }
  unsigned precision() const { return params_.precision; }

  template <class T>
  T a() const {
    if constexpr (std::is_same_v<T, double>) return params_.a_double;
    else return T(params_.a);
  }

  /// g on [0, inf) x [0, 1].
  template <class T>
  T g(const T& x, const T& y) const {
    if (x < T(0) || y < T(0) || y > T(1)) throw std::domain_error("g: requires x >= 0, 0 <= y <= 1");
    if (x > a<T>() && y > T(0) && y < T(1)) {
      T v = eval_h(x, T(y / (T(1) - y)));
      return v > T(1) ? v : T(1);
    }
    return T(1);
  }

  /// Angle in [0, 2 pi) with arg((1, 0)) = 0, counterclockwise.
  template <class T>
  static T arg(const T& x, const T& y) {
    using std::atan2;
    T t = atan2(y, x);
    if (t < T(0)) t += T(2) * detail::pi_as<T>();
    if (t >= T(2) * detail::pi_as<T>()) t = T(0);
    return t;
  }

  template <class T>
  T f(const T& x, const T& y) const {
    if (x == T(0) && y == T(0)) return T(1);
    T two_pi = T(2) * detail::pi_as<T>();
    return g(T(x * x + y * y), T(arg(x, y) / two_pi));
  }

  /// f on the circle of radius r at angle theta.
  template <class T>
  T on_circle(const T& r, const T& theta) const {
    using std::cos;
    using std::sin;
    return f(T(r * cos(theta)), T(r * sin(theta)));
  }

  /// gamma(r) = max |f| on the circle: coarse grid, then golden-section
  /// refinement from the largest cyclic local maxima.
  CircleMax max_on_circle(double r, const CircleOptions& opt = {}) const {
    if (!(r > 0.0)) throw std::domain_error("max_on_circle: requires r > 0");
    const double two_pi = 2.0 * std::numbers::pi;
    std::size_t n = std::max<std::size_t>(opt.grid, 3);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i)
      values[i] = on_circle(r, two_pi * static_cast<double>(i) / static_cast<double>(n));
    PrecisionScope scope(params_.precision);
    Real R(r);
    Real step = Real(2) * real_pi() / Real(static_cast<double>(n));
    Real best_value(values[0]);
    Real best_angle(0);
    for (std::size_t i : top_local_maxima(values, opt.starts, true)) {
      Real lo = step * Real(static_cast<double>(i)) - step;
      Real hi = step * Real(static_cast<double>(i)) + step;
      if (i == 0) lo = Real(0);
      if (i + 1 == n) hi = Real(2) * real_pi();
      auto ext = golden_section_max(
          [&](const Real& t) {
            Real tt = t < Real(0) ? Real(t + Real(2) * real_pi()) : t;
            return on_circle(R, tt);
          },
          lo, hi, opt.iterations);
      if (ext.value > best_value) {
        best_value = ext.value;
        best_angle = ext.arg;
      }
    }
    CircleMax out;
    out.value = to_double(best_value);
    out.angle = to_double(best_angle);
    out.value_text = best_value.str(24, std::ios_base::scientific);
    return out;
  }

  /// (angle, f) samples on the circle of radius r.
  std::vector<std::pair<double, double>> trace(double r, std::size_t grid) const {
    std::vector<std::pair<double, double>> out;
    out.reserve(grid);
    for (std::size_t i = 0; i < grid; ++i) {
      double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid);
      out.emplace_back(t, on_circle(r, t));
    }
    return out;
  }

  /// Maximizer of y -> h(x, y) over log y in [-20, 2 sqrt(x) + 20].
  LineMax maximize_h(double x) const {
    PrecisionScope scope(params_.precision);
    double lo = -20.0, hi = 2.0 * std::sqrt(x) + 20.0;
    std::size_t n = 1024;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
      double u = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      grid[i] = eval_h(x, std::exp(u));
    }
    Real X(x);
    Real best_u(0), best_v(-INFINITY);
    double du = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i : top_local_maxima(grid, 8, false)) {
      Real a(std::max(lo, lo + du * (static_cast<double>(i) - 1.0)));
      Real b(std::min(hi, lo + du * (static_cast<double>(i) + 1.0)));
      auto ext = golden_section_max([&](const Real& u) { return eval_h(X, Real(exp(u))); }, a, b, 170);
      if (ext.value > best_v) {
        best_v = ext.value;
        best_u = ext.arg;
      }
    }
    return {to_double(exp(best_u)), to_double(best_v)};
  }

  Claim1Report verify_claim1(const std::vector<double>& xs, double rel_tol = 1e-6) const {
    Claim1Report rep;
    for (double x : xs) {
      if (!(x > 1.0)) throw std::domain_error("verify_claim1: samples must exceed 1");
      Claim1Entry e{};
      e.x = x;
      {
        PrecisionScope scope(params_.precision);
        Real X(x);
        for (Real y : {Real(0.5), Real(1), real_e(), Real(real_e() * real_e())}) {
          Real step = y * Real(1e-10);
          Real fd = (eval_h(X, Real(y + step)) - eval_h(X, Real(y - step))) / (Real(2) * step);
          Real exact = eval_h_dy(X, y);
          double scale = std::max(1.0, std::abs(to_double(exact)));
          bool ok = std::abs(to_double(Real(fd - exact))) <= rel_tol * scale;
          e.derivatives.push_back({to_double(y), to_double(fd), to_double(exact), ok});
        }
        Real s = sqrt(X);
        e.value_far = to_double(eval_h(X, Real(Real(1e6) * exp(s))));
        e.value_near = to_double(eval_h(X, Real(1e-9)));
        e.expected_argmax = to_double(exp(s));
        e.expected_max = to_double(eval_alpha(X));
      }
      e.maximum = maximize_h(x);
      e.argmax_ok = std::abs(e.maximum.argmax - e.expected_argmax) <= rel_tol * e.expected_argmax;
      e.max_ok = std::abs(e.maximum.value - e.expected_max) <= rel_tol * e.expected_max;
      e.boundary_ok = e.value_far < 0.0 && std::abs(e.value_near) < 1e-3;
      rep.entries.push_back(std::move(e));
    }
    return rep;
  }

  /// The five limits showing g is continuous across the edges of
  /// (a, inf) x (0, 1); each approach sequence must reach 1 within
  /// 10 eps + 1e-14 over the second half of the schedule.
  Claim2Report verify_claim2_continuity(const std::vector<double>& bs, const std::vector<double>& cs,
                                        const std::vector<double>& eps) const {
    PrecisionScope scope(params_.precision);
    Real A = a<Real>();
    Claim2Report rep;
    auto run = [&](std::string name, double anchor, auto point) {
      LimitSequence seq{std::move(name), anchor, eps, {}, true};
      for (std::size_t k = 0; k < eps.size(); ++k) {
        auto [x, y] = point(Real(eps[k]), k);
        Real v = g(x, y);
        seq.values.push_back(to_double(v));
        if (2 * k >= eps.size() && to_double(abs(Real(v - Real(1)))) > 10.0 * eps[k] + 1e-14) seq.ok = false;
      }
      rep.limits.push_back(std::move(seq));
    };
    auto wobble = [](const Real& e, std::size_t k) { return k % 2 ? Real(-e) : e; };
    for (double b : bs) {
      if (!(b > to_double(A))) throw std::domain_error("verify_claim2: b must exceed a");
      Real B(b);
      run("x->b, y->1-", b, [&](const Real& e, std::size_t k) {
        return std::pair<Real, Real>{Real(B + wobble(e, k)), Real(Real(1) - e)};
      });
      run("x->b, y->0+", b, [&](const Real& e, std::size_t k) {
        return std::pair<Real, Real>{Real(B + wobble(e, k)), e};
      });
    }
    for (double c : cs) {
      if (!(c > 0.0 && c < 1.0)) throw std::domain_error("verify_claim2: c must lie in (0, 1)");
      Real C(c);
      run("x->a+, y->c", c, [&](const Real& e, std::size_t k) {
        return std::pair<Real, Real>{Real(A + e), Real(C + wobble(e, k) * Real(0.5) * Real(std::min(c, 1 - c)))};
      });
    }
    run("x->a+, y->0+", 0.0, [&](const Real& e, std::size_t) { return std::pair<Real, Real>{Real(A + e), e}; });
    run("x->a+, y->1-", 1.0,
        [&](const Real& e, std::size_t) { return std::pair<Real, Real>{Real(A + e), Real(Real(1) - e)}; });
    return rep;
  }

 private:
  CounterexampleParams params_;
};

/// alpha(|x|^2) for |x|^2 > 1, else 0: a smooth super-polynomial radial
/// function used as a negative control.
template <class T>
T alpha_radial(const T& x, const T& y) {
  T s = x * x + y * y;
  if (!(s > T(1))) return T(0);
  return eval_alpha(s);
}

}  // namespace logrowth
