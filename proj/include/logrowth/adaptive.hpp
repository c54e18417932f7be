#pragma once

/// \file
/// Precision-adaptive evaluation: recompute at doubling precision until two
/// consecutive results agree, so cancellation (sqrt(x^2+1) - x at x = 1e100)
/// does not silently produce garbage.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "logrowth/expr.hpp"
#include "logrowth/numeric.hpp"

namespace logrowth {

/// Sign and log-magnitude of a real; sign 0 means exactly zero (log_abs is
/// then -inf).
struct SignedLog {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();
};

inline SignedLog signed_log(const Real& x) {
  if (x == 0) return {};
  SignedLog s;
  s.sign = x > 0 ? 1 : -1;
  if (boost::multiprecision::isinf(x)) {
    s.log_abs = std::numeric_limits<double>::infinity();
  } else {
    s.log_abs = to_double(log(abs(x)));
  }
  return s;
}

struct AdaptiveOptions {
  unsigned start_bits = kDefaultPrecisionBits;
  unsigned max_bits = 8192;
  double rel_tol = 1e-10;
  /// Consecutive out-of-domain results accepted as a genuine domain failure.
  int domain_confirmations = 3;
};

/// Exact zeros are only trusted once they persist to this precision, since
/// cancellation at low precision also produces zero.
inline constexpr unsigned kZeroTrustBits = 1024;

inline bool signed_logs_agree(const SignedLog& a, const SignedLog& b, double rel_tol,
                              unsigned bits = kZeroTrustBits) {
  if (a.sign != b.sign) return false;
  if (a.sign == 0) return bits >= kZeroTrustBits;
  if (std::isinf(a.log_abs) || std::isinf(b.log_abs)) return a.log_abs == b.log_abs;
  // log_abs agreement to rel_tol means the values agree to relative rel_tol.
  return std::abs(a.log_abs - b.log_abs) <= rel_tol;
}

/// Runs `compute(bits)` (returning optional<SignedLog>, nullopt for out of
/// domain) at doubling precision until agreement.
template <class F>
std::optional<SignedLog> adaptive(F&& compute, const AdaptiveOptions& opt = {}) {
  std::optional<SignedLog> previous;
  bool have_previous = false;
  int out_of_domain = 0;
  unsigned bits = std::max(opt.start_bits, kMinPrecisionBits);
  while (true) {
    std::optional<SignedLog> current = compute(bits);
    if (!current) {
      ++out_of_domain;
      if (out_of_domain >= opt.domain_confirmations) return std::nullopt;
    } else {
      out_of_domain = 0;
      if (have_previous && previous && signed_logs_agree(*previous, *current, opt.rel_tol, bits))
        return current;
    }
    previous = current;
    have_previous = true;
    if (bits >= opt.max_bits) return current;
    bits = std::min(opt.max_bits, bits * 2);
  }
}

/// Sign and log|e(point)| with adaptive precision.
inline std::optional<SignedLog> adaptive_eval(const Expr& e, std::span<const double> point,
                                              const AdaptiveOptions& opt = {}) {
  return adaptive(
      [&](unsigned bits) -> std::optional<SignedLog> {
        PrecisionScope scope(bits);
        std::vector<Real> p(point.begin(), point.end());
        auto r = eval_as<Real>(e, std::span<const Real>(p));
        if (!r.defined()) return std::nullopt;
        return signed_log(r.value);
      },
      opt);
}

}  // namespace logrowth
