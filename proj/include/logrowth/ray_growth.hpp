#pragma once

/// \file
/// Per-ray polynomial growth certificates, direction-ball cone certificates,
/// seeded ray surveys and sphere suprema.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "logrowth/adaptive.hpp"
#include "logrowth/certificate.hpp"
#include "logrowth/cones.hpp"
#include "logrowth/counterexample.hpp"
#include "logrowth/expr.hpp"
#include "logrowth/geometry.hpp"
#include "logrowth/optimize.hpp"
#include "logrowth/prepare.hpp"

namespace logrowth {

/// Raised when window slopes keep growing through the last window.
class UncertifiableOnSchedule : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Fields: functions R^n -> R given by an expression or a built-in

struct Field {
  std::string name;
  std::size_t arity = 0;
  std::optional<Expr> expr;
  /// Set for the built-in counterexample so sphere suprema can use its
  /// dedicated circle maximizer.
  std::shared_ptr<const Counterexample> counterexample;
  /// Sign and log|f| at a point; nullopt outside the domain.
  std::function<std::optional<SignedLog>(std::span<const double>)> log_abs;
  /// Fast double value (NaN outside the domain).
  std::function<double(std::span<const double>)> value;
};

inline Field expr_field(Expr e, std::size_t arity, std::string name = {}) {
  if (max_var_index(e) > arity) throw std::invalid_argument("expression uses variables beyond the arity");
  Field f;
  f.name = name.empty() ? to_string(e) : std::move(name);
  f.arity = arity;
  f.expr = e;
  f.log_abs = [e](std::span<const double> p) { return adaptive_eval(e, p); };
  f.value = [e](std::span<const double> p) {
    auto v = eval_as<double>(e, p);
    return v.defined() ? v.value : std::numeric_limits<double>::quiet_NaN();
  };
  return f;
}

inline SignedLog signed_log_double(double v) {
  if (v == 0.0) return {};
  return {v > 0 ? 1 : -1, std::log(std::abs(v))};
}

inline Field counterexample_field(std::shared_ptr<const Counterexample> ce) {
  Field f;
  f.name = "counterexample";
  f.arity = 2;
  f.counterexample = ce;
  f.log_abs = [ce](std::span<const double> p) -> std::optional<SignedLog> {
    try {
      return signed_log_double(ce->f(p[0], p[1]));
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  };
  f.value = [ce](std::span<const double> p) {
    try {
      return ce->f(p[0], p[1]);
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  return f;
}

/// alpha(|x|^2): super-polynomial along every ray through the origin.
inline Field alpha_radial_field() {
  Field f;
  f.name = "alpha_radial";
  f.arity = 2;
  f.log_abs = [](std::span<const double> p) -> std::optional<SignedLog> {
    double s = p[0] * p[0] + p[1] * p[1];
    if (!(s > 1.0)) return SignedLog{};
    double r = std::sqrt(s);
    // log(2 e^r (r - 1)) without overflow.
    return SignedLog{1, std::log(2.0) + r + std::log(r - 1.0)};
  };
  f.value = [](std::span<const double> p) { return alpha_radial(p[0], p[1]); };
  return f;
}

// ---------------------------------------------------------------------------
// Ray certificates

struct RayConfig {
  double r_min = 10.0;
  double r_max = 1e6;
  /// Slack subtracted from the slope before taking the ceiling.
  double slope_slack = 0.1;
  /// A leftover slope above this (or a still-growing one) adds 1 to N.
  double excess_tolerance = 0.05;
  /// Samples per octave for validation; rechecks use twice as many.
  int validation_density = 4;
  /// Samples per octave of the scan for pre-asymptotic bumps.
  int transient_density = 16;
  bool try_symbolic = true;
  PrepareOptions prepare;
};

/// 10 2^(j/density) for j >= 0 up to r_max.
inline std::vector<double> radial_schedule(double r_min, double r_max, int density = 1) {
  std::vector<double> r;
  for (int j = 0;; ++j) {
    double x = r_min * std::exp2(static_cast<double>(j) / density);
    if (x > r_max * (1.0 + 1e-12)) break;
    r.push_back(x);
  }
  return r;
}

namespace detail {

inline std::vector<std::optional<SignedLog>> logs_along(const Field& f, const StandardizedRay& ray,
                                                        std::span<const double> radii) {
  std::vector<std::optional<SignedLog>> out;
  out.reserve(radii.size());
  for (double r : radii) {
    Vec p = phi(ray, r);
    out.push_back(f.log_abs(p));
  }
  return out;
}

/// Checks |f| <= d r^N at every radius > t, recording samples.
inline bool check_bound(const Field& f, const StandardizedRay& ray, std::span<const double> radii, long N,
                        double d, double t, std::vector<CertificateSample>* samples) {
  bool ok = true;
  for (double r : radii) {
    if (!(r > t)) continue;
    Vec p = phi(ray, r);
    auto v = f.log_abs(p);
    if (!v) {
      ok = false;
      continue;
    }
    double log_bound = std::log(d) + static_cast<double>(N) * std::log(r);
    if (v->sign != 0 && v->log_abs > log_bound + 1e-12) ok = false;
    if (samples) samples->push_back({r, v->sign == 0 ? 0.0 : std::exp(v->log_abs), std::exp(log_bound)});
  }
  return ok;
}

}  // namespace detail

/// Symbolic route: restrict, prepare, and convert the unary certificate.
inline std::optional<GrowthCertificate> certify_ray_symbolic(const Field& f, const StandardizedRay& ray,
                                                             const RayConfig& cfg) {
  if (!f.expr || !is_log_analytic(*f.expr)) return std::nullopt;
  Expr u = restrict_to_ray(*f.expr, ray);
  GrowthClass gc = classify_growth(u, cfg.prepare);
  if (gc.kind != GrowthKind::PolyBounded || !gc.certificate || !gc.certificate->validated) return std::nullopt;
  GrowthCertificate cert = *gc.certificate;
  cert.mode = CertificateMode::Ray;
  cert.route = "symbolic";
  cert.samples.clear();
  std::vector<double> dense = radial_schedule(cfg.r_min, cfg.r_max, cfg.validation_density);
  cert.validated = detail::check_bound(f, ray, dense, cert.N, cert.d, cert.t, &cert.samples);
  return cert;
}

/// Numeric route: window slopes on 10 2^j up to r_max, N = ceil(s - slack)
/// raised by one while |f|/r^N is still growing, t moved past pre-asymptotic
/// bumps, d fitted on the fit and scan samples with the trend extrapolated
/// to r_max, validation on a denser log-spaced schedule.
inline GrowthCertificate certify_ray_numeric(const Field& f, const StandardizedRay& ray, const RayConfig& cfg) {
  std::vector<double> radii = radial_schedule(cfg.r_min, cfg.r_max, 1);
  auto logs = detail::logs_along(f, ray, radii);
  double t = cfg.r_min;
  if (f.expr) t = std::max(t, iterated_exp_double(log_depth(*f.expr)));
  // Start past the last undefined sample.
  for (std::size_t j = 0; j < radii.size(); ++j)
    if (!logs[j]) t = std::max(t, radii[j]);

  GrowthCertificate cert;
  cert.mode = CertificateMode::Ray;
  cert.route = "numeric";
  cert.t = t;

  std::vector<double> fit_r;
  std::vector<std::optional<SignedLog>> fit_logs;
  for (std::size_t j = 0; j < radii.size(); ++j)
    if (radii[j] >= t) {
      fit_r.push_back(radii[j]);
      fit_logs.push_back(logs[j]);
    }
  OracleReport rep = oracle_from_logs(fit_r, fit_logs);
  if (rep.trend == OracleTrend::Diverging)
    throw UncertifiableOnSchedule("window slopes keep increasing through the last window (schedule exhausted)");

  std::vector<double> slopes;
  for (const OracleWindow& w : rep.windows)
    if (w.slope) slopes.push_back(*w.slope);
  bool all_zero = std::all_of(fit_logs.begin(), fit_logs.end(),
                              [](const auto& v) { return v && v->sign == 0; });
  if (slopes.empty()) {
    if (!all_zero) throw UncertifiableOnSchedule("too few nonzero samples to estimate a slope");
    cert.N = 0;
    cert.d = 1.0;
  } else {
    std::size_t k = std::min<std::size_t>(3, slopes.size());
    std::vector<double> last(slopes.end() - static_cast<std::ptrdiff_t>(k), slopes.end());
    double s_max = *std::max_element(last.begin(), last.end());
    long N = static_cast<long>(std::ceil(s_max - cfg.slope_slack));
    double excess = last.back() - static_cast<double>(N);
    bool still_growing = false;
    for (std::size_t i = 1; i < last.size(); ++i)
      if (last[i] - N > 1e-9 && last[i] > last[i - 1] + 1e-9) still_growing = true;
    if (excess > cfg.excess_tolerance || still_growing) ++N;
    cert.N = N;
    const double dN = static_cast<double>(N);
    std::vector<double> dense = radial_schedule(cfg.r_min, cfg.r_max, cfg.validation_density);

    // Pre-asymptotic bumps (a ray crossing a thin ridge at small r) move the
    // threshold one octave past the bump. A bump is a rise by more than 4x
    // within one scan step, which polynomial growth of moderate degree cannot
    // produce, or a ratio |f|/r^N more than twice every later one. The scan
    // grid is offset by a quarter step so it shares no points with the
    // validation or recheck schedules.
    std::vector<double> scan = radial_schedule(cfg.r_min * std::exp2(0.25 / cfg.transient_density), cfg.r_max,
                                               cfg.transient_density);
    auto scan_logs = detail::logs_along(f, ray, scan);
    std::vector<double> scan_lr(scan.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < scan.size(); ++j)
      if (scan_logs[j] && scan_logs[j]->sign != 0) scan_lr[j] = scan_logs[j]->log_abs - dN * std::log(scan[j]);
    double bump = 0.0;
    for (std::size_t j = 1; j < scan.size(); ++j)
      if (scan[j - 1] > cert.t && scan_lr[j] - scan_lr[j - 1] > std::log(4.0)) bump = std::max(bump, scan[j]);
    double tail_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = scan.size(); j-- > 0;) {
      if (!(scan[j] > cert.t)) break;
      if (std::isfinite(tail_max) && scan_lr[j] > tail_max + std::log(2.0)) {
        bump = std::max(bump, scan[j]);
        break;
      }
      tail_max = std::max(tail_max, scan_lr[j]);
    }
    if (bump > 0.0 && 2.0 * bump < cfg.r_max / 4.0) cert.t = 2.0 * bump;

    double log_ratio = -std::numeric_limits<double>::infinity();
    double log_ratio_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < fit_r.size(); ++j)
      if (fit_r[j] >= cert.t && fit_logs[j] && fit_logs[j]->sign != 0) {
        double lr = fit_logs[j]->log_abs - dN * std::log(fit_r[j]);
        log_ratio = std::max(log_ratio, lr);
        log_ratio_min = std::min(log_ratio_min, lr);
      }
    for (std::size_t j = 0; j < scan.size(); ++j)
      if (scan[j] > cert.t && std::isfinite(scan_lr[j])) {
        log_ratio = std::max(log_ratio, scan_lr[j]);
        log_ratio_min = std::min(log_ratio_min, scan_lr[j]);
      }
    // A decaying ratio peaks at the threshold itself.
    if (auto at_t = f.log_abs(phi(ray, cert.t)); at_t && at_t->sign != 0) {
      double lr = at_t->log_abs - dN * std::log(cert.t);
      log_ratio = std::max(log_ratio, lr);
      log_ratio_min = std::min(log_ratio_min, lr);
    }
    // The ratio can peak between samples unless it is constant.
    double guard = log_ratio - log_ratio_min < 1e-12 ? 1.0 + 1e-9 : 1.01;
    double trend = std::max(0.0, last.back() - dN) * std::log(cfg.r_max / fit_r.back());
    double base = std::isfinite(log_ratio) ? std::exp(log_ratio + trend) : 1.0;
    cert.d = base * guard;
    if (!detail::check_bound(f, ray, dense, cert.N, cert.d, cert.t, nullptr)) {
      // Remaining violations move the threshold one octave past the last.
      std::vector<CertificateSample> probe;
      detail::check_bound(f, ray, dense, cert.N, cert.d, cert.t, &probe);
      double last_bad = 0.0;
      for (const CertificateSample& s : probe)
        if (s.abs_f > s.bound) last_bad = s.r;
      if (last_bad > 0.0 && 2.0 * last_bad < cfg.r_max) cert.t = 2.0 * last_bad;
    }
  }
  std::vector<double> dense = radial_schedule(cfg.r_min, cfg.r_max, cfg.validation_density);
  cert.validated = detail::check_bound(f, ray, dense, cert.N, cert.d, cert.t, &cert.samples);
  return cert;
}

/// Symbolic route first, numeric fallback.
inline GrowthCertificate certify_ray(const Field& f, const StandardizedRay& ray, const RayConfig& cfg = {}) {
  if (ray.dim() != f.arity) throw std::invalid_argument("ray dimension differs from field arity");
  if (cfg.try_symbolic) {
    if (auto c = certify_ray_symbolic(f, ray, cfg)) return *c;
  }
  return certify_ray_numeric(f, ray, cfg);
}

/// Recheck at twice the validation density.
inline bool recheck_certificate(const Field& f, const StandardizedRay& ray, const GrowthCertificate& cert,
                                const RayConfig& cfg = {}) {
  std::vector<double> radii = radial_schedule(cfg.r_min, cfg.r_max, 2 * cfg.validation_density);
  return detail::check_bound(f, ray, radii, cert.N, cert.d, cert.t, nullptr);
}

// ---------------------------------------------------------------------------
// Cone certificates

struct ConeConfig {
  std::size_t centers = 16;
  double rho_start = std::numbers::pi / 64.0;
  std::size_t ball_samples = 8;  ///< per side in 2-D; per ring in n-D
  double uniformity = 0.25;      ///< allowed growth of d when doubling samples
  double d_cap = 1e6;
  RayConfig ray;
};

struct ConeResult {
  Cone cone;
  GrowthCertificate certificate;
  /// Largest ball radius tried per center (0 when the center failed).
  std::vector<double> center_radii;
  std::vector<Vec> center_directions;
};

namespace detail {

/// Directions within angle rho of v0: 2m+1 on the arc in 2-D, rings of m
/// points in n-D. Doubling m keeps the previous directions as a subset.
inline std::vector<Vec> ball_directions(const Vec& v0, double rho, std::size_t m) {
  std::vector<Vec> out;
  std::size_t n = v0.size();
  if (n == 2) {
    double c = angle_2d(v0);
    for (long i = -static_cast<long>(m); i <= static_cast<long>(m); ++i)
      out.push_back(direction_2d(c + rho * static_cast<double>(i) / static_cast<double>(m)));
    return out;
  }
  out.push_back(v0);
  std::vector<Vec> basis = orthogonal_complement(v0);
  for (std::size_t ring = 1; ring <= 2; ++ring) {
    double a = rho * static_cast<double>(ring) / 2.0;
    for (std::size_t k = 0; k < m; ++k) {
      double w = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
      Vec u(n);
      for (std::size_t i = 0; i < n; ++i)
        u[i] = v0[i] * std::cos(a) +
               std::sin(a) * (std::cos(w) * basis[0][i] + std::sin(w) * basis[1 % basis.size()][i]);
      out.push_back(normalized(u));
    }
  }
  return out;
}

/// Per-direction certificates through the origin, memoized across ball
/// radii and centers.
class RayCertificateCache {
 public:
  RayCertificateCache(const Field& f, const ConeConfig& cfg) : f_(f), cfg_(cfg) {}

  const std::optional<GrowthCertificate>& get(const Vec& v) {
    auto it = cache_.find(v);
    if (it != cache_.end()) return it->second;
    std::optional<GrowthCertificate> c;
    try {
      GrowthCertificate g = certify_ray(f_, StandardizedRay(Vec(v.size(), 0.0), v), cfg_.ray);
      if (g.validated && g.d <= cfg_.d_cap) c = std::move(g);
    } catch (const UncertifiableOnSchedule&) {
    } catch (const std::invalid_argument&) {
    }
    return cache_.emplace(v, std::move(c)).first->second;
  }

 private:
  const Field& f_;
  const ConeConfig& cfg_;
  std::map<Vec, std::optional<GrowthCertificate>> cache_;
};

/// Common (N, d, T) over rays through the origin in the given directions;
/// nullopt if any fails. |f| <= d_i r^N_i <= d_i r^N once r >= 1.
inline std::optional<GrowthCertificate> common_certificate(RayCertificateCache& cache,
                                                           const std::vector<Vec>& dirs) {
  GrowthCertificate common;
  common.mode = CertificateMode::Cone;
  common.N = std::numeric_limits<long>::min();
  common.d = 0.0;
  common.t = 1.0;
  std::vector<const GrowthCertificate*> certs;
  for (const Vec& v : dirs) {
    const auto& c = cache.get(v);
    if (!c) return std::nullopt;
    common.N = std::max(common.N, c->N);
    common.t = std::max(common.t, c->t);
    common.d = std::max(common.d, c->d);
    common.route = c->route;
    certs.push_back(&*c);
  }
  common.validated = true;
  for (const GrowthCertificate* c : certs)
    for (const CertificateSample& s : c->samples)
      if (s.r > common.t) common.samples.push_back({s.r, s.abs_f, common.d * std::pow(s.r, common.N)});
  return common;
}

/// Continuous check of the cone bound: sup of |f| over the cap at each
/// radius of the fit schedule (grid plus golden-section refinement in 2-D,
/// a denser ring sample in n-D). Catches ridges that fall between rays.
inline bool cap_bound_holds(const Field& f, const Vec& center, double rho, const GrowthCertificate& cert,
                            const ConeConfig& cfg) {
  auto abs_at = [&](const Vec& u, double r) {
    double v = std::abs(f.value(scaled(u, r)));
    return std::isnan(v) ? 0.0 : v;
  };
  for (double r : radial_schedule(cfg.ray.r_min, cfg.ray.r_max, 1)) {
    if (!(r > cert.t)) continue;
    double bound = cert.d * std::pow(r, static_cast<double>(cert.N));
    double sup = 0.0;
    if (center.size() == 2) {
      const std::size_t n = 256;
      double c = angle_2d(center), lo = c - rho, step = 2.0 * rho / static_cast<double>(n);
      std::vector<double> values(n + 1);
      for (std::size_t i = 0; i <= n; ++i) values[i] = abs_at(direction_2d(lo + step * static_cast<double>(i)), r);
      sup = *std::max_element(values.begin(), values.end());
      for (std::size_t i : top_local_maxima(values, 4, false)) {
        double a = std::max(lo, lo + step * (static_cast<double>(i) - 1.0));
        double b = std::min(c + rho, lo + step * (static_cast<double>(i) + 1.0));
        auto ext = golden_section_max([&](double t) { return abs_at(direction_2d(t), r); }, a, b, 80);
        sup = std::max(sup, ext.value);
      }
    } else {
      for (const Vec& u : ball_directions(center, rho, 64)) sup = std::max(sup, abs_at(u, r));
    }
    if (!(sup <= bound)) return false;
  }
  return true;
}

}  // namespace detail

/// Largest direction ball (over a set of centers, radii doubling from
/// rho_start) on which sampled rays through the origin share a certificate
/// that also bounds the cap supremum at every schedule radius.
inline ConeResult find_polynomial_cone(const Field& f, const ConeConfig& cfg = {}) {
  if (f.arity < 2) throw std::invalid_argument("find_polynomial_cone: needs n >= 2");
  std::vector<Vec> centers;
  if (f.arity == 2) {
    for (std::size_t k = 0; k < cfg.centers; ++k)
      centers.push_back(direction_2d(2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) /
                                     static_cast<double>(cfg.centers)));
  } else {
    centers = fibonacci_sphere(cfg.centers);
  }
  detail::RayCertificateCache cache(f, cfg);
  ConeResult best;
  double best_rho = -1.0;
  for (const Vec& c : centers) {
    double found = 0.0;
    std::optional<GrowthCertificate> found_cert = detail::common_certificate(cache, {c});
    // Only the center ray is known to certify when the first ball fails.
    if (found_cert && best_rho < std::numbers::pi) {
      for (double rho = cfg.rho_start; rho <= std::numbers::pi * (1.0 + 1e-12); rho *= 2.0) {
        auto coarse = detail::common_certificate(cache, detail::ball_directions(c, rho, cfg.ball_samples));
        if (!coarse) break;
        auto fine = detail::common_certificate(cache, detail::ball_directions(c, rho, 2 * cfg.ball_samples));
        if (!fine || fine->N != coarse->N || fine->d > (1.0 + cfg.uniformity) * coarse->d) break;
        if (!detail::cap_bound_holds(f, c, rho, *fine, cfg)) break;
        found = rho;
        found_cert = fine;
      }
    }
    best.center_directions.push_back(c);
    best.center_radii.push_back(found_cert ? found : 0.0);
    if (found_cert && found > best_rho) {
      best_rho = found;
      best.cone = Cone::ball(c, found);
      best.certificate = *found_cert;
    }
  }
  if (best_rho < 0.0) throw UncertifiableOnSchedule("no certifiable direction among the sampled centers");
  return best;
}

// ---------------------------------------------------------------------------
// Sphere suprema and surveys

struct SphereOptions {
  std::size_t grid_2d = 4096;
  std::size_t grid_3d = 8192;
  std::size_t starts = 8;
};

/// sup |f| over the sphere of radius r: the counterexample's circle
/// maximizer, else grid plus golden-section refinement (2-D) or the grid
/// maximum (n-D).
inline double sphere_sup(const Field& f, double r, const SphereOptions& opt = {}) {
  if (!(r > 0.0)) throw std::invalid_argument("sphere_sup: r must be positive");
  if (f.counterexample && f.arity == 2) {
    CircleOptions co;
    co.grid = opt.grid_2d;
    co.starts = opt.starts;
    return f.counterexample->max_on_circle(r, co).value;
  }
  auto abs_at = [&](const Vec& u) {
    Vec p = scaled(u, r);
    double v = std::abs(f.value(p));
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };
  if (f.arity == 2) {
    std::size_t n = opt.grid_2d;
    double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = abs_at(direction_2d(step * static_cast<double>(i)));
    double best = *std::max_element(values.begin(), values.end());
    for (std::size_t i : top_local_maxima(values, opt.starts, true)) {
      double c = step * static_cast<double>(i);
      auto ext = golden_section_max([&](double t) { return abs_at(direction_2d(t)); }, c - step, c + step, 80);
      best = std::max(best, ext.value);
    }
    return best;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& u : default_direction_grid(f.arity, opt.grid_2d, opt.grid_3d)) best = std::max(best, abs_at(u));
  return best;
}

struct RayOutcome {
  StandardizedRay ray;
  std::optional<GrowthCertificate> certificate;
  std::string failure;
};

struct SphereTracePoint {
  double r;
  double sup;
};

struct RaySurveyReport {
  std::vector<RayOutcome> rays;
  long N_U = 0;
  double d_U = 0.0;
  std::size_t validated = 0;
  std::vector<SphereTracePoint> sphere_trace;
};

struct SurveyConfig {
  std::size_t count = 100;
  std::uint64_t seed = 42;
  double offset_radius = 10.0;
  std::vector<double> trace_radii = {5.0, 10.0, 15.0, 20.0};
  RayConfig ray;
  SphereOptions sphere;
};

/// Seeded standardized rays with |o| <= offset_radius. In 2-D the angles
/// and offsets follow golden-ratio and sqrt(2) low-discrepancy sequences
/// from seeded starting points; in n-D directions and offsets are Gaussian.
inline std::vector<StandardizedRay> sample_rays(std::size_t n, std::size_t count, std::uint64_t seed,
                                                double offset_radius) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<StandardizedRay> rays;
  rays.reserve(count);
  if (n == 2) {
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    const double root2 = std::sqrt(2.0) - 1.0;
    double u0 = unit(rng), w0 = unit(rng);
    for (std::size_t i = 0; i < count; ++i) {
      double u = std::fmod(u0 + golden * static_cast<double>(i), 1.0);
      double w = std::fmod(w0 + root2 * static_cast<double>(i), 1.0);
      Vec v = direction_2d(2.0 * std::numbers::pi * u);
      double s = offset_radius * (2.0 * w - 1.0);
      Vec o = {-v[1] * s, v[0] * s};
      rays.push_back(standardize_ray(o, v));
    }
    return rays;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    Vec v(n), o(n);
    for (double& x : v) x = gauss(rng);
    v = normalized(v);
    for (double& x : o) x = gauss(rng);
    double along = dot(o, v);
    for (std::size_t k = 0; k < n; ++k) o[k] -= along * v[k];
    double len = norm(o);
    double target = offset_radius * unit(rng);
    if (len > 0.0) o = scaled(o, target / len);
    rays.push_back(standardize_ray(o, v));
  }
  return rays;
}

inline RaySurveyReport survey_rays(const Field& f, const SurveyConfig& cfg = {}) {
  if (cfg.count < 1) throw std::invalid_argument("survey: count must be at least 1");
  RaySurveyReport rep;
  bool first = true;
  for (const StandardizedRay& ray : sample_rays(f.arity, cfg.count, cfg.seed, cfg.offset_radius)) {
    RayOutcome out{ray, std::nullopt, {}};
    try {
      GrowthCertificate c = certify_ray(f, ray, cfg.ray);
      if (c.validated) {
        ++rep.validated;
        rep.N_U = first ? c.N : std::max(rep.N_U, c.N);
        rep.d_U = first ? c.d : std::max(rep.d_U, c.d);
        first = false;
      } else {
        out.failure = "validation failed on the dense schedule";
      }
      out.certificate = std::move(c);
    } catch (const UncertifiableOnSchedule& e) {
      out.failure = e.what();
    }
    rep.rays.push_back(std::move(out));
  }
  for (double r : cfg.trace_radii) rep.sphere_trace.push_back({r, sphere_sup(f, r, cfg.sphere)});
  return rep;
}

}  // namespace logrowth
