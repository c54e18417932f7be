#include <chrono>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "logrowth/ray_growth.hpp"
#include "support.hpp"

using namespace logrowth;
using testing_support::Oracle;

namespace {

std::shared_ptr<const Counterexample> shared_counterexample() {
  static auto ce = std::make_shared<const Counterexample>();
  return ce;
}

Field quad() { return expr_field(parse("x1^2 + x2^2"), 2); }

StandardizedRay ray2(double o1, double o2, double theta) {
  return standardize_ray(Vec{o1, o2}, direction_2d(theta));
}

/// |f(o + r v)| <= d r^N at fresh radii beyond t, with f evaluated by the
/// independent oracle.
void expect_bound_at_fresh_points(const Expr& e, const StandardizedRay& ray, const GrowthCertificate& c) {
  double lo = std::max(c.t, 10.0) * 1.37;
  for (int i = 0; i < 15; ++i) {
    double r = lo * std::pow(1e6 / lo, i / 14.0);
    std::vector<Oracle> p;
    for (std::size_t k = 0; k < ray.dim(); ++k) p.push_back(Oracle(ray.o[k]) + Oracle(r) * Oracle(ray.v[k]));
    Oracle f;
    ASSERT_TRUE(testing_support::oracle_eval(e, p, f));
    EXPECT_LE(abs(f), Oracle(c.d) * pow(Oracle(r), static_cast<int>(c.N)) * (1 + Oracle(1e-9)))
        << to_string(e) << " at r=" << r;
  }
}

}  // namespace

TEST(Phi, Examples) {
  StandardizedRay R(Vec{0, 1}, Vec{1, 0});
  EXPECT_EQ(phi(R, 3.0), (Vec{3, 1}));
  EXPECT_EQ(phi(R, 0.0), R.o);
  EXPECT_THROW(phi(R, -1.0), std::invalid_argument);
  EXPECT_THROW(StandardizedRay(Vec{1, 1}, Vec{1, 0}), std::invalid_argument);
}

TEST(Phi, OrthogonalNormIdentity) {
  for (std::size_t n : {2u, 3u})
    for (const StandardizedRay& R : sample_rays(n, 100, 9, 10.0)) {
      double r = 1e3 * std::abs(std::sin(R.o[0] + 1.0));
      double want = std::sqrt(dot(R.o, R.o) + r * r);
      EXPECT_NEAR(norm(phi(R, r)), want, 1e-12 * want);
    }
}

TEST(CertifyRay, QuadraticIsDegreeTwo) {
  Field f = quad();
  for (const StandardizedRay& R : sample_rays(2, 20, 4, 10.0)) {
    GrowthCertificate c = certify_ray(f, R);
    ASSERT_TRUE(c.validated);
    EXPECT_EQ(c.N, 2);
    EXPECT_EQ(c.route, "symbolic");
    EXPECT_GE(c.d, 1.0);
    EXPECT_LE(c.d, 2.0);
    expect_bound_at_fresh_points(*f.expr, R, c);
  }
}

TEST(CertifyRay, CounterexampleHorizontalRay) {
  Field f = counterexample_field(shared_counterexample());
  GrowthCertificate c = certify_ray(f, StandardizedRay(Vec{0, 0.5}, Vec{1, 0}));
  EXPECT_TRUE(c.validated);
  EXPECT_LE(c.N, 2);
  EXPECT_EQ(c.route, "numeric");
  EXPECT_TRUE(recheck_certificate(f, StandardizedRay(Vec{0, 0.5}, Vec{1, 0}), c));
}

TEST(CertifyRay, AlphaRadialIsUncertifiable) {
  Field f = alpha_radial_field();
  for (double theta : {0.0, 1.0, 2.5, 4.0})
    EXPECT_THROW(certify_ray(f, ray2(0, 0, theta)), UncertifiableOnSchedule) << theta;
}

TEST(CertifyRay, DimensionMismatch) {
  EXPECT_THROW(certify_ray(quad(), StandardizedRay(Vec{0, 0, 0}, Vec{1, 0, 0})), std::invalid_argument);
  EXPECT_THROW(expr_field(parse("x3"), 2), std::invalid_argument);
}

TEST(CertifyRay, NumericRouteAgreesWithSymbolic) {
  // Unary corpus: the numeric N is within one of the symbolic N.
  RayConfig numeric;
  numeric.try_symbolic = false;
  StandardizedRay R(Vec{0}, Vec{1});
  for (const auto& c : testing_support::fragment_corpus()) {
    Field f = expr_field(parse(c.text), 1);
    GrowthCertificate sym = certify_ray(f, R);
    ASSERT_EQ(sym.route, "symbolic") << c.text;
    EXPECT_EQ(sym.N, c.N) << c.text;
    GrowthCertificate num = certify_ray(f, R, numeric);
    EXPECT_EQ(num.route, "numeric");
    EXPECT_TRUE(num.validated) << c.text;
    EXPECT_LE(std::abs(num.N - sym.N), 1) << c.text << ": numeric " << num.N << " symbolic " << sym.N;
    expect_bound_at_fresh_points(*f.expr, R, num);
  }
}

TEST(Properties, CertificatesSurviveDoubledDensity) {
  std::vector<Field> fields = {quad(), expr_field(parse("x1*log(x1^2 + x2^2 + 1)"), 2),
                               expr_field(parse("sqrt(x1^2 + 1)*x2 - x1"), 2),
                               counterexample_field(shared_counterexample())};
  for (const Field& f : fields) {
    for (const StandardizedRay& R : sample_rays(2, 12, 17, 10.0)) {
      GrowthCertificate c = certify_ray(f, R);
      ASSERT_TRUE(c.validated) << f.name;
      EXPECT_TRUE(recheck_certificate(f, R, c)) << f.name;
      for (const CertificateSample& s : c.samples) {
        if (s.r > c.t) {
          EXPECT_LE(s.abs_f, s.bound) << f.name;
        }
      }
      if (f.expr) expect_bound_at_fresh_points(*f.expr, R, c);
    }
  }
}

TEST(PolynomialCone, QuadraticCoversEveryDirection) {
  ConeResult res = find_polynomial_cone(quad());
  EXPECT_EQ(res.certificate.N, 2);
  EXPECT_GE(res.cone.radius, std::numbers::pi * (1 - 1e-12));
  for (const Vec& u : circle_grid(64)) EXPECT_TRUE(res.cone.contains(u));
}

TEST(PolynomialCone, PoleExcludesDiagonal) {
  ConeResult res = find_polynomial_cone(expr_field(parse("1/(x1 - x2)"), 2));
  EXPECT_GT(res.cone.radius, 0.0);
  EXPECT_FALSE(res.cone.contains(Vec{1, 1}));
  EXPECT_FALSE(res.cone.contains(Vec{-1, -1}));
  EXPECT_LE(res.certificate.N, 1);
  // Every direction kept in the cone certifies on its own ray.
  for (double t = -1.0; t <= 1.0; t += 0.25) {
    Vec u = direction_2d(angle_2d(res.cone.center) + t * res.cone.radius);
    GrowthCertificate c = certify_ray(expr_field(parse("1/(x1 - x2)"), 2), StandardizedRay(Vec{0, 0}, u));
    EXPECT_TRUE(c.validated);
  }
}

TEST(PolynomialCone, Counterexample) {
  ConeResult res = find_polynomial_cone(counterexample_field(shared_counterexample()));
  EXPECT_GT(res.cone.radius, 0.0);
  EXPECT_LE(res.certificate.N, 3);
  EXPECT_TRUE(res.certificate.validated);
}

TEST(PolynomialCone, NothingCertifiable) {
  EXPECT_THROW(find_polynomial_cone(alpha_radial_field()), UncertifiableOnSchedule);
}

TEST(SphereSup, Examples) {
  Field ce = counterexample_field(shared_counterexample());
  double want = 18.0 * std::exp(10.0);
  EXPECT_NEAR(sphere_sup(ce, 10.0), want, 1e-6 * want);
  EXPECT_NEAR(sphere_sup(quad(), 7.0), 49.0, 1e-12);
  // r^2 = 1 < a, where the profile is identically one.
  EXPECT_GT(shared_counterexample()->a<double>(), 1.0);
  EXPECT_EQ(sphere_sup(ce, 1.0), 1.0);
  EXPECT_THROW(sphere_sup(quad(), 0.0), std::invalid_argument);
}

TEST(Survey, ConstantAndLinear) {
  SurveyConfig cfg;
  cfg.count = 10;
  cfg.trace_radii = {5.0};
  RaySurveyReport one = survey_rays(expr_field(parse("1"), 2), cfg);
  ASSERT_EQ(one.rays.size(), 10u);
  for (const RayOutcome& o : one.rays) {
    ASSERT_TRUE(o.certificate);
    EXPECT_EQ(o.certificate->N, 0);
    // d carries the certificate's 1e-9 rounding guard.
    EXPECT_NEAR(o.certificate->d, 1.0, 1e-8);
  }
  RaySurveyReport lin = survey_rays(expr_field(parse("x1"), 2), cfg);
  for (const RayOutcome& o : lin.rays) {
    ASSERT_TRUE(o.certificate);
    EXPECT_EQ(o.certificate->N, 1);
  }
  EXPECT_EQ(lin.validated, 10u);
  SurveyConfig none;
  none.count = 0;
  EXPECT_THROW(survey_rays(quad(), none), std::invalid_argument);
}

TEST(Survey, AggregatesAreMaxima) {
  SurveyConfig cfg;
  cfg.count = 25;
  cfg.trace_radii = {};
  RaySurveyReport rep = survey_rays(expr_field(parse("x1^2*x2 + log(x1^2 + 2) + x2"), 2), cfg);
  long N = 0;
  double d = 0.0;
  std::size_t validated = 0;
  for (const RayOutcome& o : rep.rays) {
    if (!o.certificate || !o.certificate->validated) continue;
    N = std::max(N, o.certificate->N);
    d = std::max(d, o.certificate->d);
    ++validated;
  }
  EXPECT_EQ(rep.validated, validated);
  EXPECT_EQ(rep.N_U, N);
  EXPECT_EQ(rep.d_U, d);
}

TEST(Survey, Deterministic) {
  SurveyConfig cfg;
  cfg.count = 8;
  cfg.trace_radii = {5.0};
  Field f = counterexample_field(shared_counterexample());
  RaySurveyReport a = survey_rays(f, cfg), b = survey_rays(f, cfg);
  ASSERT_EQ(a.rays.size(), b.rays.size());
  for (std::size_t i = 0; i < a.rays.size(); ++i) {
    EXPECT_EQ(a.rays[i].ray, b.rays[i].ray);
    ASSERT_EQ(a.rays[i].certificate.has_value(), b.rays[i].certificate.has_value());
    if (a.rays[i].certificate) {
      EXPECT_EQ(a.rays[i].certificate->N, b.rays[i].certificate->N);
      EXPECT_EQ(a.rays[i].certificate->d, b.rays[i].certificate->d);
      EXPECT_EQ(a.rays[i].certificate->t, b.rays[i].certificate->t);
    }
  }
  EXPECT_EQ(a.sphere_trace[0].sup, b.sphere_trace[0].sup);
  // Different seeds sample different rays.
  cfg.seed = 43;
  EXPECT_FALSE(survey_rays(f, cfg).rays[0].ray == a.rays[0].ray);
}

TEST(Survey, CounterexamplePolynomialOnRaysExponentialOnSpheres) {
  auto start = std::chrono::steady_clock::now();
  SurveyConfig cfg;
  cfg.trace_radii = {10.0, 15.0, 20.0};
  RaySurveyReport rep = survey_rays(counterexample_field(shared_counterexample()), cfg);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(rep.validated, 100u);
  EXPECT_LE(rep.N_U, 3);
  for (const RayOutcome& o : rep.rays) EXPECT_TRUE(o.failure.empty()) << o.failure;
  for (const SphereTracePoint& p : rep.sphere_trace) EXPECT_GE(p.sup / std::exp(p.r), 1.0) << p.r;
  EXPECT_LT(seconds, 60.0);
}
