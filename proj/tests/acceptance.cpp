#include <unistd.h>

#include <chrono>
#include <cmath>
#include <compare>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "logrowth/cones.hpp"
#include "logrowth/counterexample.hpp"
#include "logrowth/logpow.hpp"
#include "logrowth/prepare.hpp"
#include "logrowth/ray_growth.hpp"
#include "support.hpp"

using namespace logrowth;
using testing_support::Oracle;
using testing_support::rel_err;
using testing_support::Rng;

namespace {

using M = LogPowMonomial;

/// Collects failures of one criterion; the first few are printed.
struct Check {
  bool ok = true;
  int shown = 0;
  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (shown++ < 5) std::cerr << "    " << what << "\n";
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

Oracle oracle_alpha(const Oracle& x) {
  Oracle s = sqrt(x);
  return 2 * exp(s) * (s - 1);
}

Oracle to_oracle(const Rational& q) { return Oracle(numerator(q).str()) / Oracle(denominator(q).str()); }

Oracle oracle_log_at_exp(const M& m, const Oracle& L) {
  Oracle acc = to_oracle(m[0]) * L;
  Oracle level = L;
  for (std::size_t j = 1; j <= m.depth(); ++j) {
    acc += to_oracle(m[j]) * log(level);
    level = log(level);
  }
  return acc;
}

M tiny_monomial(Rng& rng) {
  static const Rational alphabet[] = {Rational(-1), Rational(0), Rational(0), Rational(1, 2), Rational(1)};
  std::size_t len = static_cast<std::size_t>(rng.integer(1, 3));
  std::vector<Rational> q;
  for (std::size_t j = 0; j < len; ++j) q.push_back(alphabet[rng.integer(0, 4)]);
  return M(q);
}

/// Log exponents non-increasing in magnitude so each level dominates the
/// deeper ones at e^200.
M dominant_monomial(Rng& rng, std::size_t max_depth) {
  std::vector<Rational> q{Rational(rng.integer(-20, 20), rng.integer(1, 4))};
  std::size_t depth = static_cast<std::size_t>(rng.integer(0, static_cast<long>(max_depth)));
  long bound = 16;
  for (std::size_t j = 1; j <= depth; ++j) {
    long k = rng.integer(-bound, bound);
    q.push_back(Rational(k, 4));
    if (k != 0) bound = std::abs(k);
  }
  return M(q);
}

DefinableSet atom(const char* text, Cmp c) { return DefinableSet::atom(2, parse(text), c); }

DefinableSet half_strip() {
  return DefinableSet::conj({atom("x1", Cmp::Gt), atom("x2", Cmp::Gt), atom("x2 - 1", Cmp::Lt)});
}

const Counterexample& shared() {
  static const Counterexample ce;
  return ce;
}

std::shared_ptr<const Counterexample> shared_ptr_ce() {
  static auto ce = std::make_shared<const Counterexample>();
  return ce;
}

void claim1(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  Claim1Report rep = shared().verify_claim1({2.0, 4.0, 9.0});
  double secs = seconds_since(t0);
  c.require(rep.entries.size() == 3, "expected three entries");
  for (const Claim1Entry& e : rep.entries) {
    Oracle s = sqrt(Oracle(e.x));
    Oracle argmax = exp(s), maximum = 2 * exp(s) * (s - 1);
    c.require(rel_err(Oracle(e.maximum.argmax), argmax) <= Oracle(1e-6), "argmax at x=" + num(e.x));
    c.require(rel_err(Oracle(e.maximum.value), maximum) <= Oracle(1e-6), "max at x=" + num(e.x));
    c.require(e.derivatives.size() == 4, "four ordinates at x=" + num(e.x));
    for (const DerivativeCheck& d : e.derivatives) {
      Oracle ly = log(Oracle(d.y));
      Oracle exact = Oracle(e.x) - ly * ly;
      double scale = std::max(1.0, std::abs(exact.convert_to<double>()));
      c.require(std::abs(d.finite_difference - exact.convert_to<double>()) <= 1e-6 * scale,
                "dh/dy at x=" + num(e.x) + " y=" + num(d.y));
    }
  }
  c.require(rep.ok(), "library report not ok");
  c.require(secs < 1.0, "runtime " + num(secs));
}

void circle_maxima(Check& c) {
  const Counterexample& ce = shared();
  auto t0 = std::chrono::steady_clock::now();
  for (double r : {2.0, 3.0, 5.0, 10.0, 15.0}) {
    Oracle want = oracle_alpha(Oracle(r * r));
    c.require(rel_err(Oracle(ce.max_on_circle(r).value), want) <= Oracle(1e-6), "alpha(r^2) at r=" + num(r));
  }
  for (double r : {5.0, 10.0, 15.0, 20.0, 25.0})
    c.require(ce.max_on_circle(r).value >= std::exp(r), "exp(r) at r=" + num(r));
  double secs = seconds_since(t0);
  c.require(secs < 10.0, "runtime " + num(secs));
}

void find_a_check(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  CounterexampleParams p = find_a();
  double secs = seconds_since(t0);
  c.require(p.residual <= 1e-12, "residual " + num(p.residual));
  c.require(p.a_double > 1.2 && p.a_double < 1.4, "a = " + num(p.a_double));
  Oracle a = to_oracle(p.a);
  c.require(abs(Oracle(oracle_alpha(a) - 1)) <= Oracle(1e-12), "oracle residual at a");
  c.require(oracle_alpha(Oracle(1.2)) < 1 && oracle_alpha(Oracle(1.35)) > 1, "oracle bracket");
  c.require(eval_alpha(1.2) < 1.0 && eval_alpha(1.35) > 1.0, "library bracket");
  c.require(secs < 0.1, "runtime " + num(secs));
}

void classifier(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  const auto& corpus = testing_support::fragment_corpus();
  c.require(corpus.size() >= 20, "corpus size " + std::to_string(corpus.size()));
  for (const auto& entry : corpus) {
    const std::string text = entry.text;
    GrowthClass gc = classify_growth(parse(text));
    if (gc.kind != GrowthKind::PolyBounded) {
      c.require(false, text + ": " + gc.reason);
      continue;
    }
    c.require(gc.N == entry.N, text + ": N = " + std::to_string(gc.N));
    c.require(gc.oracle.has_value(), text + ": no oracle report");
    if (!gc.oracle) continue;
    for (const auto& w : gc.oracle->windows) {
      if (w.x0 < 1e6 || !w.slope) continue;
      c.require(*w.slope <= static_cast<double>(gc.N) + 0.2, text + ": slope " + num(*w.slope));
    }
  }
  double secs = seconds_since(t0);
  c.require(secs < 30.0, "runtime " + num(secs));
}

void half_strip_cones(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  DefinableSet s = half_strip();
  std::vector<double> radii = default_radii();
  TangentBaseResult tb = tangent_base_at_infinity(s, radii, 1e-2);
  DirectionSet axis;
  axis.add({1.0, 0.0});
  double h = hausdorff_distance(tb.base, axis);
  c.require(h <= 1e-2, "tangent base Hausdorff " + num(h));
  c.require(strong_base_at_infinity(s, radii).empty(), "strong base not empty");
  for (double t : {-1.0, 0.0, 0.5, 1.0, 1.5}) {
    bool want = t > 0.0 && t < 1.0;
    c.require(ray_in_strong_ray_cone(s, standardize_ray(Vec{0, t}, Vec{1, 0}), radii) == want,
              "ray membership at t=" + num(t));
  }
  double secs = seconds_since(t0);
  c.require(secs < 10.0, "runtime " + num(secs));
}

void complement_density(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  DensityReport r = density_report(DefinableSet::negation(half_strip()), default_radii());
  double secs = seconds_since(t0);
  c.require(r.strongly_spherically_dense, "not strongly spherically dense");
  c.require(!r.strongly_ray_dense, "strongly ray dense");
  c.require(secs < 10.0, "runtime " + num(secs));
}

void counterexample_survey(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  SurveyConfig cfg;
  cfg.count = 100;
  cfg.trace_radii = {10.0, 15.0, 20.0};
  Field f = counterexample_field(shared_ptr_ce());
  RaySurveyReport rep = survey_rays(f, cfg);
  double secs = seconds_since(t0);
  c.require(rep.rays.size() == 100, "ray count " + std::to_string(rep.rays.size()));
  c.require(rep.validated == 100, "validated " + std::to_string(rep.validated));
  c.require(rep.N_U <= 3, "N_U = " + std::to_string(rep.N_U));
  for (const RayOutcome& o : rep.rays)
    c.require(o.certificate && o.certificate->validated && recheck_certificate(f, o.ray, *o.certificate),
              "certificate fails recheck");
  c.require(rep.sphere_trace.size() == 3, "trace size");
  for (const SphereTracePoint& p : rep.sphere_trace) {
    c.require(p.sup / std::exp(p.r) >= 1.0, "sup/exp(r) at r=" + num(p.r));
    // Independent value: the sphere maximum is alpha(r^2).
    c.require(rel_err(Oracle(p.sup), oracle_alpha(Oracle(p.r * p.r))) <= Oracle(1e-6), "sup vs alpha at r=" + num(p.r));
  }
  c.require(secs < 60.0, "runtime " + num(secs));
}

void order_properties(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(10007);
  for (int i = 0; i < 10000; ++i) {
    M a = tiny_monomial(rng), b = tiny_monomial(rng), x = tiny_monomial(rng);
    auto ab = lex_compare(a, b), ba = lex_compare(b, a);
    c.require(ab == std::strong_ordering::less || ab == std::strong_ordering::equal ||
                  ab == std::strong_ordering::greater,
              "incomparable pair");
    c.require((ab == std::strong_ordering::less) == (ba == std::strong_ordering::greater), "antisymmetry");
    c.require((ab == std::strong_ordering::equal) == (a.exponents() == b.exponents()), "equality");
    if (a <= b && b <= x) c.require(a <= x, "transitivity " + to_string(a) + " " + to_string(b) + " " + to_string(x));
  }
  Rng mono(200);
  PrecisionScope scope(256);
  const Real X = exp(Real(200));
  const Oracle L(200);
  for (int i = 0; i < 1000; ++i) {
    M m = dominant_monomial(mono, 3);
    if (i % 10 == 0) m = M::power(Rational(mono.integer(-5, 5)));
    long N = bound_exponent(m);
    Oracle log_m = oracle_log_at_exp(m, L);
    c.require(log_m <= Oracle(N) * L, "upper bound " + to_string(m));
    bool exact = m.depth() == 0 && m[0] == N;
    if (!exact) c.require(log_m > Oracle(N - 1) * L, "minimality " + to_string(m));
    Oracle lib(log_eval_monomial(m, X).str(60, std::ios_base::scientific));
    c.require(abs(Oracle(lib - log_m)) < Oracle(1e-45) * (1 + abs(log_m)), "extended precision " + to_string(m));
  }
  double secs = seconds_since(t0);
  c.require(secs < 30.0, "runtime " + num(secs));
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void reproducibility(Check& c) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("logrowth_acceptance_" + std::to_string(getpid()));
  fs::create_directories(dir);
  std::string first = (dir / "survey.json").string(), second = (dir / "replay.json").string();
  std::string cli = LOGROWTH_CLI_PATH;
  int a = std::system((cli + " survey --builtin counterexample --out " + first + " 2>/dev/null").c_str());
  int b = std::system((cli + " survey --config " + first + " --out " + second + " 2>/dev/null").c_str());
  c.require(a == 0 && b == 0, "cli exit status");
  std::regex stamp("\"generated_at\": \"[^\"]*\"");
  std::string x = std::regex_replace(slurp(first), stamp, ""), y = std::regex_replace(slurp(second), stamp, "");
  c.require(!x.empty(), "empty report");
  c.require(x == y, "replay differs");
  fs::remove_all(dir);
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Check&)> run;
  };
  std::vector<Criterion> criteria = {
      {"claim1", claim1},
      {"circle_maxima", circle_maxima},
      {"find_a", find_a_check},
      {"classifier", classifier},
      {"half_strip_cones", half_strip_cones},
      {"complement_density", complement_density},
      {"counterexample_survey", counterexample_survey},
      {"order_properties", order_properties},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].run(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    double secs = seconds_since(t0);
    if (!c.ok) ++failed;
    std::printf("%s %zu %s (%.3f s)\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].name, secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
