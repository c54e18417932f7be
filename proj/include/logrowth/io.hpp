#pragma once

/// \file
/// Run configuration, JSON serialization of results, set and field
/// specifications, and locale-independent CSV.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "logrowth/certificate.hpp"
#include "logrowth/cones.hpp"
#include "logrowth/counterexample.hpp"
#include "logrowth/logpow.hpp"
#include "logrowth/prepare.hpp"
#include "logrowth/ray_growth.hpp"

namespace logrowth {

using json = nlohmann::json;

inline constexpr const char* kToolName = "logrowth";
inline constexpr const char* kToolVersion = "0.1.0";

/// Malformed user input (bad set spec, unknown builtin, bad vector); maps
/// to exit status 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Everything a run depends on. Serialized into every report; replaying a
/// report's config reproduces it.
struct RunConfig {
  std::string command;
  std::string action;  ///< counterexample: verify|trace; cones: tangent|strong|raycone|density
  std::string expr;
  std::size_t arity = 0;
  std::string builtin;
  json set;            ///< set specification (cones) or field specification
  std::vector<double> point;
  std::vector<double> o;
  std::vector<double> v;

  unsigned precision = kDefaultPrecisionBits;
  std::size_t depth = 4;

  // Radial schedules.
  double r_min = 10.0;
  double r_max = 1e6;
  int validation_density = 4;
  int transient_density = 16;
  int cone_schedule_max_j = 20;  ///< cone radii 10 2^j, j <= this

  // Angular schedules.
  std::size_t grid_2d = 4096;
  std::size_t grid_3d = 8192;
  std::size_t circle_starts = 8;

  // Offset schedules.
  std::size_t ray_directions = 64;
  double offset_radius = 10.0;
  double offset_step = 0.5;

  // Tolerances.
  double tau = kBoundaryTolerance;
  double cone_tolerance = 1e-2;
  std::vector<double> epsilons = {0.1, 0.01};
  double rel_tol = 1e-6;

  // Counterexample.
  double rmax = 25.0;
  double trace_r = 10.0;
  std::size_t trace_grid = 4096;

  // Survey.
  std::size_t rays = 100;
  std::uint64_t seed = 42;
  std::vector<double> trace_radii = {5.0, 10.0, 15.0, 20.0};

  std::string format = "json";
  std::string out;
  bool to_stdout = false;
};

inline void to_json(json& j, const RunConfig& c) {
  j = json{{"command", c.command},
           {"action", c.action},
           {"expr", c.expr},
           {"arity", c.arity},
           {"builtin", c.builtin},
           {"set", c.set},
           {"point", c.point},
           {"o", c.o},
           {"v", c.v},
           {"precision", c.precision},
           {"depth", c.depth},
           {"r_min", c.r_min},
           {"r_max", c.r_max},
           {"validation_density", c.validation_density},
           {"transient_density", c.transient_density},
           {"cone_schedule_max_j", c.cone_schedule_max_j},
           {"grid_2d", c.grid_2d},
           {"grid_3d", c.grid_3d},
           {"circle_starts", c.circle_starts},
           {"ray_directions", c.ray_directions},
           {"offset_radius", c.offset_radius},
           {"offset_step", c.offset_step},
           {"tau", c.tau},
           {"cone_tolerance", c.cone_tolerance},
           {"epsilons", c.epsilons},
           {"rel_tol", c.rel_tol},
           {"rmax", c.rmax},
           {"trace_r", c.trace_r},
           {"trace_grid", c.trace_grid},
           {"rays", c.rays},
           {"seed", c.seed},
           {"trace_radii", c.trace_radii},
           {"format", c.format},
           {"out", c.out},
           {"stdout", c.to_stdout}};
}

/// Missing keys keep their defaults, so hand-written configs may be partial.
inline void from_json(const json& j, RunConfig& c) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key) && !j.at(key).is_null()) j.at(key).get_to(field);
  };
  get("command", c.command);
  get("action", c.action);
  get("expr", c.expr);
  get("arity", c.arity);
  get("builtin", c.builtin);
  if (j.contains("set")) c.set = j.at("set");
  get("point", c.point);
  get("o", c.o);
  get("v", c.v);
  get("precision", c.precision);
  get("depth", c.depth);
  get("r_min", c.r_min);
  get("r_max", c.r_max);
  get("validation_density", c.validation_density);
  get("transient_density", c.transient_density);
  get("cone_schedule_max_j", c.cone_schedule_max_j);
  get("grid_2d", c.grid_2d);
  get("grid_3d", c.grid_3d);
  get("circle_starts", c.circle_starts);
  get("ray_directions", c.ray_directions);
  get("offset_radius", c.offset_radius);
  get("offset_step", c.offset_step);
  get("tau", c.tau);
  get("cone_tolerance", c.cone_tolerance);
  get("epsilons", c.epsilons);
  get("rel_tol", c.rel_tol);
  get("rmax", c.rmax);
  get("trace_r", c.trace_r);
  get("trace_grid", c.trace_grid);
  get("rays", c.rays);
  get("seed", c.seed);
  get("trace_radii", c.trace_radii);
  get("format", c.format);
  get("out", c.out);
  get("stdout", c.to_stdout);
}

/// Module options derived from a config.
inline PrepareOptions prepare_options(const RunConfig& c) {
  PrepareOptions p;
  p.depth = c.depth;
  return p;
}

inline RayConfig ray_config(const RunConfig& c) {
  RayConfig r;
  r.r_min = c.r_min;
  r.r_max = c.r_max;
  r.validation_density = c.validation_density;
  r.transient_density = c.transient_density;
  r.prepare = prepare_options(c);
  return r;
}

inline SamplingOptions sampling_options(const RunConfig& c) {
  SamplingOptions s;
  s.grid_2d = c.grid_2d;
  s.grid_3d = c.grid_3d;
  s.tau = c.tau;
  return s;
}

inline DensityOptions density_options(const RunConfig& c) {
  DensityOptions d;
  d.ray_directions = c.ray_directions;
  d.offset_radius = c.offset_radius;
  d.offset_step = c.offset_step;
  d.tol = c.cone_tolerance;
  return d;
}

inline SurveyConfig survey_config(const RunConfig& c) {
  SurveyConfig s;
  s.count = c.rays;
  s.seed = c.seed;
  s.offset_radius = c.offset_radius;
  s.trace_radii = c.trace_radii;
  s.ray = ray_config(c);
  s.sphere.grid_2d = c.grid_2d;
  s.sphere.grid_3d = c.grid_3d;
  s.sphere.starts = c.circle_starts;
  return s;
}

// ---------------------------------------------------------------------------
// Set and field specifications

namespace detail {

inline DefinableSet parse_set_node(const json& j, std::size_t n) {
  if (!j.is_object()) throw InputError("set spec: every node must be a JSON object");
  if (j.contains("and") || j.contains("or")) {
    const json& parts = j.contains("and") ? j.at("and") : j.at("or");
    if (!parts.is_array() || parts.empty()) throw InputError("set spec: \"and\"/\"or\" needs a nonempty array");
    std::vector<DefinableSet> children;
    for (const json& p : parts) children.push_back(parse_set_node(p, n));
    return j.contains("and") ? DefinableSet::conj(std::move(children)) : DefinableSet::disj(std::move(children));
  }
  if (j.contains("not")) return DefinableSet::negation(parse_set_node(j.at("not"), n));
  if (j.contains("all")) return j.at("all").get<bool>() ? DefinableSet::all(n) : DefinableSet::none(n);
  if (j.contains("expr")) {
    if (!j.at("expr").is_string()) throw InputError("set spec: \"expr\" must be a string");
    std::string cmp = j.value("cmp", std::string("<"));
    Cmp c;
    try {
      c = parse_cmp(cmp);
    } catch (const std::invalid_argument&) {
      throw InputError("set spec: unknown comparison \"" + cmp + "\"");
    }
    return DefinableSet::atom(n, parse(j.at("expr").get<std::string>(), n), c);
  }
  throw InputError("set spec: node needs one of \"and\", \"or\", \"not\", \"all\", \"expr\"");
}

inline std::size_t max_arity_in(const json& j) {
  std::size_t n = 0;
  if (j.is_object()) {
    if (j.contains("expr") && j.at("expr").is_string()) n = max_var_index(parse(j.at("expr").get<std::string>()));
    for (const auto& [key, value] : j.items())
      if (key != "expr") n = std::max(n, max_arity_in(value));
  } else if (j.is_array()) {
    for (const json& x : j) n = std::max(n, max_arity_in(x));
  }
  return n;
}

}  // namespace detail

/// {"arity": n, "set": tree} or a bare tree (arity inferred from the
/// variables used, at least `min_arity`).
inline DefinableSet parse_set_spec(const json& j, std::size_t min_arity = 2) {
  try {
    const json& tree = j.contains("set") ? j.at("set") : j;
    std::size_t n = j.contains("arity") ? j.at("arity").get<std::size_t>()
                                        : std::max(min_arity, detail::max_arity_in(tree));
    if (n < 1) throw InputError("set spec: arity must be positive");
    return detail::parse_set_node(tree, n);
  } catch (const json::exception& e) {
    throw InputError(std::string("set spec: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

/// Field from a builtin name, an expression, or a spec {"expr", "arity"}.
inline Field make_field(const RunConfig& c, std::shared_ptr<const Counterexample> ce = nullptr) {
  if (!c.builtin.empty()) {
    if (c.builtin == "counterexample")
      return counterexample_field(ce ? ce : std::make_shared<const Counterexample>(c.precision));
    if (c.builtin == "alpha_radial") return alpha_radial_field();
    throw InputError("unknown builtin \"" + c.builtin + "\" (expected counterexample or alpha_radial)");
  }
  std::string text = c.expr;
  std::size_t n = c.arity;
  if (text.empty() && c.set.is_object()) {
    text = c.set.value("expr", std::string());
    n = c.set.value("arity", n);
  }
  if (text.empty()) throw InputError("no field given (use an expression, --set or --builtin)");
  Expr e = parse(text, n);
  if (n == 0) n = std::max<std::size_t>(2, max_var_index(e));
  return expr_field(e, n);
}

// ---------------------------------------------------------------------------
// Result serialization

inline json monomial_json(const LogPowMonomial& m) {
  json a = json::array();
  for (const Rational& q : m.exponents()) a.push_back(rational_to_string(q, true));
  return a;
}

inline json coefficient_json(const Coefficient& c) {
  json j{{"value", rational_to_string(c.value())}, {"approx", c.approx()}, {"exact", c.exact()}};
  if (!c.exact()) j["radius"] = to_double(c.radius());
  return j;
}

inline json series_json(const Series& s) {
  json terms = json::array();
  for (const Term& t : s.terms)
    terms.push_back({{"coefficient", coefficient_json(t.c)}, {"monomial", to_string(t.m)}});
  json j{{"terms", terms}};
  j["order"] = s.order ? json(to_string(*s.order)) : json(nullptr);
  return j;
}

inline json certificate_json(const GrowthCertificate& c) {
  json samples = json::array();
  for (const CertificateSample& s : c.samples) samples.push_back({{"r", s.r}, {"abs_f", s.abs_f}, {"bound", s.bound}});
  return json{{"N", c.N},
              {"d", c.d},
              {"t", c.t},
              {"validated", c.validated},
              {"mode", to_string(c.mode)},
              {"route", c.route},
              {"samples", samples}};
}

inline json oracle_json(const OracleReport& r) {
  json windows = json::array();
  for (const OracleWindow& w : r.windows)
    windows.push_back({{"x0", w.x0}, {"x1", w.x1}, {"slope", w.slope ? json(*w.slope) : json(nullptr)}});
  return json{{"windows", windows},
              {"trend", to_string(r.trend)},
              {"estimate", r.estimate ? json(*r.estimate) : json(nullptr)}};
}

inline json prepared_json(const PreparedForm& pf, bool with_samples) {
  json j{{"a", coefficient_json(pf.a)},
         {"monomial", to_string(pf.m)},
         {"exponents", monomial_json(pf.m)},
         {"d", pf.d},
         {"t", pf.t},
         {"validated", pf.validated},
         {"series", series_json(pf.series.series)},
         {"series_depth", pf.series.depth}};
  if (with_samples) {
    json s = json::array();
    for (const UnitSample& u : pf.samples) s.push_back({{"x", u.x}, {"u", u.u}});
    j["unit_samples"] = s;
  }
  return j;
}

/// {class, N, a, monomial, d, t, oracle_windows, ...}
inline json growth_class_json(const GrowthClass& g, bool with_samples) {
  json j{{"class", to_string(g.kind)}, {"N", g.N}};
  if (g.prepared) {
    j["a"] = rational_to_string(g.prepared->a.value());
    j["monomial"] = to_string(g.prepared->m);
    j["exponents"] = monomial_json(g.prepared->m);
    j["d"] = g.prepared->d;
    j["t"] = g.prepared->t;
    j["prepared"] = prepared_json(*g.prepared, with_samples);
  }
  if (g.certificate) j["certificate"] = certificate_json(*g.certificate);
  if (g.oracle) {
    json o = oracle_json(*g.oracle);
    j["oracle_windows"] = o["windows"];
    j["oracle_trend"] = o["trend"];
  } else {
    j["oracle_windows"] = json::array();
  }
  if (!g.reason.empty()) j["reason"] = g.reason;
  return j;
}

inline json vec_json(const Vec& v) { return json(v); }

inline json ray_json(const StandardizedRay& r) { return json{{"o", r.o}, {"v", r.v}}; }

inline json survey_json(const RaySurveyReport& rep) {
  json rays = json::array();
  for (const RayOutcome& o : rep.rays) {
    json r = ray_json(o.ray);
    r["certificate"] = o.certificate ? certificate_json(*o.certificate) : json(nullptr);
    if (!o.failure.empty()) r["failure"] = o.failure;
    rays.push_back(std::move(r));
  }
  json trace = json::array();
  for (const SphereTracePoint& p : rep.sphere_trace) trace.push_back({{"r", p.r}, {"sup", p.sup}});
  return json{{"N_U", rep.N_U},
              {"d_U", rep.d_U},
              {"validated", rep.validated},
              {"rays_total", rep.rays.size()},
              {"sphere_trace", trace},
              {"rays", rays}};
}

inline json direction_set_json(const DirectionSet& d) {
  json dirs = json::array();
  for (const Vec& v : d.directions) dirs.push_back(v);
  return json{{"count", d.directions.size()}, {"resolution", d.resolution}, {"directions", dirs}};
}

inline json claim1_json(const Claim1Report& r) {
  json entries = json::array();
  for (const Claim1Entry& e : r.entries) {
    json ds = json::array();
    for (const DerivativeCheck& d : e.derivatives)
      ds.push_back({{"y", d.y}, {"finite_difference", d.finite_difference}, {"exact", d.exact}, {"ok", d.ok}});
    entries.push_back({{"x", e.x},
                       {"argmax", e.maximum.argmax},
                       {"max", e.maximum.value},
                       {"expected_argmax", e.expected_argmax},
                       {"expected_max", e.expected_max},
                       {"argmax_ok", e.argmax_ok},
                       {"max_ok", e.max_ok},
                       {"value_far", e.value_far},
                       {"value_near", e.value_near},
                       {"boundary_ok", e.boundary_ok},
                       {"derivatives", ds},
                       {"ok", e.ok()}});
  }
  return json{{"entries", entries}, {"ok", r.ok()}};
}

inline json claim2_json(const Claim2Report& r) {
  json limits = json::array();
  for (const LimitSequence& l : r.limits)
    limits.push_back({{"name", l.name}, {"anchor", l.anchor}, {"eps", l.eps}, {"values", l.values}, {"ok", l.ok}});
  return json{{"limits", limits}, {"ok", r.ok()}};
}

// ---------------------------------------------------------------------------
// CSV

/// Rows of locale-independent numbers under a header.
inline std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  return out.str();
}

}  // namespace logrowth
