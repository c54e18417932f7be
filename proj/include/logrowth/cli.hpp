#pragma once

/// \file
/// Command-line front end. run() turns a RunConfig into a report, so a
/// report's embedded config replays it exactly; dispatch() parses argv into
/// a RunConfig and writes the result.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "logrowth/io.hpp"

namespace logrowth {

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitVerificationFailed = 3;

struct RunOutcome {
  json result;
  /// Set when the command produced a table and CSV was requested.
  std::string csv;
  int status = kExitOk;
};

namespace detail {

inline Expr config_expr(const RunConfig& c) {
  if (c.expr.empty()) throw InputError("missing expression");
  return parse(c.expr, c.arity);
}

inline StandardizedRay config_ray(const RunConfig& c, std::size_t n) {
  if (c.o.size() != n || c.v.size() != n)
    throw InputError("ray needs --o and --v with " + std::to_string(n) + " coordinates each");
  double len = norm(c.v);
  if (!(len > 0.0)) throw InputError("ray direction must be nonzero");
  return standardize_ray(c.o, scaled(c.v, 1.0 / len));
}

inline RunOutcome run_eval(const RunConfig& c) {
  Expr e = config_expr(c);
  if (c.point.size() < max_var_index(e)) throw InputError("--at needs at least " + std::to_string(max_var_index(e)) + " coordinates");
  EvalResult<Real> r = eval(e, c.point, c.precision);
  json j{{"expr", to_string(e)}, {"point", c.point}, {"precision", c.precision}, {"defined", r.defined()}};
  if (r.defined()) {
    j["value"] = r.value.str(static_cast<std::streamsize>(digits10_for_bits(c.precision)), std::ios_base::scientific);
    j["approx"] = to_double(r.value);
  }
  return {j, {}, kExitOk};
}

inline RunOutcome run_classify(const RunConfig& c, bool prepare) {
  Expr e = config_expr(c);
  if (max_var_index(e) > 1) throw InputError("classify/prepare take a unary expression in x1");
  GrowthClass g = classify_growth(e, prepare_options(c));
  json j = growth_class_json(g, prepare);
  j["expr"] = to_string(e);
  return {j, {}, kExitOk};
}

inline RunOutcome run_counterexample(const RunConfig& c) {
  Counterexample ce(c.precision);
  const CounterexampleParams& p = ce.params();
  CircleOptions co;
  co.grid = c.grid_2d;
  co.starts = c.circle_starts;
  if (c.action == "trace") {
    if (!(c.trace_r > 0.0)) throw InputError("--r must be positive");
    std::vector<std::vector<double>> rows;
    json samples = json::array();
    for (auto [angle, value] : ce.trace(c.trace_r, c.trace_grid)) {
      rows.push_back({angle, value});
      samples.push_back({{"angle", angle}, {"f", value}});
    }
    CircleMax m = ce.max_on_circle(c.trace_r, co);
    json j{{"r", c.trace_r},
           {"grid", c.trace_grid},
           {"max", {{"value", m.value}, {"angle", m.angle}, {"value_text", m.value_text}}},
           {"samples", samples}};
    return {j, csv_table({"angle", "f"}, rows), kExitOk};
  }
  if (c.action != "verify") throw InputError("counterexample action must be verify or trace");

  bool ok = true;
  json a{{"a", rational_to_string(p.a)}, {"a_double", p.a_double}, {"residual", p.residual}};
  double below = eval_alpha(1.2), above = eval_alpha(1.35);
  a["alpha_1_2"] = below;
  a["alpha_1_35"] = above;
  a["ok"] = p.residual <= 1e-12 && p.a_double > 1.2 && p.a_double < 1.4 && below < 1.0 && above > 1.0;
  ok = ok && a["ok"].get<bool>();

  json gamma = json::array();
  for (double r : {1.0, 2.0, 3.0, 5.0, 10.0, 15.0, 20.0, 25.0}) {
    if (r > c.rmax) continue;
    CircleMax m = ce.max_on_circle(r, co);
    double expected = r > 1.0 ? eval_alpha(r * r) : 1.0;
    double rel = std::abs(m.value - expected) / expected;
    bool match = rel <= c.rel_tol;
    bool exceeds = r < 5.0 || m.value >= std::exp(r);
    gamma.push_back({{"r", r},
                     {"max", m.value},
                     {"max_text", m.value_text},
                     {"angle", m.angle},
                     {"alpha_r2", expected},
                     {"relative_error", rel},
                     {"matches_alpha", match},
                     {"exp_r", std::exp(r)},
                     {"exceeds_exp", exceeds}});
    ok = ok && match && exceeds;
  }

  Claim1Report c1 = ce.verify_claim1({2.0, 4.0, 9.0}, c.rel_tol);
  std::vector<double> eps;
  for (int k = 1; k <= 12; ++k) eps.push_back(std::pow(10.0, -k));
  Claim2Report c2 = ce.verify_claim2_continuity({p.a_double + 1.0, 10.0}, {0.25, 0.5}, eps);
  ok = ok && c1.ok() && c2.ok();

  // Both sides of the positive x-axis seam equal 1 where r^2 > a.
  json seam = json::array();
  {
    PrecisionScope scope(c.precision);
    const double delta = 1e-6;
    for (double r : {1.5, 2.0, 5.0, 10.0}) {
      double above_axis = to_double(ce.on_circle(Real(r), Real(delta)));
      double below_axis = to_double(ce.on_circle(Real(r), Real(Real(2) * real_pi() - Real(delta))));
      bool match = std::abs(above_axis - 1.0) <= 1e-9 && std::abs(below_axis - 1.0) <= 1e-9;
      seam.push_back({{"r", r}, {"delta", delta}, {"above_axis", above_axis}, {"below_axis", below_axis}, {"ok", match}});
      ok = ok && match;
    }
  }
  json j{{"find_a", a},
         {"gamma", gamma},
         {"claim1", claim1_json(c1)},
         {"claim2", claim2_json(c2)},
         {"seam", seam},
         {"ok", ok}};
  return {j, {}, ok ? kExitOk : kExitVerificationFailed};
}

inline RunOutcome run_cones(const RunConfig& c) {
  if (c.set.is_null()) throw InputError("cones needs --set FILE");
  DefinableSet A = parse_set_spec(c.set);
  std::vector<double> radii = default_radii(c.cone_schedule_max_j);
  SamplingOptions so = sampling_options(c);
  // Every verdict here comes from finite sampling.
  json j{{"mode", c.action}, {"arity", A.arity()}, {"radii", radii}, {"sampled", true}};
  if (c.action == "tangent") {
    TangentBaseResult t = tangent_base_at_infinity(A, radii, c.cone_tolerance, so);
    j["tangent_base"] = direction_set_json(t.base);
    j["extension_change"] = t.extension_change;
    j["stabilized"] = t.stabilized;
    j["tail_distances"] = t.tail_distances;
  } else if (c.action == "strong") {
    j["strong_base"] = direction_set_json(strong_base_at_infinity(A, radii, so));
  } else if (c.action == "raycone") {
    StandardizedRay R = config_ray(c, A.arity());
    j["ray"] = ray_json(R);
    j["epsilons"] = c.epsilons;
    j["in_tangent_ray_cone"] = ray_in_tangent_ray_cone(A, R, radii, c.epsilons, so);
    j["in_strong_ray_cone"] = ray_in_strong_ray_cone(A, R, radii, so);
  } else if (c.action == "density") {
    DensityReport d = density_report(A, radii, density_options(c), so);
    j["spherically_dense"] = d.spherically_dense;
    j["strongly_spherically_dense"] = d.strongly_spherically_dense;
    j["ray_dense"] = d.ray_dense;
    j["strongly_ray_dense"] = d.strongly_ray_dense;
    j["rays_sampled"] = d.rays_sampled;
    j["rays_in_tangent_cone"] = d.rays_in_tangent_cone;
    j["rays_in_strong_cone"] = d.rays_in_strong_cone;
    j["strong_witness"] = d.strong_witness ? ray_json(*d.strong_witness) : json(nullptr);
  } else {
    throw InputError("--mode must be tangent, strong, raycone or density");
  }
  return {j, {}, kExitOk};
}

inline RunOutcome run_certify_ray(const RunConfig& c) {
  Field f = make_field(c);
  StandardizedRay R = config_ray(c, f.arity);
  RayConfig rc = ray_config(c);
  json j{{"field", f.name}, {"ray", ray_json(R)}};
  try {
    GrowthCertificate cert = certify_ray(f, R, rc);
    json cj = certificate_json(cert);
    cj["recheck"] = recheck_certificate(f, R, cert, rc);
    j["certificate"] = cj;
    std::vector<std::vector<double>> rows;
    for (const CertificateSample& s : cert.samples) rows.push_back({s.r, s.abs_f, s.bound});
    bool ok = cert.validated && cj["recheck"].get<bool>();
    return {j, csv_table({"r", "abs_f", "bound"}, rows), ok ? kExitOk : kExitVerificationFailed};
  } catch (const UncertifiableOnSchedule& e) {
    j["certificate"] = nullptr;
    j["failure"] = e.what();
    return {j, {}, kExitVerificationFailed};
  }
}

inline RunOutcome run_survey(const RunConfig& c) {
  Field f = make_field(c);
  RaySurveyReport rep = survey_rays(f, survey_config(c));
  json j = survey_json(rep);
  j["field"] = f.name;
  std::vector<std::string> header;
  for (std::size_t i = 1; i <= f.arity; ++i) header.push_back("o" + std::to_string(i));
  for (std::size_t i = 1; i <= f.arity; ++i) header.push_back("v" + std::to_string(i));
  for (const char* h : {"N", "d", "t", "validated"}) header.push_back(h);
  std::vector<std::vector<double>> rows;
  for (const RayOutcome& o : rep.rays) {
    std::vector<double> row(o.ray.o);
    row.insert(row.end(), o.ray.v.begin(), o.ray.v.end());
    if (o.certificate) {
      row.push_back(static_cast<double>(o.certificate->N));
      row.push_back(o.certificate->d);
      row.push_back(o.certificate->t);
      row.push_back(o.certificate->validated ? 1.0 : 0.0);
    } else {
      row.insert(row.end(), {std::nan(""), std::nan(""), std::nan(""), 0.0});
    }
    rows.push_back(std::move(row));
  }
  bool ok = rep.validated == rep.rays.size();
  return {j, csv_table(header, rows), ok ? kExitOk : kExitVerificationFailed};
}

inline std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

/// Runs one command. Input problems throw InputError (or ParseError).
inline RunOutcome run(const RunConfig& c) {
  if (c.format != "json" && c.format != "csv") throw InputError("--format must be json or csv");
  if (c.precision < kMinPrecisionBits) throw InputError("precision must be at least 64 bits");
  RunOutcome out;
  if (c.command == "eval") out = detail::run_eval(c);
  else if (c.command == "classify") out = detail::run_classify(c, false);
  else if (c.command == "prepare") out = detail::run_classify(c, true);
  else if (c.command == "counterexample") out = detail::run_counterexample(c);
  else if (c.command == "cones") out = detail::run_cones(c);
  else if (c.command == "certify-ray") out = detail::run_certify_ray(c);
  else if (c.command == "survey") out = detail::run_survey(c);
  else throw InputError("unknown command \"" + c.command + "\"");
  if (c.format == "csv" && out.csv.empty())
    throw InputError("CSV output is available for counterexample trace, certify-ray and survey");
  return out;
}

/// {tool, version, generated_at, config, status, result}.
inline json make_report(const RunConfig& c, const RunOutcome& out) {
  return json{{"tool", kToolName},
              {"version", kToolVersion},
              {"generated_at", detail::utc_timestamp()},
              {"config", c},
              {"status", out.status},
              {"result", out.result}};
}

/// Default output file for a command, e.g. "survey.json".
inline std::string default_output_path(const RunConfig& c) {
  std::string name = c.command;
  if (!c.action.empty()) name += "-" + c.action;
  return name + (c.format == "csv" ? ".csv" : ".json");
}

inline int dispatch(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Growth at infinity of log-analytic functions: classification, preparation, cones and ray "
               "certificates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  RunConfig cfg;
  cfg.precision = precision_from_env();
  std::string config_path;
  std::string set_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--precision", cfg.precision, "Working precision in bits (default from LOGROWTH_PRECISION)");
    sub->add_option("--out", cfg.out, "Output file (default <command>.json)");
    sub->add_flag("--stdout", cfg.to_stdout, "Write the report to standard output");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--config", config_path, "Replay the config embedded in a report (or a bare config)");
  };
  auto field_options = [&](CLI::App* sub) {
    sub->add_option("expr", cfg.expr, "Field expression in x1..xn");
    sub->add_option("--arity", cfg.arity, "Number of variables");
    sub->add_option("--set", set_path, "Field spec file {\"expr\": ..., \"arity\": n}");
    sub->add_option("--builtin", cfg.builtin, "counterexample or alpha_radial");
  };
  auto ray_options = [&](CLI::App* sub) {
    sub->add_option("--o", cfg.o, "Ray offset, comma separated")->delimiter(',')->allow_extra_args(false);
    sub->add_option("--v", cfg.v, "Ray direction, comma separated")->delimiter(',')->allow_extra_args(false);
  };

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate an expression at a point");
  eval_cmd->add_option("expr", cfg.expr, "Expression (optional with --config)");
  eval_cmd->add_option("--at", cfg.point, "Point, comma separated")->delimiter(',')->allow_extra_args(false);
  eval_cmd->add_option("--arity", cfg.arity, "Number of variables");
  common(eval_cmd);

  CLI::App* classify_cmd = app.add_subcommand("classify", "Classify growth of a unary expression");
  classify_cmd->add_option("expr", cfg.expr, "Expression in x1 (optional with --config)");
  classify_cmd->add_option("--depth", cfg.depth, "Series terms kept");
  common(classify_cmd);

  CLI::App* prepare_cmd = app.add_subcommand("prepare", "Prepared form a x^q0 log^q1 ... u of a unary expression");
  prepare_cmd->add_option("expr", cfg.expr, "Expression in x1 (optional with --config)");
  prepare_cmd->add_option("--depth", cfg.depth, "Series terms kept");
  common(prepare_cmd);

  CLI::App* ce_cmd = app.add_subcommand("counterexample", "The non-polynomially-bounded planar function");
  ce_cmd->require_subcommand(1);
  CLI::App* verify_cmd = ce_cmd->add_subcommand("verify", "Check the circle maxima and both claims");
  verify_cmd->add_option("--rmax", cfg.rmax, "Largest circle radius checked");
  verify_cmd->add_option("--grid", cfg.grid_2d, "Angular grid for circle maxima");
  common(verify_cmd);
  CLI::App* trace_cmd = ce_cmd->add_subcommand("trace", "f on a circle, for plotting");
  trace_cmd->add_option("--r", cfg.trace_r, "Circle radius");
  trace_cmd->add_option("--grid", cfg.trace_grid, "Number of angles");
  common(trace_cmd);

  CLI::App* cones_cmd = app.add_subcommand("cones", "Tangent cones and density at infinity of a set");
  cones_cmd->add_option("--set", set_path, "Set spec file (optional with --config)");
  cones_cmd->add_option("--mode", cfg.action, "tangent, strong, raycone or density (optional with --config)")
      ->check(CLI::IsMember({"tangent", "strong", "raycone", "density"}));
  cones_cmd->add_option("--eps", cfg.epsilons, "Tolerances for the tangent ray cone")->delimiter(',');
  cones_cmd->add_option("--tol", cfg.cone_tolerance, "Hausdorff tolerance for the tangent base");
  ray_options(cones_cmd);
  common(cones_cmd);

  CLI::App* certify_cmd = app.add_subcommand("certify-ray", "Polynomial growth certificate along one ray");
  field_options(certify_cmd);
  ray_options(certify_cmd);
  certify_cmd->add_option("--rmax", cfg.r_max, "Largest radius sampled");
  common(certify_cmd);

  CLI::App* survey_cmd = app.add_subcommand("survey", "Certificates along seeded rays plus a sphere trace");
  field_options(survey_cmd);
  survey_cmd->add_option("--rays", cfg.rays, "Number of rays");
  survey_cmd->add_option("--seed", cfg.seed, "Sampler seed");
  survey_cmd->add_option("--trace-radii", cfg.trace_radii, "Radii of the sphere trace")->delimiter(',');
  common(survey_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    // Destination flags given now; on replay they redirect the output
    // without touching the embedded config.
    std::string out_path = cfg.out;
    bool to_stdout = cfg.to_stdout;
    if (sub == ce_cmd) cfg.action = ce_cmd->get_subcommands().front()->get_name();
    if (!config_path.empty()) {
      json file = read_json_file(config_path);
      RunConfig replay = (file.contains("config") ? file.at("config") : file).get<RunConfig>();
      if (replay.command != cfg.command || (sub == ce_cmd && replay.action != cfg.action))
        throw InputError("config is for \"" + replay.command + " " + replay.action + "\"");
      if (out_path.empty() && !to_stdout) {
        out_path = replay.out;
        to_stdout = replay.to_stdout;
      }
      cfg = replay;
    } else if (!set_path.empty()) {
      cfg.set = read_json_file(set_path);
    }
    if (cfg.command == "cones" && cfg.set.is_null()) throw InputError("cones needs --set FILE");

    RunOutcome result = run(cfg);
    std::string text = cfg.format == "csv" ? result.csv : make_report(cfg, result).dump(2) + "\n";
    if (to_stdout) {
      out << text;
    } else {
      std::string path = out_path.empty() ? default_output_path(cfg) : out_path;
      std::ofstream file(path, std::ios::binary);
      if (!file) throw InputError("cannot write " + path);
      file << text;
      err << "wrote " << path << "\n";
    }
    return result.status;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace logrowth
