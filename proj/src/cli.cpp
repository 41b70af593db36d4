#include "quadfun/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "quadfun/densities.hpp"
#include "quadfun/error.hpp"
#include "quadfun/harness.hpp"
#include "quadfun/theory.hpp"

namespace quadfun {

nlohmann::json json_number(double value) {
  if (std::isnan(value)) return "NAN";
  if (std::isinf(value)) return value > 0 ? "INF" : "-INF";
  return std::stod(fmt::format("{:.9g}", value));
}

nlohmann::json report_to_json(const EstimateReport& report) {
  return {{"kind", std::string(to_string(report.kind))},
          {"value", json_number(report.value)},
          {"imaginary_residual", json_number(report.imaginary_residual)},
          {"truncation", report.truncation},
          {"term_count", report.term_count}};
}

EstimateReport report_from_json(const nlohmann::json& doc) {
  EstimateReport report;
  report.kind = parse_estimand_kind(doc.at("kind").get<std::string>());
  report.value = doc.at("value").get<double>();
  report.imaginary_residual = doc.at("imaginary_residual").get<double>();
  report.truncation = doc.at("truncation").get<int>();
  report.term_count = doc.at("term_count").get<std::size_t>();
  return report;
}

namespace {

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

SampleSet load_samples(const std::string& path, std::istream& in, const std::string& label) {
  if (path == "-") return read_samples_csv(in, label);
  std::ifstream file(path);
  if (!file) throw ParseError("cannot open sample file '" + path + "'", 0);
  try {
    return read_samples_csv(file, label);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto dash = item.find('-', 1);
    try {
      if (dash != std::string::npos) {
        const int lo = std::stoi(item.substr(0, dash));
        const int hi = std::stoi(item.substr(dash + 1));
        for (int v = lo; v <= hi; ++v) values.push_back(v);
      } else {
        values.push_back(std::stoi(item));
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad integer list '" + text + "'");
    }
  }
  if (values.empty()) throw ConfigError("empty integer list");
  return values;
}

// estimate ---------------------------------------------------------------

struct EstimateOptions {
  std::string kind;
  std::string weights;
  std::string smoothness;
  std::string zeta = "closed_form";
  std::string samples_x;
  std::string samples_y;
};

int run_estimate(const EstimateOptions& o, Io io) {
  const auto kind = parse_estimand_kind(o.kind);
  const auto a = parse_weight_spec(o.weights);
  const auto b = o.smoothness.empty() ? a : parse_weight_spec(o.smoothness);
  const auto rule = parse_zeta_rule(o.zeta);
  const auto x = load_samples(o.samples_x, io.in, "X");
  std::optional<SampleSet> y;
  if (kind != EstimandKind::norm_sq) {
    if (o.samples_y.empty()) {
      throw ConfigError(fmt::format("--samples-y is required for --kind {}", o.kind));
    }
    y = load_samples(o.samples_y, io.in, "Y");
    if (y->dimension() != x.dimension()) {
      throw ParseError("sample files have different dimensions", 0);
    }
  }
  if (x.empty()) throw SampleSizeError("sample file is empty");
  if (kind == EstimandKind::norm_sq && x.size() < 2) {
    throw SampleSizeError(
        fmt::format("need n >= 2 for sample splitting (got n = {})", x.size()));
  }
  const std::size_t n = y ? std::min(x.size(), y->size()) : x.size();
  const int zeta = rule.resolve(a, b, x.dimension(), static_cast<double>(n));
  const auto frequencies = truncation_set(a, zeta, x.dimension());
  EstimateReport report;
  switch (kind) {
    case EstimandKind::inner_product:
      report = inner_product(x, *y, a, frequencies);
      break;
    case EstimandKind::norm_sq:
      report = norm_sq(x, a, frequencies);
      break;
    case EstimandKind::distance_sq:
      report = distance_sq(x, *y, a, frequencies);
      break;
  }
  io.out << report_to_json(report).dump() << '\n';
  return kExitOk;
}

// rates ------------------------------------------------------------------

struct RatesOptions {
  std::string a;
  std::string b;
  int dimension = 1;
};

int run_rates(const RatesOptions& o, Io io) {
  const auto rate = minimax_rate(parse_weight_spec(o.a), parse_weight_spec(o.b), o.dimension);
  nlohmann::json doc{{"exponent", rate.infinite ? nlohmann::json("INF") : json_number(rate.exponent)},
                     {"variable", rate.variable == RateVariable::n ? "n" : "log_n"},
                     {"regime", std::string(to_string(rate.regime))},
                     {"note", rate.log_factor_note}};
  io.out << doc.dump() << '\n';
  if (rate.infinite) {
    io.err << "inconsistent pair: the estimand may be infinite\n";
    return kExitInconsistent;
  }
  return kExitOk;
}

// bounds -----------------------------------------------------------------

struct BoundsOptions {
  std::string a;
  std::string b;
  int dimension = 1;
  int zeta = 1;
  double n = 0.0;
  std::string mode = "inner";
  DistributionNorms norms{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
};

int run_bounds(const BoundsOptions& o, Io io) {
  const auto a = parse_weight_spec(o.a);
  const auto b = parse_weight_spec(o.b);
  BoundMode mode;
  if (o.mode == "inner") {
    mode = BoundMode::inner_product;
  } else if (o.mode == "norm") {
    mode = BoundMode::norm;
  } else {
    throw ConfigError("--mode must be inner or norm");
  }
  DistributionNorms norms = o.norms;
  if (mode == BoundMode::norm) {
    norms.l2_q = norms.l2_p;
    norms.b_q = norms.b_p;
    norms.a_q = norms.a_p;
  }
  const auto frequencies = truncation_set(a, o.zeta, o.dimension);
  const double bias = bias_bound(norms.b_p, norms.b_q, a, b, o.zeta, o.dimension);
  const double variance = variance_bound(norms, a, b, frequencies, o.n);
  const double mse = mse_bound(norms, a, b, frequencies, o.zeta, o.n, mode);
  nlohmann::json doc{{"zeta", o.zeta},
                     {"term_count", frequencies.size()},
                     {"bias_bound", json_number(bias)},
                     {"variance_bound", json_number(variance)},
                     {"mse_bound", json_number(mse)},
                     {"variance_functional", json_number(variance_functional(a, b, frequencies))}};
  io.out << doc.dump() << '\n';
  if (!std::isfinite(bias)) {
    io.err << "inconsistent pair: bias bound is infinite\n";
    return kExitInconsistent;
  }
  return kExitOk;
}

// solve-zeta -------------------------------------------------------------

struct SolveOptions {
  std::string b;
  std::string a;
  int dimension = 1;
  double n = 0.0;
  int zeta_max = 1'000'000;
};

int run_solve(const SolveOptions& o, Io io) {
  const auto b = parse_weight_spec(o.b);
  const auto solution = select_zeta_lecam(b, o.n, o.dimension, o.zeta_max);
  nlohmann::json doc{{"zeta", solution.zeta},
                     {"strength", json_number(solution.strength)},
                     {"used_linear_scan", solution.used_linear_scan}};
  if (!o.a.empty()) {
    doc["closed_form"] = select_zeta_closed_form(parse_weight_spec(o.a), b, o.dimension, o.n);
  }
  io.out << doc.dump() << '\n';
  return kExitOk;
}

// lowerbound -------------------------------------------------------------

struct LowerBoundOptions {
  std::string b;
  std::string a = "constant";
  int dimension = 1;
  std::string zeta_grid = "1-8";
  double n = 1000.0;
  std::string regime = "smooth";
  std::uint64_t seed = 0;
};

int run_lowerbound(const LowerBoundOptions& o, Io io) {
  const auto b = parse_weight_spec(o.b);
  const auto a = parse_weight_spec(o.a);
  WorstCaseRegime regime;
  if (o.regime == "smooth") {
    regime = WorstCaseRegime::smooth;
  } else if (o.regime == "unsmooth") {
    regime = WorstCaseRegime::unsmooth;
  } else {
    throw ConfigError("--regime must be smooth or unsmooth");
  }
  const auto rows =
      run_worst_case_sweep(b, a, o.dimension, parse_int_list(o.zeta_grid), o.n, regime, o.seed);
  nlohmann::json sweep = nlohmann::json::array();
  io.err << fmt::format("{:>6} {:>10} {:>9} {:>12} {:>8} {:>12} {:>12}\n", "zeta", "c",
                        "analytic", "alternating", "random", "gap", "tv");
  for (const auto& r : rows) {
    sweep.push_back({{"zeta", r.zeta},
                     {"scale", json_number(r.scale)},
                     {"analytic_condition", r.analytic_condition},
                     {"alternating_valid", r.alternating_valid},
                     {"alternating_claims_ok", r.alternating_claims_ok},
                     {"random_valid", r.random_valid},
                     {"random_draws", r.random_draws},
                     {"gap", json_number(r.gap)},
                     {"tv_bound", json_number(r.tv)}});
    io.err << fmt::format("{:>6} {:>10.4g} {:>9} {:>12} {:>5}/{:<2} {:>12.6g} {:>12.6g}\n",
                          r.zeta, r.scale, r.analytic_condition ? "yes" : "no",
                          r.alternating_valid ? "valid" : "invalid", r.random_valid,
                          r.random_draws, r.gap, r.tv);
  }
  io.out << nlohmann::json{{"sweep", sweep}}.dump() << '\n';
  return kExitOk;
}

// experiment -------------------------------------------------------------

struct ExperimentOptions {
  std::string config;
  std::string output = "-";
  unsigned threads = 0;
};

int run_experiment(const ExperimentOptions& o, Io io) {
  nlohmann::json doc;
  try {
    if (o.config == "-") {
      doc = nlohmann::json::parse(io.in);
    } else {
      std::ifstream file(o.config);
      if (!file) throw ParseError("cannot open config '" + o.config + "'", 0);
      doc = nlohmann::json::parse(file);
    }
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what(), 0);
  }
  auto config = parse_experiment_config(doc);
  if (o.threads > 0) config.threads = o.threads;
  const auto result = run_mse_study(config);
  const auto sidecar = result_sidecar(config, result);
  if (o.output == "-") {
    write_result_csv(io.out, result);
  } else {
    std::ofstream csv(o.output);
    if (!csv) throw ConfigError("cannot write '" + o.output + "'");
    write_result_csv(csv, result);
    std::ofstream json(o.output + ".json");
    json << sidecar.dump(2) << '\n';
  }
  if (result.fit) {
    io.err << fmt::format("fitted slope {:.4f} +- {:.4f}\n", result.fit->slope,
                          result.fit->slope_stderr);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Estimate quadratic Fourier functionals of distributions and evaluate their rates"};
  app.name("quadfun");
  app.require_subcommand(1, 1);

  EstimateOptions estimate;
  auto* e = app.add_subcommand("estimate", "Estimate a functional from sample files");
  e->add_option("--kind", estimate.kind, "inner, norm or distance")->required();
  e->add_option("--weights", estimate.weights, "Weight spec kind[:param][@rule] for a")
      ->required();
  e->add_option("--smoothness", estimate.smoothness,
                "Weight spec for b, used by the closed_form and lecam rules (default: a)");
  e->add_option("--zeta", estimate.zeta, "closed_form, lecam or a fixed integer radius")
      ->capture_default_str();
  e->add_option("--samples-x", estimate.samples_x, "CSV of samples from P ('-' for stdin)")
      ->required();
  e->add_option("--samples-y", estimate.samples_y, "CSV of samples from Q");

  RatesOptions rates;
  auto* r = app.add_subcommand("rates", "Minimax MSE rate for a weight pair");
  r->add_option("--a", rates.a, "Weight spec of the functional")->required();
  r->add_option("--b", rates.b, "Weight spec of the smoothness class")->required();
  r->add_option("-D,--dimension", rates.dimension, "Dimension")->capture_default_str();

  BoundsOptions bounds;
  auto* bo = app.add_subcommand("bounds", "Bias, variance and MSE upper bounds");
  bo->add_option("--a", bounds.a, "Weight spec of the functional")->required();
  bo->add_option("--b", bounds.b, "Weight spec of the smoothness class")->required();
  bo->add_option("-D,--dimension", bounds.dimension, "Dimension")->capture_default_str();
  bo->add_option("--zeta", bounds.zeta, "Truncation radius")->capture_default_str();
  bo->add_option("-n,--n", bounds.n, "Sample size")->required();
  bo->add_option("--mode", bounds.mode, "inner or norm (collapses Q onto P)")
      ->capture_default_str();
  bo->add_option("--l2-p", bounds.norms.l2_p, "||P||_2")->capture_default_str();
  bo->add_option("--l2-q", bounds.norms.l2_q, "||Q||_2")->capture_default_str();
  bo->add_option("--b-p", bounds.norms.b_p, "||P||_b")->capture_default_str();
  bo->add_option("--b-q", bounds.norms.b_q, "||Q||_b")->capture_default_str();
  bo->add_option("--a-p", bounds.norms.a_p, "||P||_a")->capture_default_str();
  bo->add_option("--a-q", bounds.norms.a_q, "||Q||_a")->capture_default_str();

  SolveOptions solve;
  auto* s = app.add_subcommand("solve-zeta", "Solve B_zeta^2 = zeta^D n^2 for the radius");
  s->add_option("--b", solve.b, "Weight spec of the smoothness class")->required();
  s->add_option("--a", solve.a, "Also report the closed-form radius for this a");
  s->add_option("-D,--dimension", solve.dimension, "Dimension")->capture_default_str();
  s->add_option("-n,--n", solve.n, "Sample size")->required();
  s->add_option("--zeta-max", solve.zeta_max, "Search limit")->capture_default_str();

  LowerBoundOptions lower;
  auto* l = app.add_subcommand("lowerbound", "Sweep the worst-case perturbation family");
  l->add_option("--b", lower.b, "Weight spec of the smoothness class")->required();
  l->add_option("--a", lower.a, "Weight spec of the functional")->capture_default_str();
  l->add_option("-D,--dimension", lower.dimension, "Dimension")->capture_default_str();
  l->add_option("--zeta-grid", lower.zeta_grid, "Radii, e.g. 1-8 or 2,4,8")
      ->capture_default_str();
  l->add_option("-n,--n", lower.n, "Sample size for the TV bound")->capture_default_str();
  l->add_option("--regime", lower.regime, "smooth or unsmooth")->capture_default_str();
  l->add_option("--seed", lower.seed, "Seed of the random sign draws")->capture_default_str();

  ExperimentOptions experiment;
  auto* x = app.add_subcommand("experiment", "Run a Monte Carlo MSE study from a JSON config");
  x->add_option("--config", experiment.config, "Experiment config JSON ('-' for stdin)")
      ->required();
  x->add_option("--output", experiment.output,
                "CSV path ('-' for stdout); a JSON sidecar goes to <path>.json")
      ->capture_default_str();
  x->add_option("--threads", experiment.threads, "Worker threads (0: QUADFUN_THREADS or auto)")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& error) {
    return app.exit(error, out, err) == 0 ? kExitOk : kExitUsage;
  }

  const Io io{in, out, err};
  try {
    if (*e) return run_estimate(estimate, io);
    if (*r) return run_rates(rates, io);
    if (*bo) return run_bounds(bounds, io);
    if (*s) return run_solve(solve, io);
    if (*l) return run_lowerbound(lower, io);
    if (*x) return run_experiment(experiment, io);
  } catch (const InconsistencyError& error) {
    err << "error: " << error.what() << '\n';
    return kExitInconsistent;
  } catch (const ConfigError& error) {
    err << "error: " << error.what() << '\n';
    return kExitUsage;
  } catch (const DimensionError& error) {
    err << "error: " << error.what() << '\n';
    return kExitUsage;
  } catch (const Error& error) {
    err << "error: " << error.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace quadfun
