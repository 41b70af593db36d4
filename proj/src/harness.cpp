#include "quadfun/harness.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "quadfun/error.hpp"
#include "quadfun/numeric.hpp"
#include "quadfun/theory.hpp"

namespace quadfun {

int ZetaRule::resolve(const WeightFamily& a, const WeightFamily& b, int dimension,
                      double n) const {
  switch (kind) {
    case Kind::closed_form:
      return select_zeta_closed_form(a, b, dimension, n);
    case Kind::lecam:
      return select_zeta_lecam(b, n, dimension).zeta;
    case Kind::fixed:
      return fixed_zeta;
  }
  return fixed_zeta;
}

std::string ZetaRule::describe() const {
  switch (kind) {
    case Kind::closed_form:
      return "closed_form";
    case Kind::lecam:
      return "lecam";
    case Kind::fixed:
      return fmt::format("fixed:{}", fixed_zeta);
  }
  return "?";
}

ZetaRule parse_zeta_rule(std::string_view text) {
  if (text == "closed_form" || text == "closed-form") return ZetaRule::closed_form();
  if (text == "lecam") return ZetaRule::lecam();
  std::string_view digits = text;
  if (digits.starts_with("fixed:")) digits.remove_prefix(6);
  int zeta = 0;
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), zeta);
  if (ec != std::errc() || end != digits.data() + digits.size() || zeta < 0) {
    throw ConfigError("unknown zeta rule '" + std::string(text) +
                      "' (expected closed_form, lecam or fixed:<int>)");
  }
  return ZetaRule::fixed(zeta);
}

unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QUADFUN_THREADS")) {
    unsigned value = 0;
    const std::string_view text(env);
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && end == text.data() + text.size() && value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t replication_seed(std::uint64_t base, std::uint64_t n, std::uint64_t rep,
                               std::uint64_t stream) {
  return base ^ splitmix64(splitmix64(splitmix64(n) ^ rep) ^ stream);
}

void validate(const ExperimentConfig& config) {
  if (config.replications == 0) throw ConfigError("replications must be >= 1");
  if (config.n_grid.empty()) throw ConfigError("n_grid is empty");
  for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
    if (config.n_grid[i] == 0) throw ConfigError("sample sizes must be positive");
    if (i > 0 && config.n_grid[i] <= config.n_grid[i - 1]) {
      throw ConfigError("n_grid must be strictly increasing");
    }
  }
  if (config.density_p.dimension() != config.density_q.dimension()) {
    throw DimensionError("densities have different dimensions");
  }
  if (config.zeta_rule.kind == ZetaRule::Kind::fixed && config.zeta_rule.fixed_zeta < 0) {
    throw ConfigError("fixed zeta must be >= 0");
  }
}

double exact_truth(const ExperimentConfig& config) {
  const auto& p = config.density_p;
  const auto& q = config.density_q;
  double truth = 0.0;
  switch (config.kind) {
    case EstimandKind::inner_product:
      truth = exact_product(p, q, config.a);
      break;
    case EstimandKind::norm_sq:
      truth = exact_product(p, p, config.a);
      break;
    case EstimandKind::distance_sq:
      truth = exact_product(p, p, config.a) + exact_product(q, q, config.a) -
              2.0 * exact_product(p, q, config.a);
      break;
  }
  if (!std::isfinite(truth)) throw InconsistencyError("estimand is not finite");
  return truth;
}

double theoretical_mse_bound(const ExperimentConfig& config, std::size_t n, int zeta) {
  const auto& p = config.density_p;
  const auto& q = config.density_q;
  const auto flat = WeightFamily::constant();
  const auto norm = [](const ReferenceDensity& x, const ReferenceDensity& y,
                       const WeightFamily& w) { return std::sqrt(exact_product(x, y, w)); };
  DistributionNorms norms{norm(p, p, flat),     norm(q, q, flat),
                          norm(p, p, config.b), norm(q, q, config.b),
                          norm(p, p, config.a), norm(q, q, config.a)};
  const int d = p.dimension();
  const auto frequencies = truncation_set(config.a, zeta, d);
  switch (config.kind) {
    case EstimandKind::inner_product:
      return mse_bound(norms, config.a, config.b, frequencies, zeta, static_cast<double>(n));
    case EstimandKind::norm_sq:
      return mse_bound(norms, config.a, config.b, frequencies, zeta,
                       static_cast<double>(n / 2), BoundMode::norm);
    case EstimandKind::distance_sq:
      break;
  }
  throw ConfigError("no MSE bound for the distance estimator");
}

namespace {

double replicate(const ExperimentConfig& config, const FrequencySet& frequencies,
                 std::size_t n, std::size_t rep) {
  const auto seed_x = replication_seed(config.base_seed, n, rep, 0);
  const auto seed_y = replication_seed(config.base_seed, n, rep, 1);
  const auto x = sample(config.density_p, n, seed_x, "X");
  switch (config.kind) {
    case EstimandKind::inner_product:
      return inner_product(x, sample(config.density_q, n, seed_y, "Y"), config.a,
                           frequencies)
          .value;
    case EstimandKind::norm_sq:
      return norm_sq(x, config.a, frequencies).value;
    case EstimandKind::distance_sq:
      return distance_sq(x, sample(config.density_q, n, seed_y, "Y"), config.a, frequencies)
          .value;
  }
  return 0.0;
}

// Runs body(i) for i in [0, count) on up to `workers` threads; rethrows the
// first exception.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body body) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

ExperimentResult run_mse_study(const ExperimentConfig& config) {
  validate(config);
  const double truth = exact_truth(config);
  const int d = config.density_p.dimension();
  const unsigned workers = worker_count(config.threads);
  const std::size_t reps = config.replications;

  ExperimentResult result;
  for (std::size_t n : config.n_grid) {
    if (config.kind != EstimandKind::inner_product && n < 2) {
      throw SampleSizeError(fmt::format("need n >= 2 for sample splitting (got n = {})", n));
    }
    const int zeta = config.zeta_rule.resolve(config.a, config.b, d, static_cast<double>(n));
    const auto frequencies = truncation_set(config.a, zeta, d);
    std::vector<double> estimates(reps);
    parallel_for(reps, workers,
                 [&](std::size_t rep) { estimates[rep] = replicate(config, frequencies, n, rep); });

    ExperimentRow row;
    row.n = n;
    row.zeta = zeta;
    row.truth = truth;
    CompensatedSum mean;
    CompensatedSum squared_error;
    for (double e : estimates) {
      mean.add(e);
      squared_error.add((e - truth) * (e - truth));
    }
    row.mean_estimate = mean.value() / static_cast<double>(reps);
    row.mse = squared_error.value() / static_cast<double>(reps);
    row.single_replication = reps == 1;
    if (reps > 1) {
      CompensatedSum spread;
      for (double e : estimates) {
        const double deviation = (e - truth) * (e - truth) - row.mse;
        spread.add(deviation * deviation);
      }
      const double sd = std::sqrt(spread.value() / static_cast<double>(reps - 1));
      row.mse_stderr = sd / std::sqrt(static_cast<double>(reps));
    }
    result.rows.push_back(row);
  }

  if (result.rows.size() >= 2 &&
      std::all_of(result.rows.begin(), result.rows.end(),
                  [](const ExperimentRow& r) { return r.mse > 0.0; })) {
    std::vector<std::pair<double, double>> points;
    for (const auto& r : result.rows) points.emplace_back(static_cast<double>(r.n), r.mse);
    result.fit = fit_rate(points);
  }
  return result;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw FitError("rate fit needs at least two points");
  const double k = static_cast<double>(points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [n, mse] : points) {
    if (!(n > 0.0)) throw FitError(fmt::format("nonpositive sample size {}", n));
    if (!(mse > 0.0) || !std::isfinite(mse)) {
      throw FitError(fmt::format("nonpositive mse {} at n = {}", mse, n));
    }
    mean_x += std::log(n);
    mean_y += std::log(mse);
  }
  mean_x /= k;
  mean_y /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [n, mse] : points) {
    const double dx = std::log(n) - mean_x;
    sxx += dx * dx;
    sxy += dx * (std::log(mse) - mean_y);
  }
  if (sxx == 0.0) throw FitError("rate fit needs at least two distinct sample sizes");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  if (points.size() > 2) {
    double ssr = 0.0;
    for (const auto& [n, mse] : points) {
      const double r = std::log(mse) - (fit.intercept + fit.slope * std::log(n));
      ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / (k - 2.0) / sxx);
  }
  return fit;
}

ExperimentConfig parse_experiment_config(const nlohmann::json& doc) {
  try {
    auto p = density_from_json(doc.at("density_p"));
    auto q = doc.contains("density_q") ? density_from_json(doc.at("density_q")) : p;
    auto a = parse_weight_spec(doc.at("a").get<std::string>());
    auto b = doc.contains("b") ? parse_weight_spec(doc.at("b").get<std::string>()) : a;
    ExperimentConfig config{
        std::move(p),
        std::move(q),
        std::move(a),
        std::move(b),
        doc.at("n_grid").get<std::vector<std::size_t>>(),
        doc.value("replications", std::size_t{1}),
        parse_zeta_rule(doc.value("zeta_rule", std::string("closed_form"))),
        doc.value("base_seed", std::uint64_t{0}),
        parse_estimand_kind(doc.value("estimand", std::string("inner_product"))),
        doc.value("threads", 0u)};
    validate(config);
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  return {{"density_p", density_to_json(config.density_p)},
          {"density_q", density_to_json(config.density_q)},
          {"a", config.a.describe()},
          {"b", config.b.describe()},
          {"n_grid", config.n_grid},
          {"replications", config.replications},
          {"zeta_rule", config.zeta_rule.describe()},
          {"base_seed", config.base_seed},
          {"estimand", std::string(to_string(config.kind))}};
}

void write_result_csv(std::ostream& out, const ExperimentResult& result) {
  out << "n,zeta,truth,mean_estimate,mse,mse_stderr\n";
  for (const auto& r : result.rows) {
    out << fmt::format("{},{},{:.9g},{:.9g},{:.9g},{:.9g}\n", r.n, r.zeta, r.truth,
                       r.mean_estimate, r.mse, r.mse_stderr);
  }
}

nlohmann::json result_sidecar(const ExperimentConfig& config, const ExperimentResult& result) {
  nlohmann::json doc{{"config", config_to_json(config)}};
  if (result.fit) {
    doc["fit"] = {{"slope", result.fit->slope},
                  {"slope_stderr", result.fit->slope_stderr},
                  {"intercept", result.fit->intercept}};
  } else {
    doc["fit"] = nullptr;
  }
  doc["single_replication"] = config.replications == 1;
  return doc;
}

std::vector<WorstCaseRow> run_worst_case_sweep(const WeightFamily& b, const WeightFamily& a,
                                               int dimension, const std::vector<int>& zeta_grid,
                                               double n, WorstCaseRegime regime,
                                               std::uint64_t seed) {
  if (zeta_grid.empty()) throw ConfigError("zeta grid is empty");
  constexpr int kRandomDraws = 16;
  std::vector<WorstCaseRow> rows;
  for (int zeta : zeta_grid) {
    WorstCaseRow row;
    row.zeta = zeta;
    row.random_draws = kRandomDraws;
    const auto shape = make_worst_case(zeta, alternating_signs(zeta, dimension), b, dimension,
                                       regime, false);
    row.scale = shape.scale;
    row.analytic_condition = shape.analytic_condition;
    CompensatedSum strength_a;
    for (const auto& z : positive_orthant(zeta, dimension)) strength_a.add(a.inverse_square(z));
    const double volume = std::pow(static_cast<double>(zeta), dimension);
    row.gap = regime == WorstCaseRegime::smooth ? strength_a.value() / shape.strength_b
                                                : strength_a.value() / (volume * volume);
    row.tv = tv_bound(n, shape.scale, zeta, dimension);
    try {
      const auto g = make_worst_case(zeta, shape.signs, b, dimension, regime);
      row.alternating_valid = true;
      row.alternating_claims_ok =
          validate_worst_case(g.density, b, a, zeta, dimension, regime, n).ok();
    } catch (const NonnegativityViolation&) {
    }
    for (int draw = 0; draw < kRandomDraws; ++draw) {
      const auto signs =
          random_signs(zeta, dimension, splitmix64(seed ^ splitmix64(zeta)) + draw);
      try {
        make_worst_case(zeta, signs, b, dimension, regime);
        ++row.random_valid;
      } catch (const NonnegativityViolation&) {
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace quadfun
