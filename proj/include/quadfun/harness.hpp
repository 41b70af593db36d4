#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "quadfun/densities.hpp"
#include "quadfun/estimators.hpp"
#include "quadfun/weights.hpp"

namespace quadfun {

struct ZetaRule {
  enum class Kind { closed_form, lecam, fixed };
  Kind kind = Kind::closed_form;
  int fixed_zeta = 0;

  static ZetaRule closed_form() { return {Kind::closed_form, 0}; }
  static ZetaRule lecam() { return {Kind::lecam, 0}; }
  static ZetaRule fixed(int zeta) { return {Kind::fixed, zeta}; }

  /// Resolves the radius for sample size n.
  int resolve(const WeightFamily& a, const WeightFamily& b, int dimension, double n) const;
  std::string describe() const;
};

/// "closed_form", "lecam", "fixed:<zeta>" or a bare positive integer.
ZetaRule parse_zeta_rule(std::string_view text);

struct ExperimentConfig {
  ReferenceDensity density_p;
  ReferenceDensity density_q;
  WeightFamily a;
  WeightFamily b;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 1;
  ZetaRule zeta_rule;
  std::uint64_t base_seed = 0;
  EstimandKind kind = EstimandKind::inner_product;
  unsigned threads = 0;  // 0: QUADFUN_THREADS, then hardware concurrency
};

struct ExperimentRow {
  std::size_t n = 0;
  int zeta = 0;
  double truth = 0.0;
  double mean_estimate = 0.0;
  double mse = 0.0;
  double mse_stderr = 0.0;
  bool single_replication = false;
  bool operator==(const ExperimentRow&) const = default;
};

struct RateFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  bool operator==(const RateFit&) const = default;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::optional<RateFit> fit;  // present when at least two rows have mse > 0
  bool operator==(const ExperimentResult&) const = default;
};

/// Worker count: explicit request, else QUADFUN_THREADS (0 = auto), else
/// hardware concurrency. Always at least 1.
unsigned worker_count(unsigned requested = 0);

/// Seed of stream s (0 = X, 1 = Y) for replication rep at sample size n:
/// base ^ splitmix64(splitmix64(splitmix64(n) ^ rep) ^ s).
std::uint64_t replication_seed(std::uint64_t base, std::uint64_t n, std::uint64_t rep,
                               std::uint64_t stream);

/// Exact value of the configured estimand (untruncated).
double exact_truth(const ExperimentConfig& config);

/// Thm. 1 bound for the configured estimator with exact norms of the fixture
/// densities. The norm estimator uses floor(n/2) for n. distance_sq has no
/// bound and throws ConfigError.
double theoretical_mse_bound(const ExperimentConfig& config, std::size_t n, int zeta);

void validate(const ExperimentConfig& config);

/// Monte Carlo MSE curve. Replications run on worker_count(config.threads)
/// threads and are merged by replication index, so the result does not
/// depend on the thread count.
ExperimentResult run_mse_study(const ExperimentConfig& config);

/// OLS of ln(mse) on ln(n).
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Header `n,zeta,truth,mean_estimate,mse,mse_stderr`.
void write_result_csv(std::ostream& out, const ExperimentResult& result);
nlohmann::json result_sidecar(const ExperimentConfig& config, const ExperimentResult& result);

struct WorstCaseRow {
  int zeta = 0;
  double scale = 0.0;
  bool analytic_condition = false;
  bool alternating_valid = false;
  bool alternating_claims_ok = false;
  int random_valid = 0;  // out of random_draws
  int random_draws = 0;
  double gap = 0.0;      // A/B (smooth) or A/zeta^{2D} (unsmooth)
  double tv = 0.0;
};

/// For each zeta tries the alternating signs and 16 seeded random sign
/// vectors; construction failures become rows.
std::vector<WorstCaseRow> run_worst_case_sweep(const WeightFamily& b, const WeightFamily& a,
                                               int dimension, const std::vector<int>& zeta_grid,
                                               double n,
                                               WorstCaseRegime regime = WorstCaseRegime::smooth,
                                               std::uint64_t seed = 0);

}  // namespace quadfun
