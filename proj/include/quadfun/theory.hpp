#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "quadfun/frequency.hpp"
#include "quadfun/weights.hpp"

namespace quadfun {

/// Norms of the two distributions that enter the risk bounds.
struct DistributionNorms {
  double l2_p = 0.0;  // ||P||_2
  double l2_q = 0.0;
  double b_p = 0.0;   // ||P||_b
  double b_q = 0.0;
  double a_p = 0.0;   // ||P||_a
  double a_q = 0.0;
};

/// |bias(S_hat_Z)| <= ||P||_b ||Q||_b sup_{z not in Z} b_z^2 / a_z^2.
/// A zero norm gives 0; otherwise an inconsistent pair gives +inf.
double bias_bound(double norm_b_p, double norm_b_q, const WeightFamily& a,
                  const WeightFamily& b, int zeta, int dimension);

/// Var(S_hat_Z) <= 2||P||_2||Q||_2/n^2 sum a^{-4}
///                + (||Q||_b^2||P||_b + ||P||_b^2||Q||_b)/n R_{a,b,Z}
///                + 2||P||_a^2||Q||_a^2/n.
double variance_bound(const DistributionNorms& norms, const WeightFamily& a,
                      const WeightFamily& b, const FrequencySet& frequencies, double n);

enum class BoundMode { inner_product, norm };

/// Squared bias bound plus variance bound. BoundMode::norm collapses Q onto P.
double mse_bound(const DistributionNorms& norms, const WeightFamily& a,
                 const WeightFamily& b, const FrequencySet& frequencies, int zeta,
                 double n, BoundMode mode = BoundMode::inner_product);

enum class Regime { parametric, nonparametric, inconsistent, upper_bound_only };
enum class RateVariable { n, log_n };

std::string_view to_string(Regime regime) noexcept;

/// Minimax MSE ~ variable^exponent, up to log factors.
struct RatePrediction {
  double exponent = 0.0;
  bool infinite = false;
  Regime regime = Regime::nonparametric;
  RateVariable variable = RateVariable::n;
  std::string log_factor_note;
};

/// Table of minimax rates for log / polynomial / exponential / gaussian weight
/// pairs, plus band-limited and constant weights.
RatePrediction minimax_rate(const WeightFamily& a, const WeightFamily& b,
                            int dimension);

struct LowerBound {
  double rate = 0.0;
  int zeta = 0;          // Le Cam radius
  bool smooth = true;    // B_zeta >= kappa zeta^{2D}
  double strength_a = 0.0;
  double strength_b = 0.0;
};

/// Minimax lower-bound rate: max{(A/B)^2, 1/n} on the smooth branch, or
/// max{A_m^2 / n^{8/3}, 1/n} with m = ceil(n^{2/(3D)}) otherwise.
LowerBound lower_bound_rate(const WeightFamily& a, const WeightFamily& b, double n,
                            int dimension, double kappa = 2.0);

/// exp(n c^2 zeta^{D/2}) - 1; +inf when the exponent overflows.
double tv_bound(double n, double c, int zeta, int dimension);

struct RatesMatchRow {
  int zeta = 0;
  double ratio_bias = 0.0;      // (b_zeta^4 / a_zeta^4) / (A/B)^2
  double ratio_variance = 0.0;  // b^4 B^2 / (a^4 sum a^{-4} zeta^D)
};

struct RatesMatchReport {
  std::vector<RatesMatchRow> rows;
  bool match = false;
};

/// Checks that the upper- and lower-bound balance conditions agree up to
/// constants across a grid of radii. a_zeta, b_zeta are the weights at the
/// shell anchor (zeta, 0, ..., 0) (or (zeta, 1, ..., 1) for rules without zero
/// coordinates).
RatesMatchReport rates_match_check(const WeightFamily& a, const WeightFamily& b,
                                   int dimension, const std::vector<int>& zeta_grid,
                                   double band_low = 1e-2, double band_high = 1e2);

}  // namespace quadfun
