#pragma once

#include <cstddef>
#include <string_view>

#include "quadfun/frequency.hpp"
#include "quadfun/spectral.hpp"
#include "quadfun/weights.hpp"

namespace quadfun {

enum class EstimandKind { inner_product, norm_sq, distance_sq };

std::string_view to_string(EstimandKind kind) noexcept;
EstimandKind parse_estimand_kind(std::string_view name);

struct EstimateReport {
  double value = 0.0;
  /// Imaginary part of the complex sum; a numerical-health diagnostic that
  /// vanishes up to rounding on negation-closed frequency sets.
  double imaginary_residual = 0.0;
  int truncation = 0;
  std::size_t term_count = 0;
  EstimandKind kind = EstimandKind::inner_product;

  bool operator==(const EstimateReport&) const = default;
};

/// The frequencies a truncated estimator with weights `a` sums over:
/// the l-infinity ball of radius zeta under a's rule, restricted to a's support.
FrequencySet truncation_set(const WeightFamily& a, int zeta, int dimension);

/// S_hat = sum_{z in Z} cfP(z) conj(cfQ(z)) / a_z^2.
EstimateReport inner_product(const SpectralProfile& cf_p, const SpectralProfile& cf_q,
                             const WeightFamily& a, const FrequencySet& frequencies);

EstimateReport inner_product(const SampleSet& x, const SampleSet& y,
                             const WeightFamily& a, const FrequencySet& frequencies);

/// Squared seminorm from one sample, split into the first floor(n/2) points
/// and the remainder (in the given order).
EstimateReport norm_sq(const SampleSet& samples, const WeightFamily& a,
                       const FrequencySet& frequencies);

/// N_hat(X) + M_hat(Y) - 2 S_hat(X, Y); S_hat uses both full samples.
EstimateReport distance_sq(const SampleSet& x, const SampleSet& y,
                           const WeightFamily& a, const FrequencySet& frequencies);

/// Rate-balancing truncation radius from the closed-form rules:
///   polynomial b:  ceil(n^{2/(4t+D)})
///   gaussian b:    ceil(sqrt(ln n / (2t)))
///   exponential b: ceil(ln n / (2t))
///   logarithmic b: smallest zeta with zeta^{89D/20} (ln zeta)^{4t+D} >= n
///   sinc a or b:   the band, independent of n
/// The rule follows b (the smoothness class); the result is at least 1.
int select_zeta_closed_form(const WeightFamily& a, const WeightFamily& b,
                            int dimension, double n);

struct LecamSolution {
  int zeta = 0;
  double strength = 0.0;  // B_zeta
  /// Set when B_zeta^2 / zeta^D was seen to decrease and the search fell back
  /// to a linear scan.
  bool used_linear_scan = false;
};

/// Smallest zeta >= 1 with B_zeta^2 >= zeta^D n^2 (geometric doubling, then
/// bisection). Throws OverflowError if no solution exists up to zeta_max.
LecamSolution select_zeta_lecam(const WeightFamily& b, double n, int dimension,
                                int zeta_max = 1'000'000);

/// B_zeta = sum of b_z^{-2} over the support inside ||z||_inf <= zeta, grown
/// one l-infinity shell at a time and cached.
class StrengthLadder {
 public:
  StrengthLadder(WeightFamily family, int dimension);
  double at(int zeta);

 private:
  WeightFamily family_;
  int dimension_;
  std::vector<double> cumulative_;
  double running_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace quadfun
