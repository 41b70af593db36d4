#include "quadfun/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quadfun/error.hpp"
#include "quadfun/estimators.hpp"
#include "quadfun/numeric.hpp"

namespace quadfun {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

void check_norms(const DistributionNorms& m) {
  for (double v : {m.l2_p, m.l2_q, m.b_p, m.b_q, m.a_p, m.a_q}) {
    if (!(v >= 0.0)) throw ConfigError("norms must be nonnegative");
  }
}

}  // namespace

double bias_bound(double norm_b_p, double norm_b_q, const WeightFamily& a,
                  const WeightFamily& b, int zeta, int dimension) {
  if (!(norm_b_p >= 0.0) || !(norm_b_q >= 0.0)) {
    throw ConfigError("norms must be nonnegative");
  }
  if (norm_b_p == 0.0 || norm_b_q == 0.0) return 0.0;
  const auto tail = tail_sup_ratio(a, b, zeta, dimension);
  if (tail.inconsistent) return kInfinity;
  return norm_b_p * norm_b_q * tail.value;
}

double variance_bound(const DistributionNorms& norms, const WeightFamily& a,
                      const WeightFamily& b, const FrequencySet& frequencies,
                      double n) {
  check_norms(norms);
  if (!(n >= 1.0)) throw SampleSizeError("variance bound needs n >= 1");
  CompensatedSum inverse_fourth;
  for (const auto& z : frequencies) {
    const double ia = a.inverse_square(z);
    inverse_fourth.add(ia * ia);
  }
  const auto& m = norms;
  const double first = 2.0 * m.l2_p * m.l2_q / (n * n) * inverse_fourth.value();
  const double cross = m.b_q * m.b_q * m.b_p + m.b_p * m.b_p * m.b_q;
  const double second =
      cross == 0.0 ? 0.0 : cross / n * variance_functional(a, b, frequencies);
  const double third = 2.0 * m.a_p * m.a_p * m.a_q * m.a_q / n;
  return first + second + third;
}

double mse_bound(const DistributionNorms& norms, const WeightFamily& a,
                 const WeightFamily& b, const FrequencySet& frequencies, int zeta,
                 double n, BoundMode mode) {
  DistributionNorms m = norms;
  if (mode == BoundMode::norm) {
    m.l2_q = m.l2_p;
    m.b_q = m.b_p;
    m.a_q = m.a_p;
  }
  const double bias = bias_bound(m.b_p, m.b_q, a, b, zeta, frequencies.dimension());
  return bias * bias + variance_bound(m, a, b, frequencies, n);
}

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::parametric:
      return "parametric";
    case Regime::nonparametric:
      return "nonparametric";
    case Regime::inconsistent:
      return "inconsistent";
    case Regime::upper_bound_only:
      return "upper_bound_only";
  }
  return "?";
}

namespace {

// Rows/columns of the rate table; flat weights (constant or zero parameter)
// behave like the L^2 case of the polynomial row.
enum class Decay { flat = 0, log = 1, poly = 2, exp = 3, gauss = 4, band = 5 };

Decay decay_of(const WeightFamily& f) {
  if (f.kind() == WeightKind::sinc) return Decay::band;
  if (f.kind() == WeightKind::custom) {
    throw RateError("no tabulated rate for custom weights");
  }
  if (f.kind() == WeightKind::constant || f.parameter() == 0.0) return Decay::flat;
  switch (f.kind()) {
    case WeightKind::logarithmic:
      return Decay::log;
    case WeightKind::sobolev:
      return Decay::poly;
    case WeightKind::exponential:
      return Decay::exp;
    default:
      return Decay::gauss;
  }
}

RatePrediction polynomial_or_parametric(double exponent, std::string note = {}) {
  RatePrediction r;
  r.exponent = std::max(-1.0, exponent);
  r.regime = r.exponent == -1.0 ? Regime::parametric : Regime::nonparametric;
  r.log_factor_note = std::move(note);
  return r;
}

RatePrediction inconsistent() {
  RatePrediction r;
  r.exponent = kInfinity;
  r.infinite = true;
  r.regime = Regime::inconsistent;
  r.log_factor_note = "estimand may be infinite; no consistent estimator";
  return r;
}

RatePrediction logarithmic_rate(double s, double t) {
  RatePrediction r;
  r.exponent = 4.0 * (s - t);
  r.variable = RateVariable::log_n;
  r.regime = Regime::upper_bound_only;
  r.log_factor_note = "rate in log n, up to log log n factors; upper bound only";
  return r;
}

}  // namespace

RatePrediction minimax_rate(const WeightFamily& a, const WeightFamily& b,
                            int dimension) {
  if (dimension < 1) throw DimensionError("dimension must be >= 1");
  const Decay da = decay_of(a);
  const Decay db = decay_of(b);
  const double s = da == Decay::flat ? 0.0 : a.parameter();
  const double t = db == Decay::flat ? 0.0 : b.parameter();
  const double d = dimension;
  const std::string up_to_logs = "up to log n factors";

  if (da == Decay::band || db == Decay::band) {
    return polynomial_or_parametric(-1.0, "band-limited weights: unbiased at fixed Z");
  }
  if (da == Decay::flat) {
    switch (db) {
      case Decay::flat:
      case Decay::poly:
        return polynomial_or_parametric(-8.0 * t / (4.0 * t + d), up_to_logs);
      case Decay::log:
        return logarithmic_rate(0.0, t);
      default:
        return polynomial_or_parametric(-1.0, up_to_logs);
    }
  }
  if (db == Decay::flat || static_cast<int>(db) < static_cast<int>(da)) {
    return inconsistent();
  }
  if (da == db) {
    if (t < s) return inconsistent();
    switch (da) {
      case Decay::log:
        return logarithmic_rate(s, t);
      case Decay::poly:
        return polynomial_or_parametric(8.0 * (s - t) / (4.0 * t + d), up_to_logs);
      default:
        return polynomial_or_parametric(2.0 * (s - t) / t, up_to_logs);
    }
  }
  if (da == Decay::log && db == Decay::poly) {
    return polynomial_or_parametric(-8.0 * t / (4.0 * t + d), up_to_logs);
  }
  return polynomial_or_parametric(-1.0, up_to_logs);
}

LowerBound lower_bound_rate(const WeightFamily& a, const WeightFamily& b, double n,
                            int dimension, double kappa) {
  if (!(n >= 2.0)) throw SampleSizeError("lower bound needs n >= 2");
  LowerBound out;
  out.zeta = select_zeta_lecam(b, n, dimension).zeta;
  const auto sums = strength_sums(a, b, out.zeta, dimension);
  out.strength_a = sums.a;
  out.strength_b = sums.b;
  const double d = dimension;
  out.smooth = sums.b >= kappa * std::pow(static_cast<double>(out.zeta), 2.0 * d);
  if (out.smooth) {
    const double ratio = sums.a / sums.b;
    out.rate = std::max(ratio * ratio, 1.0 / n);
  } else {
    const int m = static_cast<int>(std::ceil(std::pow(n, 2.0 / (3.0 * d))));
    const double strength = strength_sums(a, b, m, dimension).a;
    out.rate = std::max(strength * strength / std::pow(n, 8.0 / 3.0), 1.0 / n);
  }
  return out;
}

double tv_bound(double n, double c, int zeta, int dimension) {
  if (!(c >= 0.0)) throw ConfigError("perturbation scale must be >= 0");
  const double x =
      n * c * c * std::pow(static_cast<double>(zeta), 0.5 * dimension);
  if (x > 709.0) return kInfinity;
  return std::expm1(x);
}

RatesMatchReport rates_match_check(const WeightFamily& a, const WeightFamily& b,
                                   int dimension, const std::vector<int>& zeta_grid,
                                   double band_low, double band_high) {
  if (zeta_grid.empty()) throw ConfigError("rates-match grid is empty");
  RatesMatchReport report;
  report.match = true;
  for (int zeta : zeta_grid) {
    RatesMatchRow row;
    row.zeta = zeta;
    const Frequency anchor = shell_anchor(zeta, dimension, a.support_rule());
    const auto sums = strength_sums(a, b, zeta, dimension);
    CompensatedSum inverse_fourth;
    for (const auto& z : lattice_ball(zeta, dimension, a.support_rule())) {
      if (!a.in_support(z) || !b.in_support(z)) continue;
      const double ia = a.inverse_square(z);
      inverse_fourth.add(ia * ia);
    }
    if (a.in_support(anchor) && b.in_support(anchor) && sums.a > 0.0) {
      const double weight_ratio = a.inverse_square(anchor) / b.inverse_square(anchor);
      const double bias_term = weight_ratio * sums.b / sums.a;
      row.ratio_bias = bias_term * bias_term;
      row.ratio_variance = weight_ratio * weight_ratio * sums.b * sums.b /
                           (inverse_fourth.value() *
                            std::pow(static_cast<double>(zeta), dimension));
    } else {
      row.ratio_bias = row.ratio_variance = std::numeric_limits<double>::quiet_NaN();
    }
    const auto inside = [&](double r) { return r >= band_low && r <= band_high; };
    if (!inside(row.ratio_bias) || !inside(row.ratio_variance)) report.match = false;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace quadfun
