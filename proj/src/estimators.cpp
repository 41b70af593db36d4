#include "quadfun/estimators.hpp"

#include <cmath>
#include <limits>

#include "quadfun/error.hpp"
#include "quadfun/numeric.hpp"

namespace quadfun {

std::string_view to_string(EstimandKind kind) noexcept {
  switch (kind) {
    case EstimandKind::inner_product:
      return "inner_product";
    case EstimandKind::norm_sq:
      return "norm_sq";
    case EstimandKind::distance_sq:
      return "distance_sq";
  }
  return "?";
}

EstimandKind parse_estimand_kind(std::string_view name) {
  if (name == "inner" || name == "inner_product") return EstimandKind::inner_product;
  if (name == "norm" || name == "norm_sq") return EstimandKind::norm_sq;
  if (name == "distance" || name == "distance_sq") return EstimandKind::distance_sq;
  throw ConfigError("unknown estimand kind '" + std::string(name) + "'");
}

FrequencySet truncation_set(const WeightFamily& a, int zeta, int dimension) {
  return lattice_ball(zeta, dimension, a.support_rule())
      .filtered([&a](const Frequency& z) { return a.in_support(z); });
}

namespace {

EstimateReport weighted_product(const SpectralProfile& cf_p,
                                const SpectralProfile& cf_q, const WeightFamily& a,
                                const FrequencySet& frequencies, EstimandKind kind) {
  CompensatedSum re;
  CompensatedSum im;
  for (const auto& z : frequencies) {
    if (!a.in_support(z)) {
      throw SupportError("frequency " + z.to_string() +
                         " outside the support of " + a.describe());
    }
    const Complex term = cf_p.at(z) * std::conj(cf_q.at(z)) * a.inverse_square(z);
    re.add(term.real());
    im.add(term.imag());
  }
  return {re.value(), im.value(), frequencies.radius(), frequencies.size(), kind};
}

void check_dimensions(const SampleSet& s, const FrequencySet& frequencies) {
  if (s.dimension() != frequencies.dimension()) {
    throw DimensionError("sample dimension " + std::to_string(s.dimension()) +
                         " does not match frequency dimension " +
                         std::to_string(frequencies.dimension()));
  }
}

}  // namespace

EstimateReport inner_product(const SpectralProfile& cf_p, const SpectralProfile& cf_q,
                             const WeightFamily& a, const FrequencySet& frequencies) {
  return weighted_product(cf_p, cf_q, a, frequencies, EstimandKind::inner_product);
}

EstimateReport inner_product(const SampleSet& x, const SampleSet& y,
                             const WeightFamily& a, const FrequencySet& frequencies) {
  check_dimensions(x, frequencies);
  check_dimensions(y, frequencies);
  if (frequencies.empty()) {
    return {0.0, 0.0, frequencies.radius(), 0, EstimandKind::inner_product};
  }
  return inner_product(empirical_cf(x, frequencies), empirical_cf(y, frequencies), a,
                       frequencies);
}

EstimateReport norm_sq(const SampleSet& samples, const WeightFamily& a,
                       const FrequencySet& frequencies) {
  check_dimensions(samples, frequencies);
  if (samples.size() < 2) {
    throw SampleSizeError("need n >= 2 for sample splitting (got n = " +
                          std::to_string(samples.size()) + ")");
  }
  if (frequencies.empty()) {
    return {0.0, 0.0, frequencies.radius(), 0, EstimandKind::norm_sq};
  }
  const std::size_t half = samples.size() / 2;
  const auto first = empirical_cf(samples.slice(0, half), frequencies);
  const auto second = empirical_cf(samples.slice(half, samples.size()), frequencies);
  return weighted_product(first, second, a, frequencies, EstimandKind::norm_sq);
}

EstimateReport distance_sq(const SampleSet& x, const SampleSet& y,
                           const WeightFamily& a, const FrequencySet& frequencies) {
  const auto nx = norm_sq(x, a, frequencies);
  const auto ny = norm_sq(y, a, frequencies);
  const auto sxy = inner_product(x, y, a, frequencies);
  return {nx.value + ny.value - 2.0 * sxy.value,
          nx.imaginary_residual + ny.imaginary_residual - 2.0 * sxy.imaginary_residual,
          frequencies.radius(), frequencies.size(), EstimandKind::distance_sq};
}

namespace {

int clamp_zeta(double zeta) {
  if (!std::isfinite(zeta) || zeta > std::numeric_limits<int>::max()) {
    throw OverflowError("truncation radius overflows");
  }
  return std::max(1, static_cast<int>(zeta));
}

}  // namespace

int select_zeta_closed_form(const WeightFamily& a, const WeightFamily& b,
                            int dimension, double n) {
  if (!(n >= 2.0)) throw SampleSizeError("closed-form truncation needs n >= 2");
  if (dimension < 1) throw DimensionError("dimension must be >= 1");
  if (a.kind() == WeightKind::sinc) return a.band();
  if (b.kind() == WeightKind::sinc) return b.band();
  if (a.kind() == WeightKind::custom || b.kind() == WeightKind::custom) {
    throw RateError("no closed-form truncation rule for custom weights");
  }
  if (!is_consistent_pair(a, b)) {
    throw RateError("inconsistent weight pair " + a.describe() + " / " + b.describe());
  }
  const double t = b.parameter();
  const double d = dimension;
  const double log_n = std::log(n);
  const bool flat = b.kind() == WeightKind::constant || t == 0.0;
  if (flat || b.kind() == WeightKind::sobolev) {
    return clamp_zeta(std::ceil(std::pow(n, 2.0 / (4.0 * t + d))));
  }
  switch (b.kind()) {
    case WeightKind::gaussian:
      return clamp_zeta(std::ceil(std::sqrt(log_n / (2.0 * t))));
    case WeightKind::exponential:
      return clamp_zeta(std::ceil(log_n / (2.0 * t)));
    case WeightKind::logarithmic: {
      const double power = 89.0 * d / 20.0;
      for (int zeta = 2; zeta < 100'000'000; ++zeta) {
        const double lz = std::log(static_cast<double>(zeta));
        if (power * lz + (4.0 * t + d) * std::log(lz) >= log_n) return zeta;
      }
      throw OverflowError("logarithmic truncation rule did not converge");
    }
    default:
      break;
  }
  throw RateError("no closed-form truncation rule for " + b.describe());
}

StrengthLadder::StrengthLadder(WeightFamily family, int dimension)
    : family_(std::move(family)), dimension_(dimension) {}

double StrengthLadder::at(int zeta) {
  while (static_cast<int>(cumulative_.size()) <= zeta) {
    const int k = static_cast<int>(cumulative_.size());
    for_each_on_shell(k, dimension_, [this](const Frequency& z) {
      if (!family_.in_support(z)) return;
      const double x = family_.inverse_square(z);
      const double t = running_ + x;
      compensation_ += std::abs(running_) >= std::abs(x) ? (running_ - t) + x
                                                         : (x - t) + running_;
      running_ = t;
    });
    cumulative_.push_back(running_ + compensation_);
  }
  return cumulative_[zeta];
}

LecamSolution select_zeta_lecam(const WeightFamily& b, double n, int dimension,
                                int zeta_max) {
  if (!(n >= 1.0)) throw SampleSizeError("Le Cam solver needs n >= 1");
  if (dimension < 1) throw DimensionError("dimension must be >= 1");
  if (zeta_max < 1) throw ConfigError("zeta_max must be >= 1");
  if (b.kind() == WeightKind::custom &&
      b.table().begin()->first.dimension() != dimension) {
    throw DimensionError("custom weight table dimension does not match D");
  }

  StrengthLadder ladder(b, dimension);
  const double d = dimension;
  const double target = 2.0 * std::log(n);
  // log(B^2 / zeta^D), compared against log(n^2).
  const auto score = [&](int zeta) {
    const double strength = ladder.at(zeta);
    if (strength <= 0.0) return -std::numeric_limits<double>::infinity();
    return 2.0 * std::log(strength) - d * std::log(static_cast<double>(zeta));
  };
  // Direct comparison when it cannot overflow, so exact ties count as solved.
  const auto solved = [&](int zeta) {
    const double strength = ladder.at(zeta);
    const double rhs = std::pow(static_cast<double>(zeta), d) * n * n;
    if (strength < 1e150 && std::isfinite(rhs)) return strength * strength >= rhs;
    return score(zeta) >= target;
  };
  const auto linear_scan = [&]() -> LecamSolution {
    for (int zeta = 1; zeta <= zeta_max; ++zeta) {
      if (solved(zeta)) return {zeta, ladder.at(zeta), true};
    }
    throw OverflowError("no Le Cam solution below zeta_max = " +
                        std::to_string(zeta_max));
  };

  if (solved(1)) return {1, ladder.at(1), false};
  int lo = 1;
  int hi = 1;
  while (true) {
    const long long next = 2LL * hi;
    hi = static_cast<int>(std::min<long long>(next, zeta_max));
    if (score(hi) < score(lo)) return linear_scan();
    if (solved(hi)) break;
    if (hi == zeta_max) {
      throw OverflowError("no Le Cam solution below zeta_max = " +
                          std::to_string(zeta_max));
    }
    lo = hi;
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    const double s = score(mid);
    if (s < score(lo) || s > score(hi)) return linear_scan();
    if (solved(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi, ladder.at(hi), false};
}

}  // namespace quadfun
