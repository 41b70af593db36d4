#include "quadfun/densities.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "quadfun/error.hpp"
#include "quadfun/numeric.hpp"
#include "quadfun/theory.hpp"

namespace quadfun {

NonnegativityViolation::NonnegativityViolation(std::vector<double> point, double minimum)
    : Error([&] {
        std::string where;
        for (double x : point) where += (where.empty() ? "" : ",") + fmt::format("{:.6g}", x);
        return fmt::format("density is negative: minimum {:.9g} at ({})", minimum, where);
      }()),
      point_(std::move(point)),
      minimum_(minimum) {}

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kNegativeTolerance = 1e-12;

Frequency origin(int dimension) { return Frequency(std::vector<int>(dimension, 0)); }

}  // namespace

ReferenceDensity ReferenceDensity::uniform(int dimension) {
  return ReferenceDensity(dimension, {}, true);
}

ReferenceDensity::ReferenceDensity(int dimension, std::map<Frequency, double> amplitudes,
                                   bool validate)
    : dimension_(dimension), amplitudes_(std::move(amplitudes)) {
  if (dimension < 1 || dimension > kDefaultMaxDimension) {
    throw DimensionError(fmt::format("density dimension {} out of range", dimension));
  }
  for (const auto& [z, alpha] : amplitudes_) {
    if (z.dimension() != dimension) {
      throw DimensionError("amplitude frequency " + z.to_string() +
                           " has the wrong dimension");
    }
    if (z.is_zero() || !z.is_canonical()) {
      throw ConfigError("amplitude keys must be canonical nonzero frequencies, got " +
                        z.to_string());
    }
    if (!std::isfinite(alpha)) throw ConfigError("amplitude must be finite");
  }
  if (!validate) return;
  double total = 0.0;
  for (const auto& [z, alpha] : amplitudes_) total += std::abs(alpha);
  // 1 - sqrt(2) sum|alpha| >= 0 already proves nonnegativity.
  if (1.0 - kSqrt2 * total < 0.0) {
    auto minimum = grid_minimum(validation_grid());
    if (minimum.value < -kNegativeTolerance) {
      throw NonnegativityViolation(std::move(minimum.point), minimum.value);
    }
  }
  validated_ = true;
}

int ReferenceDensity::bandwidth() const noexcept {
  int width = 0;
  for (const auto& [z, alpha] : amplitudes_) width = std::max(width, z.linf());
  return width;
}

double ReferenceDensity::envelope() const noexcept {
  double total = 0.0;
  for (const auto& [z, alpha] : amplitudes_) total += std::abs(alpha);
  return 1.0 + kSqrt2 * total;
}

double ReferenceDensity::evaluate(std::span<const double> x) const {
  double value = 1.0;
  for (const auto& [z, alpha] : amplitudes_) {
    double phase = 0.0;
    for (int j = 0; j < dimension_; ++j) phase += z[j] * x[j];
    phase -= std::nearbyint(phase);
    value += alpha * kSqrt2 * std::cos(2.0 * std::numbers::pi * phase);
  }
  return value;
}

ReferenceDensity::GridMinimum ReferenceDensity::grid_minimum(int points) const {
  if (points < 1) throw ConfigError("grid needs at least one point per axis");
  const long long n = points;
  std::vector<double> cosine(points);
  for (int k = 0; k < points; ++k) {
    cosine[k] = std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / points);
  }
  std::vector<const Frequency*> terms;
  std::vector<double> weights;
  for (const auto& [z, alpha] : amplitudes_) {
    terms.push_back(&z);
    weights.push_back(kSqrt2 * alpha);
  }
  const auto reduce = [n](long long v) { return ((v % n) + n) % n; };
  const int last = dimension_ - 1;
  std::vector<int> index(dimension_, 0);
  std::vector<long long> base(terms.size());
  std::vector<long long> step(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) step[t] = reduce((*terms[t])[last]);

  GridMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  while (true) {
    for (std::size_t t = 0; t < terms.size(); ++t) {
      long long phase = 0;
      for (int j = 0; j < last; ++j) phase += static_cast<long long>((*terms[t])[j]) * index[j];
      base[t] = reduce(phase);
    }
    for (int k = 0; k < points; ++k) {
      double value = 1.0;
      for (std::size_t t = 0; t < terms.size(); ++t) {
        value += weights[t] * cosine[base[t]];
        base[t] += step[t];
        if (base[t] >= n) base[t] -= n;
      }
      if (value < best.value) {
        best.value = value;
        best.point.assign(dimension_, 0.0);
        for (int j = 0; j < last; ++j) best.point[j] = static_cast<double>(index[j]) / points;
        best.point[last] = static_cast<double>(k) / points;
      }
    }
    int j = last - 1;
    while (j >= 0 && ++index[j] == points) index[j--] = 0;
    if (j < 0) break;
  }
  return best;
}

SpectralProfile ReferenceDensity::spectrum() const {
  SpectralProfile profile(Provenance::exact);
  profile.set(origin(dimension_), Complex(1.0, 0.0));
  for (const auto& [z, alpha] : amplitudes_) {
    profile.set(z, Complex(alpha / kSqrt2, 0.0));
    profile.set(-z, Complex(alpha / kSqrt2, 0.0));
  }
  return profile;
}

ReferenceDensity make_trig_density(int dimension, std::map<Frequency, double> amplitudes) {
  return ReferenceDensity(dimension, std::move(amplitudes), true);
}

nlohmann::json density_to_json(const ReferenceDensity& density) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [z, alpha] : density.amplitudes()) {
    terms.push_back({{"z", z.coords()}, {"amplitude", alpha}});
  }
  return {{"dimension", density.dimension()}, {"amplitudes", terms}};
}

ReferenceDensity density_from_json(const nlohmann::json& doc, bool validate) {
  try {
    const int dimension = doc.at("dimension").get<int>();
    std::map<Frequency, double> amplitudes;
    if (doc.contains("amplitudes")) {
      for (const auto& term : doc.at("amplitudes")) {
        Frequency z(term.at("z").get<std::vector<int>>());
        if (!amplitudes.emplace(z, term.at("amplitude").get<double>()).second) {
          throw ConfigError("duplicate amplitude for " + z.to_string());
        }
      }
    }
    return ReferenceDensity(dimension, std::move(amplitudes), validate);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed density fixture: ") + e.what());
  }
}

std::string_view to_string(WorstCaseRegime regime) noexcept {
  return regime == WorstCaseRegime::smooth ? "smooth" : "unsmooth";
}

std::vector<Frequency> positive_orthant(int zeta, int dimension) {
  if (zeta < 1) throw ConfigError("zeta must be >= 1");
  return lattice_ball(zeta, dimension, SupportRule::positive_orthant).members();
}

std::vector<int> alternating_signs(int zeta, int dimension) {
  std::vector<int> signs;
  for (const auto& z : positive_orthant(zeta, dimension)) {
    signs.push_back(z.l1() % 2 == 1 ? 1 : -1);
  }
  return signs;
}

std::vector<int> random_signs(int zeta, int dimension, std::uint64_t seed) {
  RandomStream stream(seed);
  const std::size_t count = positive_orthant(zeta, dimension).size();
  std::vector<int> signs(count);
  for (auto& s : signs) s = (stream.next() >> 63) != 0 ? 1 : -1;
  return signs;
}

WorstCase make_worst_case(int zeta, const std::vector<int>& signs, const WeightFamily& b,
                          int dimension, WorstCaseRegime regime, bool validate) {
  const auto orthant = positive_orthant(zeta, dimension);
  if (signs.size() != orthant.size()) {
    throw ConfigError(fmt::format("expected {} signs, got {}", orthant.size(), signs.size()));
  }
  CompensatedSum strength;
  for (const auto& z : orthant) {
    if (!b.in_support(z)) {
      throw SupportError("b is not defined at " + z.to_string());
    }
    strength.add(b.inverse_square(z));
  }
  const double volume = std::pow(static_cast<double>(zeta), dimension);
  const double c = regime == WorstCaseRegime::smooth ? 1.0 / std::sqrt(strength.value())
                                                     : 1.0 / volume;
  std::map<Frequency, double> amplitudes;
  for (std::size_t i = 0; i < orthant.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw ConfigError("signs must be +1 or -1");
    amplitudes.emplace(orthant[i], signs[i] * c);
  }
  return WorstCase{ReferenceDensity(dimension, std::move(amplitudes), validate),
                   zeta,
                   dimension,
                   c,
                   strength.value(),
                   regime,
                   signs,
                   c * kSqrt2 * volume <= 1.0};
}

double exact_product(const ReferenceDensity& p, const ReferenceDensity& q,
                     const WeightFamily& a, const FrequencySet* frequencies) {
  if (p.dimension() != q.dimension() ||
      (frequencies && frequencies->dimension() != p.dimension())) {
    throw DimensionError("exact_product dimension mismatch");
  }
  const auto included = [&](const Frequency& z) {
    return a.in_support(z) && (!frequencies || frequencies->contains(z));
  };
  CompensatedSum sum;
  const Frequency zero = origin(p.dimension());
  if (included(zero)) sum.add(a.inverse_square(zero));
  for (const auto& [z, alpha_p] : p.amplitudes()) {
    const auto it = q.amplitudes().find(z);
    if (it == q.amplitudes().end()) continue;
    const double half = 0.5 * alpha_p * it->second;
    if (included(z)) sum.add(half * a.inverse_square(z));
    const Frequency minus = -z;
    if (included(minus)) sum.add(half * a.inverse_square(minus));
  }
  return sum.value();
}

double density_eval(const ReferenceDensity& p, std::span<const double> x) {
  if (static_cast<int>(x.size()) != p.dimension()) {
    throw DimensionError("point dimension does not match the density");
  }
  for (double v : x) {
    if (!(v >= 0.0 && v < 1.0)) {
      throw DomainError(fmt::format("point coordinate {} outside [0,1)", v));
    }
  }
  return p.evaluate(x);
}

SampleSet sample(const ReferenceDensity& p, std::size_t n, std::uint64_t seed,
                 std::string label) {
  if (n < 1) throw SampleSizeError("sample needs n >= 1");
  RandomStream stream(seed);
  const int d = p.dimension();
  const double envelope = p.envelope();
  const bool flat = p.amplitudes().empty();
  std::vector<double> coords;
  coords.reserve(n * d);
  std::vector<double> x(d);
  std::size_t accepted = 0;
  while (accepted < n) {
    for (auto& v : x) v = stream.uniform();
    if (!flat && stream.uniform() * envelope >= p.evaluate(x)) continue;
    coords.insert(coords.end(), x.begin(), x.end());
    ++accepted;
  }
  return SampleSet(d, std::move(coords), std::move(label));
}

WorstCaseReport validate_worst_case(const ReferenceDensity& g, const WeightFamily& b,
                                    const WeightFamily& a, int zeta, int dimension,
                                    WorstCaseRegime regime, double n) {
  if (g.dimension() != dimension) throw DimensionError("density dimension mismatch");
  WorstCaseReport report;
  const auto uniform = ReferenceDensity::uniform(dimension);

  // Perturbation norms; exact_product against the uniform baseline when the
  // rule is negation symmetric, the one-sided cosine sum otherwise.
  const auto perturbation_norm = [&](const WeightFamily& w) {
    if (is_negation_symmetric(w.support_rule())) {
      return exact_product(g, g, w) - exact_product(uniform, uniform, w);
    }
    CompensatedSum sum;
    for (const auto& [z, alpha] : g.amplitudes()) sum.add(alpha * alpha * w.inverse_square(z));
    return sum.value();
  };

  double largest = 0.0;
  for (const auto& [z, alpha] : g.amplitudes()) largest = std::max(largest, std::abs(alpha));
  report.degenerate = largest == 0.0;

  CompensatedSum strength_a;
  CompensatedSum strength_b;
  for (const auto& z : positive_orthant(zeta, dimension)) {
    strength_a.add(a.inverse_square(z));
    strength_b.add(b.inverse_square(z));
  }
  const double volume = std::pow(static_cast<double>(zeta), dimension);

  report.norm_b_sq = perturbation_norm(b);
  if (regime == WorstCaseRegime::smooth) {
    report.norm_ok = std::abs(report.norm_b_sq - 1.0) <= 1e-12;
    report.expected_gap = strength_a.value() / strength_b.value();
  } else {
    report.norm_ok = report.norm_b_sq <= 1.0 + 1e-12;
    report.expected_gap = strength_a.value() / (volume * volume);
  }
  if (!report.norm_ok) {
    report.failures.push_back(fmt::format("||g||_b^2 = {:.17g}", report.norm_b_sq));
  }

  report.gap = perturbation_norm(a);
  report.gap_ok = !report.degenerate &&
                  std::abs(report.gap - report.expected_gap) <=
                      1e-12 * std::max(1.0, std::abs(report.expected_gap));
  if (report.degenerate) {
    report.failures.push_back("degenerate: no perturbation terms");
  } else if (!report.gap_ok) {
    report.failures.push_back(fmt::format("a-norm gap {:.17g}, expected {:.17g}",
                                          report.gap, report.expected_gap));
  }

  // Every term is a nonzero-frequency cosine, so the mass is the constant 1.
  report.integral_ok = true;
  for (const auto& [z, alpha] : g.amplitudes()) {
    if (z.is_zero()) report.integral_ok = false;
  }
  if (!report.integral_ok) report.failures.push_back("integral differs from 1");

  report.grid_min = g.grid_minimum(64 * std::max(1, zeta)).value;
  report.nonnegative_ok = report.grid_min >= -kNegativeTolerance;
  if (!report.nonnegative_ok) {
    report.failures.push_back(fmt::format("grid minimum {:.9g}", report.grid_min));
  }

  report.tv = tv_bound(n, largest, zeta, dimension);
  return report;
}

}  // namespace quadfun
