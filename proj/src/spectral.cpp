#include "quadfun/spectral.hpp"

#include <cmath>
#include <numbers>

#include "quadfun/csv.hpp"
#include "quadfun/error.hpp"

namespace quadfun {

namespace {

void check_point(std::span<const double> x) {
  for (double v : x) {
    if (!(v >= 0.0 && v < 1.0)) {
      throw DomainError("coordinate " + std::to_string(v) + " outside [0,1)");
    }
  }
}

inline Complex mul(Complex x, Complex y) noexcept {
  return {x.real() * y.real() - x.imag() * y.imag(),
          x.real() * y.imag() + x.imag() * y.real()};
}

}  // namespace

SampleSet::SampleSet(int dimension, std::vector<double> coords, std::string label)
    : dimension_(dimension), coords_(std::move(coords)), label_(std::move(label)) {
  if (dimension_ < 1) throw DimensionError("sample dimension must be >= 1");
  if (coords_.size() % static_cast<std::size_t>(dimension_) != 0) {
    throw DimensionError("coordinate count is not a multiple of the dimension");
  }
  check_point(coords_);
}

SampleSet SampleSet::from_points(const std::vector<std::vector<double>>& points,
                                 std::string label) {
  if (points.empty()) throw DimensionError("cannot infer dimension of no points");
  const auto dimension = points.front().size();
  std::vector<double> flat;
  flat.reserve(points.size() * dimension);
  for (const auto& p : points) {
    if (p.size() != dimension) throw DimensionError("ragged sample points");
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return SampleSet(static_cast<int>(dimension), std::move(flat), std::move(label));
}

SampleSet SampleSet::slice(std::size_t first, std::size_t last) const {
  if (first > last || last > size()) throw ConfigError("bad sample slice");
  return SampleSet(
      dimension_,
      std::vector<double>(coords_.begin() + first * dimension_,
                          coords_.begin() + last * dimension_),
      label_);
}

SampleSet read_samples_csv(std::istream& in, std::string label) {
  std::vector<double> coords;
  std::size_t width = 0;
  csv::for_each_record(in, [&](std::size_t line, const auto& fields) {
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " columns, got " +
                           std::to_string(fields.size()),
                       line);
    }
    for (const auto field : fields) {
      const auto v = csv::parse_double(field);
      if (!v) throw ParseError("not a number: '" + std::string(field) + "'", line);
      if (!(*v >= 0.0 && *v < 1.0)) {
        throw ParseError("value " + std::string(field) + " outside [0,1)", line);
      }
      coords.push_back(*v);
    }
  });
  if (width == 0) return SampleSet(1, {}, std::move(label));
  return SampleSet(static_cast<int>(width), std::move(coords), std::move(label));
}

Complex basis_eval(const Frequency& z, std::span<const double> x) {
  if (static_cast<std::size_t>(z.dimension()) != x.size()) {
    throw DimensionError("frequency and point dimensions differ");
  }
  check_point(x);
  double phase = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) phase += z[j] * x[j];
  phase -= std::nearbyint(phase);
  const double angle = 2.0 * std::numbers::pi * phase;
  return {std::cos(angle), std::sin(angle)};
}

Complex SpectralProfile::at(const Frequency& z) const {
  const auto it = coefficients_.find(z);
  if (it == coefficients_.end()) {
    throw CoverageError("no coefficient for frequency " + z.to_string());
  }
  return it->second;
}

SpectralProfile empirical_cf(const SampleSet& samples,
                             const FrequencySet& frequencies) {
  if (samples.empty()) throw EstimationError("empty sample set");
  if (samples.dimension() != frequencies.dimension()) {
    throw DimensionError("sample and frequency dimensions differ");
  }
  const int dimension = samples.dimension();
  const std::size_t n = samples.size();

  // Canonical representatives are computed directly; their negatives are
  // filled in by conjugation.
  std::vector<Frequency> direct;
  for (const auto& z : frequencies) {
    if (z.is_canonical() || !frequencies.contains(-z)) direct.push_back(z);
  }
  int radius = 0;
  for (const auto& z : direct) radius = std::max(radius, z.linf());

  // powers[j][k] = exp(-2 pi i k x_j) for k = 0..radius, by recurrence.
  const std::size_t stride = static_cast<std::size_t>(radius) + 1;
  std::vector<Complex> powers(dimension * stride);
  std::vector<Complex> sums(direct.size(), Complex{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = samples.point(i);
    for (int j = 0; j < dimension; ++j) {
      Complex* row = powers.data() + j * stride;
      const double angle = -2.0 * std::numbers::pi * x[j];
      const Complex base{std::cos(angle), std::sin(angle)};
      row[0] = {1.0, 0.0};
      for (std::size_t k = 1; k < stride; ++k) row[k] = mul(row[k - 1], base);
    }
    for (std::size_t m = 0; m < direct.size(); ++m) {
      const auto& coords = direct[m].coords();
      Complex term{1.0, 0.0};
      for (int j = 0; j < dimension; ++j) {
        const int k = coords[j];
        const Complex p = powers[j * stride + std::abs(k)];
        term = mul(term, k >= 0 ? p : std::conj(p));
      }
      sums[m] += term;
    }
  }

  SpectralProfile profile(Provenance::empirical, n);
  const auto count = static_cast<double>(n);
  for (std::size_t m = 0; m < direct.size(); ++m) {
    profile.set(direct[m], {sums[m].real() / count, sums[m].imag() / count});
  }
  for (const auto& z : frequencies) {
    if (!profile.contains(z)) profile.set(z, std::conj(profile.at(-z)));
  }
  return profile;
}

}  // namespace quadfun
