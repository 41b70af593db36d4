#pragma once

#include <complex>
#include <cstddef>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "quadfun/frequency.hpp"

namespace quadfun {

using Complex = std::complex<double>;

/// n points of the torus [0,1)^D stored row-major.
class SampleSet {
 public:
  SampleSet(int dimension, std::vector<double> coords, std::string label = {});

  static SampleSet from_points(const std::vector<std::vector<double>>& points,
                               std::string label = {});

  int dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return coords_.size() / dimension_; }
  bool empty() const noexcept { return coords_.empty(); }
  const std::string& label() const noexcept { return label_; }
  const std::vector<double>& coords() const noexcept { return coords_; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dimension_, static_cast<std::size_t>(dimension_)};
  }

  /// Samples [first, last) as a new set.
  SampleSet slice(std::size_t first, std::size_t last) const;

 private:
  int dimension_;
  std::vector<double> coords_;
  std::string label_;
};

/// One row per sample, D numeric columns in [0,1). Throws ParseError with the
/// offending line number.
SampleSet read_samples_csv(std::istream& in, std::string label = {});

/// psi_z(x) = exp(2 pi i <z, x>). Coordinates must lie in [0,1).
Complex basis_eval(const Frequency& z, std::span<const double> x);

enum class Provenance { empirical, exact };

/// Frequency -> complex coefficient map.
class SpectralProfile {
 public:
  SpectralProfile(Provenance provenance, std::size_t sample_count = 0)
      : provenance_(provenance), sample_count_(sample_count) {}

  Provenance provenance() const noexcept { return provenance_; }
  /// n for empirical profiles, 0 for exact ones.
  std::size_t sample_count() const noexcept { return sample_count_; }

  void set(const Frequency& z, Complex value) { coefficients_[z] = value; }
  bool contains(const Frequency& z) const { return coefficients_.contains(z); }
  /// Throws CoverageError when z is missing.
  Complex at(const Frequency& z) const;
  const std::map<Frequency, Complex>& coefficients() const noexcept {
    return coefficients_;
  }

 private:
  Provenance provenance_;
  std::size_t sample_count_;
  std::map<Frequency, Complex> coefficients_;
};

/// phi_hat(z) = (1/n) sum_i conj(psi_z(X_i)) for every z in the set.
/// Coefficients of non-canonical z are stored as the conjugate of the
/// canonical partner when it is also requested, so Hermitian symmetry holds
/// exactly on negation-closed sets.
SpectralProfile empirical_cf(const SampleSet& samples, const FrequencySet& frequencies);

}  // namespace quadfun
