#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "quadfun/densities.hpp"
#include "quadfun/error.hpp"
#include "quadfun/spectral.hpp"

using namespace quadfun;

namespace {

SampleSet random_samples(int d, std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> coords(n * d);
  for (auto& c : coords) c = u(rng);
  return SampleSet(d, coords);
}

}  // namespace

TEST(Basis, Examples) {
  const std::vector<double> x{0.37};
  EXPECT_EQ(basis_eval(Frequency{0}, x), Complex(1.0, 0.0));
  const auto quarter = basis_eval(Frequency{1}, std::vector<double>{0.25});
  EXPECT_NEAR(quarter.real(), 0.0, 1e-16);
  EXPECT_NEAR(quarter.imag(), 1.0, 1e-16);
  const auto diagonal = basis_eval(Frequency{1, 1}, std::vector<double>{0.5, 0.5});
  EXPECT_NEAR(diagonal.real(), 1.0, 1e-16);
  EXPECT_NEAR(diagonal.imag(), 0.0, 1e-15);
  EXPECT_THROW(basis_eval(Frequency{1}, std::vector<double>{1.0}), DomainError);
  EXPECT_THROW(basis_eval(Frequency{1}, std::vector<double>{-0.1}), DomainError);
}

TEST(EmpiricalCf, Examples) {
  const auto all = lattice_ball(2, 1, SupportRule::all);
  const auto half = empirical_cf(SampleSet(1, {0.0, 0.5}), all);
  EXPECT_EQ(half.at(Frequency{0}), Complex(1.0, 0.0));
  EXPECT_NEAR(std::abs(half.at(Frequency{1})), 0.0, 1e-16);

  const auto third = empirical_cf(SampleSet(1, {0.0, 1.0 / 3.0}), all);
  // (1 + exp(-2 pi i / 3)) / 2
  EXPECT_NEAR(third.at(Frequency{1}).real(), 0.25, 1e-15);
  EXPECT_NEAR(third.at(Frequency{1}).imag(), -0.43301270189221935, 1e-15);
  EXPECT_EQ(third.at(Frequency{-1}), std::conj(third.at(Frequency{1})));
  EXPECT_EQ(third.provenance(), Provenance::empirical);
  EXPECT_EQ(third.sample_count(), 2u);
  EXPECT_THROW(third.at(Frequency{3}), CoverageError);
  EXPECT_THROW(empirical_cf(SampleSet(1, {}), all), EstimationError);
}

TEST(EmpiricalCf, MatchesDirectSumAndIsBounded) {
  for (int d = 1; d <= 3; ++d) {
    const auto samples = random_samples(d, 257, 100 + d);
    const auto freq = lattice_ball(3, d, SupportRule::all);
    const auto cf = empirical_cf(samples, freq);
    for (const auto& z : freq) {
      Complex direct(0.0, 0.0);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        double phase = 0.0;
        for (int j = 0; j < d; ++j) phase += z[j] * samples.point(i)[j];
        direct += std::polar(1.0, -2.0 * std::numbers::pi * phase);
      }
      direct /= static_cast<double>(samples.size());
      EXPECT_NEAR(std::abs(cf.at(z) - direct), 0.0, 1e-12);
      EXPECT_LE(std::abs(cf.at(z)), 1.0 + 1e-15);
      EXPECT_LE(std::abs(cf.at(z) - std::conj(cf.at(-z))), 1e-14);
    }
  }
}

TEST(EmpiricalCf, ConvergesToExactSpectrum) {
  const auto p = make_trig_density(1, {{Frequency{1}, 0.5}, {Frequency{2}, -0.2}});
  const auto exact = p.spectrum();
  const auto freq = lattice_ball(2, 1, SupportRule::exclude_origin);
  const std::size_t n = 10'000;
  const int reps = 200;
  for (const auto& z : freq) {
    double squared = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const auto cf = empirical_cf(sample(p, n, 9000 + rep), freq);
      squared += std::norm(cf.at(z) - exact.at(z));
    }
    EXPECT_LE(std::sqrt(squared / reps), 3.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST(SampleSet, ConstructionAndSlices) {
  EXPECT_THROW(SampleSet(1, {0.5, 1.0}), DomainError);
  EXPECT_THROW(SampleSet(2, {0.5, 0.1, 0.2}), DimensionError);
  const auto s = SampleSet::from_points({{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}});
  EXPECT_EQ(s.dimension(), 2);
  EXPECT_EQ(s.size(), 3u);
  const auto tail = s.slice(1, 3);
  EXPECT_EQ(tail.size(), 2u);
  EXPECT_EQ(tail.point(0)[1], 0.4);
  EXPECT_THROW(s.slice(2, 4), ConfigError);
}

TEST(SampleCsv, ParsesAndReportsLines) {
  std::istringstream good("x,y\n0.1,0.2\n\n# note\n0.3, 0.4\n");
  const auto s = read_samples_csv(good);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.point(1)[1], 0.4);

  std::istringstream bad_number("0.1\n0.2\nabc\n");
  try {
    read_samples_csv(bad_number);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::istringstream out_of_range("0.1\n1.5\n");
  try {
    read_samples_csv(out_of_range);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream ragged("0.1,0.2\n0.3\n");
  EXPECT_THROW(read_samples_csv(ragged), ParseError);
}
