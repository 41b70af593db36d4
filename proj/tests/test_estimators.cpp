#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "quadfun/densities.hpp"
#include "quadfun/error.hpp"
#include "quadfun/estimators.hpp"

using namespace quadfun;

namespace {

const FrequencySet kPlusMinusOne(1, 1, SupportRule::exclude_origin, {{-1}, {1}});
const FrequencySet kEmpty(1, 0, SupportRule::all, {});

SampleSet random_samples(int d, std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> coords(n * d);
  for (auto& c : coords) c = u(rng);
  return SampleSet(d, coords);
}

// Plain O(n |Z|) evaluation of the inner-product statistic.
double oracle_inner(const SampleSet& x, const SampleSet& y, const WeightFamily& a,
                    const FrequencySet& z) {
  double total = 0.0;
  for (const auto& f : z) {
    std::complex<double> px, py;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double ph = 0.0;
      for (int j = 0; j < x.dimension(); ++j) ph += f[j] * x.point(i)[j];
      px += std::polar(1.0, -2 * std::numbers::pi * ph);
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
      double ph = 0.0;
      for (int j = 0; j < y.dimension(); ++j) ph += f[j] * y.point(i)[j];
      py += std::polar(1.0, -2 * std::numbers::pi * ph);
    }
    px /= static_cast<double>(x.size());
    py /= static_cast<double>(y.size());
    total += (px * std::conj(py)).real() / std::pow(a.weight_at(f), 2);
  }
  return total;
}

}  // namespace

TEST(InnerProduct, Examples) {
  const auto c = WeightFamily::constant();
  const SampleSet x(1, {0.0, 0.5});
  EXPECT_EQ(inner_product(x, x, c, kEmpty).value, 0.0);
  EXPECT_NEAR(inner_product(x, SampleSet(1, {0.2}), c, kPlusMinusOne).value, 0.0, 1e-15);
  const auto r = inner_product(SampleSet(1, {0.0, 0.25}), SampleSet(1, {0.0, 1.0 / 3.0}), c,
                               kPlusMinusOne);
  EXPECT_NEAR(r.value, 0.6830127018922194, 1e-15);
  EXPECT_LE(std::abs(r.imaginary_residual), 1e-15);
  EXPECT_EQ(r.term_count, 2u);
  EXPECT_EQ(r.kind, EstimandKind::inner_product);
}

TEST(InnerProduct, SupportAndCoverageErrors) {
  const SampleSet x(1, {0.1, 0.7});
  const auto with_origin = lattice_ball(1, 1, SupportRule::all);
  EXPECT_THROW(inner_product(x, x, WeightFamily::sobolev(1), with_origin), SupportError);
  const auto cf = empirical_cf(x, kPlusMinusOne);
  EXPECT_THROW(inner_product(cf, cf, WeightFamily::constant(), with_origin), CoverageError);
  EXPECT_THROW(inner_product(x, SampleSet(2, {0.1, 0.2}), WeightFamily::constant(),
                             kPlusMinusOne),
               DimensionError);
}

TEST(InnerProduct, MatchesOracleAndIsPermutationInvariant) {
  for (int d = 1; d <= 2; ++d) {
    auto a = WeightFamily::sobolev(0.7);
    const auto z = truncation_set(a, 3, d);
    const auto x = random_samples(d, 60, 1 + d);
    const auto y = random_samples(d, 45, 10 + d);
    const auto r = inner_product(x, y, a, z);
    EXPECT_NEAR(r.value, oracle_inner(x, y, a, z), 1e-12);
    EXPECT_LE(std::abs(r.imaginary_residual), 1e-10);

    std::vector<std::vector<double>> points;
    for (std::size_t i = 0; i < x.size(); ++i) {
      points.emplace_back(x.point(i).begin(), x.point(i).end());
    }
    std::reverse(points.begin(), points.end());
    EXPECT_NEAR(inner_product(SampleSet::from_points(points), y, a, z).value, r.value, 1e-13);
  }
}

TEST(NormSq, Examples) {
  const auto c = WeightFamily::constant();
  const SampleSet zeros(1, std::vector<double>(10, 0.0));
  EXPECT_DOUBLE_EQ(norm_sq(zeros, c, kPlusMinusOne).value, 2.0);
  EXPECT_EQ(norm_sq(zeros, c, kEmpty).value, 0.0);
  try {
    norm_sq(SampleSet(1, {0.3}), c, kPlusMinusOne);
    FAIL();
  } catch (const SampleSizeError& e) {
    EXPECT_NE(std::string(e.what()).find("need n >= 2 for sample splitting"), std::string::npos);
  }
}

TEST(NormSq, SplitIsFirstHalfAgainstRest) {
  const auto a = WeightFamily::constant(SupportRule::exclude_origin);
  const auto z = truncation_set(a, 2, 1);
  const auto x = random_samples(1, 41, 5);
  const auto r = norm_sq(x, a, z);
  EXPECT_NEAR(r.value, oracle_inner(x.slice(0, 20), x.slice(20, 41), a, z), 1e-13);

  // Permuting within the first half leaves the estimate alone.
  std::vector<std::vector<double>> points;
  for (std::size_t i = 0; i < x.size(); ++i) points.push_back({x.point(i)[0]});
  auto within = points;
  std::reverse(within.begin(), within.begin() + 20);
  EXPECT_NEAR(norm_sq(SampleSet::from_points(within), a, z).value, r.value, 1e-14);
  // Moving points across the split generally does not.
  auto across = points;
  std::reverse(across.begin(), across.end());
  EXPECT_GT(std::abs(norm_sq(SampleSet::from_points(across), a, z).value - r.value), 1e-6);
}

TEST(DistanceSq, Examples) {
  const auto c = WeightFamily::constant();
  const SampleSet same(1, std::vector<double>(6, 0.3));
  EXPECT_NEAR(distance_sq(same, same, c, kPlusMinusOne).value, 0.0, 1e-15);
  EXPECT_EQ(distance_sq(same, same, c, kEmpty).value, 0.0);
}

TEST(DistanceSq, IsExactCombination) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto x = random_samples(2, 30 + seed, seed);
    const auto y = random_samples(2, 25 + seed, seed + 100);
    const auto a = WeightFamily::gaussian(0.1);
    const auto z = truncation_set(a, 2, 2);
    const double combined = norm_sq(x, a, z).value + norm_sq(y, a, z).value -
                            2.0 * inner_product(x, y, a, z).value;
    EXPECT_EQ(distance_sq(x, y, a, z).value, combined);
  }
}

TEST(Estimators, TruncatedTargetIsUnbiased) {
  const auto p = make_trig_density(1, {{Frequency{1}, 1.0 / std::numbers::sqrt2}});
  const auto u = ReferenceDensity::uniform(1);
  const auto c = WeightFamily::constant();
  const int reps = 1000;
  const std::size_t n = 10'000;
  double sum = 0.0, sum_sq = 0.0, dsum = 0.0, dsum_sq = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const auto x = sample(p, n, 2 * rep);
    const double v = norm_sq(x, c, kPlusMinusOne).value;
    sum += v;
    sum_sq += v * v;
    const double d = distance_sq(x, sample(u, n, 2 * rep + 1), c, kPlusMinusOne).value;
    dsum += d;
    dsum_sq += d * d;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum_sq / reps - mean * mean) / reps);
  EXPECT_LE(std::abs(mean - 0.5), 3.0 * se);
  const double dmean = dsum / reps;
  const double dse = std::sqrt((dsum_sq / reps - dmean * dmean) / reps);
  EXPECT_LE(std::abs(dmean - 0.5), 3.0 * dse);
}

TEST(ClosedForm, Rules) {
  const auto s1 = WeightFamily::sobolev(1);
  EXPECT_EQ(select_zeta_closed_form(WeightFamily::sobolev(0.5), s1, 1, 1000), 16);
  const auto g = WeightFamily::gaussian(0.5);
  // sqrt(ln 54) = 1.9973, sqrt(ln 55) = 2.0018.
  EXPECT_EQ(select_zeta_closed_form(WeightFamily::gaussian(0.2), g, 1, 54), 2);
  EXPECT_EQ(select_zeta_closed_form(WeightFamily::gaussian(0.2), g, 1, 55), 3);
  EXPECT_EQ(select_zeta_closed_form(WeightFamily::exponential(0.1),
                                    WeightFamily::exponential(1), 1, 1000),
            static_cast<int>(std::ceil(std::log(1000.0) / 2)));
  EXPECT_EQ(select_zeta_closed_form(WeightFamily::sinc(3), s1, 1, 1e6), 3);
  EXPECT_EQ(select_zeta_closed_form(WeightFamily::sinc(3), s1, 1, 10), 3);
  EXPECT_EQ(select_zeta_closed_form(WeightFamily::constant(), WeightFamily::constant(), 1, 2),
            4);
  EXPECT_THROW(select_zeta_closed_form(WeightFamily::exponential(1), s1, 1, 100), RateError);
  EXPECT_THROW(select_zeta_closed_form(s1, s1, 1, 1), SampleSizeError);

  // log rule: smallest zeta with zeta^{89D/20} (ln zeta)^{4t+D} >= n.
  const auto l = WeightFamily::logarithmic(1);
  for (double n : {10.0, 1e3, 1e6}) {
    const int zeta = select_zeta_closed_form(WeightFamily::logarithmic(0.5), l, 1, n);
    const auto lhs = [](int z) {
      return std::pow(z, 89.0 / 20.0) * std::pow(std::log(static_cast<double>(z)), 5.0);
    };
    EXPECT_GE(lhs(zeta), n);
    if (zeta > 2) EXPECT_LT(lhs(zeta - 1), n);
  }
}

TEST(Lecam, Examples) {
  const auto s = select_zeta_lecam(WeightFamily::sobolev(1), 1000, 1);
  EXPECT_EQ(s.zeta, 19);
  EXPECT_DOUBLE_EQ(s.strength, 4940.0);
  EXPECT_FALSE(s.used_linear_scan);
  EXPECT_EQ(select_zeta_lecam(WeightFamily::constant(), 1, 1).zeta, 1);
  EXPECT_THROW(select_zeta_lecam(WeightFamily::constant(), 1e6, 1, 1000), OverflowError);
}

TEST(Lecam, MatchesExhaustiveScan) {
  for (double t : {0.5, 1.0, 2.0}) {
    for (int d = 1; d <= 2; ++d) {
      const auto b = WeightFamily::sobolev(t);
      for (double n : {10.0, 100.0, 1000.0, 5000.0}) {
        StrengthLadder ladder(b, d);
        int scan = 1;
        while (std::pow(ladder.at(scan), 2) < std::pow(scan, d) * n * n) ++scan;
        EXPECT_EQ(select_zeta_lecam(b, n, d).zeta, scan) << "t=" << t << " D=" << d;
      }
    }
  }
}

TEST(Lecam, RatioToClosedFormStaysBounded) {
  const auto b = WeightFamily::sobolev(1);
  for (double n : {1e3, 1e4, 1e5}) {
    const double ratio = select_zeta_lecam(b, n, 1).zeta / std::pow(n, 0.4);
    EXPECT_GE(ratio, 0.7);
    EXPECT_LE(ratio, 2.0);
  }
}

TEST(Lecam, NonMonotoneScoreFallsBackToScan) {
  // Heavy weight at |z| = 3 only: B jumps late, so doubling overshoots a
  // region where the score dips.
  const auto b = WeightFamily::custom(
      {{Frequency{-3}, 0.01}, {Frequency{-1}, 1.0}, {Frequency{1}, 1.0}, {Frequency{3}, 0.01}});
  const auto s = select_zeta_lecam(b, 100, 1, 64);
  EXPECT_EQ(s.zeta, 3);
  EXPECT_TRUE(s.used_linear_scan);
}

TEST(StrengthLadder, MatchesStrengthSums) {
  const auto b = WeightFamily::gaussian(0.05);
  StrengthLadder ladder(b, 2);
  for (int zeta : {5, 1, 7, 3, 0}) {
    EXPECT_NEAR(ladder.at(zeta), strength_sums(b, b, zeta, 2).b,
                1e-12 * std::max(1.0, ladder.at(zeta)));
  }
}

TEST(EstimandKind, Parse) {
  EXPECT_EQ(parse_estimand_kind("inner"), EstimandKind::inner_product);
  EXPECT_EQ(parse_estimand_kind("norm"), EstimandKind::norm_sq);
  EXPECT_EQ(parse_estimand_kind("distance_sq"), EstimandKind::distance_sq);
  EXPECT_THROW(parse_estimand_kind("ratio"), ConfigError);
}
