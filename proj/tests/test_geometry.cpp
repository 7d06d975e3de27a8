#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "leoop/geometry.hpp"

using leoop::GeometryParams;

namespace {

GeometryParams table2(double theta0 = 10.0) { return {6371.0, 1200.0, theta0, 720}; }

// Uniform satellites on the orbital sphere, user at the north pole.
// Returns slant ranges of satellites at elevation >= theta0.
std::vector<double> bpp_visible_ranges(const GeometryParams& p, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double R = p.r_e + p.r_min;
  const double sin0 = std::sin(leoop::deg_to_rad(p.theta0_deg));
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 2.0 * uni(rng) - 1.0;  // cos of the polar angle
    const double ph = 2.0 * std::numbers::pi * uni(rng);
    const double s = std::sqrt(1.0 - z * z);
    const double vx = R * s * std::cos(ph), vy = R * s * std::sin(ph), vz = R * z - p.r_e;
    const double d = std::sqrt(vx * vx + vy * vy + vz * vz);
    if (vz / d >= sin0) out.push_back(d);
  }
  return out;
}

double ks_statistic(std::vector<double> x, const GeometryParams& p) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = leoop::range_cdf(x[i], p);
    d = std::max({d, F - i / n, (i + 1) / n - F});
  }
  return d;
}

}  // namespace

TEST(Geometry, MaxSlantRangeValues) {
  EXPECT_NEAR(leoop::max_slant_range(table2(0.0)), 4090.28, 0.005);
  EXPECT_NEAR(leoop::max_slant_range(table2(0.0)), std::sqrt(1200.0 * 1200.0 + 2 * 6371.0 * 1200.0), 1e-9);
  EXPECT_NEAR(leoop::max_slant_range(table2(10.0)), 3130.9422, 5e-4);
  EXPECT_NEAR(leoop::max_slant_range(table2(90.0)), 1200.0, 1e-9);
}

TEST(Geometry, MaxSlantRangeSolvesLawOfCosines) {
  // (r_e + d)^2 = r_e^2 + r^2 + 2 r_e r sin(theta0)
  for (double th : {0.0, 15.0, 45.0, 80.0}) {
    const auto p = table2(th);
    const double r = leoop::max_slant_range(p);
    const double lhs = (p.r_e + p.r_min) * (p.r_e + p.r_min);
    const double rhs = p.r_e * p.r_e + r * r + 2 * p.r_e * r * std::sin(leoop::deg_to_rad(th));
    EXPECT_NEAR(lhs, rhs, 1e-9 * lhs);
  }
}

TEST(Geometry, RangeCdfValues) {
  const auto p = table2();
  EXPECT_EQ(leoop::range_cdf(p.r_min, p), 0.0);
  EXPECT_EQ(leoop::range_cdf(leoop::max_slant_range(p), p), 1.0);
  EXPECT_EQ(leoop::range_cdf(100.0, p), 0.0);
  EXPECT_EQ(leoop::range_cdf(1e5, p), 1.0);
  EXPECT_NEAR(leoop::range_cdf(2000.0, p), 0.306118, 5e-6);
}

TEST(Geometry, RangePdfValuesAndNormalization) {
  const auto p = table2();
  EXPECT_NEAR(leoop::range_pdf(2000.0, p), 4.7830e-4, 5e-8);
  EXPECT_EQ(leoop::range_pdf(1000.0, p), 0.0);
  EXPECT_EQ(leoop::range_pdf(5000.0, p), 0.0);
  const double rmax = leoop::max_slant_range(p);
  const double mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double r) { return leoop::range_pdf(r, p); }, p.r_min, rmax);
  EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(Geometry, PdfIsDerivativeOfCdf) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> alt(300, 2000), th(0, 85), u(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    GeometryParams p{6371.0, alt(rng), th(rng), 100};
    const double r = leoop::range_quantile(u(rng), p);
    const double h = 1e-4 * r;
    const double fd = (leoop::range_cdf(r + h, p) - leoop::range_cdf(r - h, p)) / (2 * h);
    EXPECT_NEAR(fd, leoop::range_pdf(r, p), 1e-6 * leoop::range_pdf(r, p));
  }
}

TEST(Geometry, CdfMonotoneAndContinuous) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> alt(300, 2000), th(0, 89), re(3000, 9000);
  for (int i = 0; i < 1000; ++i) {
    GeometryParams p{re(rng), alt(rng), th(rng), 10};
    const double rmax = leoop::max_slant_range(p);
    double prev = 0.0;
    for (int j = 0; j <= 50; ++j) {
      const double r = p.r_min * 0.9 + (rmax * 1.1 - p.r_min * 0.9) * j / 50.0;
      const double F = leoop::range_cdf(r, p);
      ASSERT_GE(F, prev);
      prev = F;
    }
    EXPECT_NEAR(leoop::range_cdf(p.r_min * (1 + 1e-12), p), 0.0, 1e-8);
    EXPECT_NEAR(leoop::range_cdf(rmax * (1 - 1e-12), p), 1.0, 1e-8);
  }
}

TEST(Geometry, QuantileEndpoints) {
  const auto p = table2();
  EXPECT_NEAR(leoop::range_quantile(0.0, p), p.r_min, 1e-9);
  EXPECT_NEAR(leoop::range_quantile(1.0, p), leoop::max_slant_range(p), 1e-9);
}

TEST(Geometry, SamplerPassesKs) {
  const auto p = table2();
  std::mt19937_64 rng(5);
  const auto x = leoop::sample_ranges(100000, p, rng);
  EXPECT_LT(ks_statistic(x, p), 1.36 / std::sqrt(100000.0));
  std::mt19937_64 a(9), b(9);
  EXPECT_EQ(leoop::sample_ranges(10, p, a), leoop::sample_ranges(10, p, b));
}

TEST(Geometry, VisibilityProbabilityValues) {
  EXPECT_NEAR(leoop::visibility_probability(table2(0.0)), 0.07925, 5e-6);
  EXPECT_NEAR(leoop::visibility_probability(table2(0.0)), 1200.0 / (2 * (6371.0 + 1200.0)), 1e-12);
  EXPECT_NEAR(leoop::visibility_probability(table2(10.0)), 0.04334, 5e-6);
  EXPECT_NEAR(leoop::visibility_probability(table2(90.0)), 0.0, 1e-12);
}

TEST(Geometry, VisibilityDecreasesWithMaskAngle) {
  double prev = 2.0;
  for (double th = 0.0; th <= 89.0; th += 0.5) {
    const double v = leoop::visibility_probability(table2(th));
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Geometry, BppOracleMatchesVisibilityAndRanges) {
  const std::size_t n = 1000000;
  for (double th : {0.0, 10.0, 20.0, 40.0}) {
    const auto p = table2(th);
    const auto r = bpp_visible_ranges(p, n, 100 + static_cast<std::uint64_t>(th));
    const double P = leoop::visibility_probability(p);
    const double sd = std::sqrt(P * (1 - P) / n);
    EXPECT_NEAR(static_cast<double>(r.size()) / n, P, 3 * sd) << th;
    EXPECT_LT(ks_statistic(r, p) * std::sqrt(static_cast<double>(r.size())), 1.95) << th;
  }
}

TEST(Geometry, AtLeastVisible) {
  EXPECT_NEAR(leoop::binomial_upper_tail(5, 10, 0.5), 638.0 / 1024.0, 1e-12);
  EXPECT_EQ(leoop::binomial_upper_tail(1, 10, 0.0), 0.0);
  EXPECT_GE(leoop::prob_at_least_visible(3, table2()), 1 - 1e-9);
  EXPECT_THROW(leoop::prob_at_least_visible(721, table2()), leoop::DomainError);
  EXPECT_THROW(leoop::prob_at_least_visible(0, table2()), leoop::DomainError);
}

TEST(Geometry, AtLeastVisibleMatchesExactSum) {
  const auto p = table2(40.0);
  const double P = leoop::visibility_probability(p);
  for (int S : {1, 5, 10, 15}) {
    double below = 0.0;
    for (int j = 0; j < S; ++j)
      below += std::exp(std::lgamma(721.0) - std::lgamma(j + 1.0) - std::lgamma(721.0 - j) + j * std::log(P) +
                        (720 - j) * std::log1p(-P));
    EXPECT_NEAR(leoop::prob_at_least_visible(S, p), 1.0 - below, 1e-12);
  }
}

TEST(Geometry, MeanRangePower) {
  const auto p = table2();
  EXPECT_NEAR(leoop::mean_range_power(2.0, p), 2.2935e-7, 5e-11);
  const double rmax = leoop::max_slant_range(p);
  for (double a : {1.0, 2.0, 3.0, 4.0}) {
    const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double r) { return std::pow(r, -a) * leoop::range_pdf(r, p); }, p.r_min, rmax, 10, 1e-14);
    EXPECT_NEAR(leoop::mean_range_power(a, p), q, 1e-10 * q) << a;
  }
}

TEST(Geometry, MeanRangePowerLimits) {
  const auto p = table2();
  const double at2 = leoop::mean_range_power(2.0, p);
  EXPECT_NEAR(leoop::mean_range_power(2.0 - 1e-6, p), at2, 1e-4 * at2);
  EXPECT_NEAR(leoop::mean_range_power(2.0 + 1e-6, p), at2, 1e-4 * at2);
  GeometryParams near = p;
  near.theta0_deg = 89.9999;
  EXPECT_NEAR(leoop::mean_range_power(2.0, near), std::pow(p.r_min, -2.0), 1e-3 * std::pow(p.r_min, -2.0));
  EXPECT_THROW(leoop::mean_range_power(0.0, p), leoop::DomainError);
}

TEST(Geometry, ParamsValidation) {
  EXPECT_NO_THROW(table2().validate());
  EXPECT_THROW((GeometryParams{6371, 1200, 90, 720}).validate(), leoop::ConfigError);
  EXPECT_THROW((GeometryParams{6371, -1, 10, 720}).validate(), leoop::ConfigError);
  EXPECT_THROW((GeometryParams{6371, 1200, 10, 0}).validate(), leoop::ConfigError);
}
