#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"

using namespace mecoff;

namespace {

// Upper-tail quantile by bisection on the CDF, independent of the closed form.
double quantile_by_bisection(const GevParams& p, double eps) {
  double lo = -50, hi = 50;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gev_cdf(p, mid) < 1.0 - eps) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> draws(const GevParams& p, std::size_t n, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = gev_sample(p, rng);
  return v;
}

}  // namespace

TEST(BlockMaxima, Examples) {
  const std::vector<double> s{1, 5, 3, 2, 4, 6};
  EXPECT_EQ(block_maxima(s, 3).maxima, (std::vector<double>{5, 6}));
  EXPECT_EQ(block_maxima(s, 1).maxima, s);
  const std::vector<double> seven{1, 2, 3, 4, 5, 6, 7};
  EXPECT_EQ(block_maxima(seven, 3).maxima.size(), 2U);
  EXPECT_EQ(block_maxima(seven, 3).maxima.back(), 6);
  EXPECT_THROW(block_maxima(s, 0), Error);
  EXPECT_THROW(block_maxima(s, 7), Error);
}

TEST(GevQuantile, Examples) {
  const double e = 1 - std::exp(-1.0);
  EXPECT_NEAR(gev_quantile({0, 1, 0}, e), 0.0, 1e-12);
  EXPECT_NEAR(gev_quantile({0, 1, 1}, e), 0.0, 1e-12);
  const double ref = quantile_by_bisection({0, 1, 0}, 0.1);
  EXPECT_NEAR(ref, 2.250367, 1e-6);
  EXPECT_NEAR(gev_quantile({0, 1, 0}, 0.1), ref, 1e-9);
  EXPECT_THROW(gev_quantile({0, 1, 0}, 0.0), Error);
  EXPECT_THROW(gev_quantile({0, 1, 0}, 1.0), Error);
}

TEST(GevQuantile, MatchesBisectionAcrossShapes) {
  for (double xi : {-0.4, -0.1, 0.0, 0.2, 0.7}) {
    for (double eps : {0.01, 0.1, 0.5, 0.9}) {
      const GevParams p{0.3, 1.2, xi};
      EXPECT_NEAR(gev_quantile(p, eps), quantile_by_bisection(p, eps), 1e-8) << xi << " " << eps;
    }
  }
}

TEST(GevQuantile, ShapeContinuityAndMonotonicity) {
  for (double eps : {0.001, 0.1, 0.5, 0.999}) {
    EXPECT_LT(std::abs(gev_quantile({1, 2, 1e-8}, eps) - gev_quantile({1, 2, 0}, eps)), 1e-5);
  }
  double prev = std::numeric_limits<double>::infinity();
  for (double eps = 0.01; eps < 1.0; eps += 0.01) {
    const double z = gev_quantile({0, 1, 0.3}, eps);
    EXPECT_LT(z, prev);
    prev = z;
  }
}

TEST(GevCdf, Examples) {
  EXPECT_NEAR(gev_cdf({0, 1, 0}, 0), std::exp(-1.0), 1e-15);
  EXPECT_EQ(gev_cdf({0, 1, 0.5}, -2.0), 0.0);
  EXPECT_EQ(gev_cdf({0, 1, 0.5}, -3.0), 0.0);
  EXPECT_EQ(gev_cdf({0, 1, -0.5}, 3.0), 1.0);
  auto rng = make_rng(5);
  for (int i = 0; i < 50; ++i) {
    const GevParams p{4 * uniform_open01(rng) - 2, 0.1 + 3 * uniform_open01(rng), 1.6 * uniform_open01(rng) - 0.8};
    const double eps = 0.001 + 0.998 * uniform_open01(rng);
    EXPECT_NEAR(gev_cdf(p, gev_quantile(p, eps)), 1 - eps, 1e-9);
  }
}

TEST(GevMean, Examples) {
  EXPECT_NEAR(gev_mean({0, 1, 0}), 0.5772157, 1e-7);
  EXPECT_TRUE(std::isinf(gev_mean({0, 1, 1.2})));
  EXPECT_TRUE(std::isinf(gev_mean({0, 1, 1.0})));
  EXPECT_NEAR(gev_mean({0, 1, 0.5}), 2 * (std::sqrt(std::numbers::pi) - 1), 1e-12);
}

TEST(GevMean, MonteCarloAgreement) {
  for (double xi : {-0.5, 0.0, 0.5}) {
    const GevParams p{1, 2, xi};
    const auto v = draws(p, 1000000, 17);
    double s = 0, ss = 0;
    for (double x : v) s += x;
    const double m = s / static_cast<double>(v.size());
    for (double x : v) ss += (x - m) * (x - m);
    const double se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    EXPECT_LT(std::abs(m - gev_mean(p)), 3 * se) << xi;
  }
}

TEST(GevMean, MatchesQuadratureForHeavyTails) {
  // E[X] = mu + sigma (E[Y^-xi] - 1) / xi with Y ~ Exp(1); after y = s^(1/(1-xi))
  // the integrand (1/(1-xi)) exp(-s^(1/(1-xi))) is smooth.
  for (double xi : {0.2, 0.5, 0.7, 0.9}) {
    const double a = 1.0 / (1.0 - xi);
    const int n = 200000;
    const double hi = std::pow(60.0, 1.0 / a), h = hi / n;
    double sum = 0;
    for (int i = 0; i <= n; ++i) {
      const double w = i == 0 || i == n ? 1 : i % 2 ? 4 : 2;
      sum += w * a * std::exp(-std::pow(i * h, a));
    }
    const double moment = sum * h / 3;
    EXPECT_NEAR(gev_mean({1, 2, xi}), 1 + 2 * (moment - 1) / xi, 1e-8) << xi;
  }
}

TEST(GevSample, DeterministicAndCalibrated) {
  auto a = make_rng(99), b = make_rng(99);
  EXPECT_EQ(gev_sample({0, 1, 0}, a), gev_sample({0, 1, 0}, b));
  auto v = draws({0, 1, 0}, 1000000, 23);
  std::sort(v.begin(), v.end());
  EXPECT_NEAR(v[900000], 2.2504, 0.02);
}

TEST(GevLikelihood, SupportRule) {
  const std::vector<double> x{-3.0};
  EXPECT_TRUE(std::isinf(gev_log_likelihood({0, 1, 0.5}, x)));
  EXPECT_TRUE(std::isfinite(gev_log_likelihood({0, 1, 0}, x)));
  EXPECT_TRUE(std::isinf(gev_log_likelihood({0, -1, 0}, x)));
}

TEST(GevFit, RecoversKnownParameters) {
  const auto v = draws({2, 0.5, 0.1}, 500, 41);
  const auto f = fit_gev_mle({v, 1});
  EXPECT_LT(std::abs(f.mu - 2), 0.1);
  EXPECT_LT(std::abs(f.sigma - 0.5), 0.1);
  EXPECT_LT(std::abs(f.xi - 0.1), 0.15);
  for (double x : v) EXPECT_GT(1 + f.xi * (x - f.mu) / f.sigma, 0);
}

TEST(GevFit, GumbelData) {
  const auto v = draws({0, 1, 0}, 500, 43);
  EXPECT_LT(std::abs(fit_gev_mle({v, 1}).xi), 0.15);
}

TEST(GevFit, ImprovesOnMomentStartAndIsDeterministic) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto v = draws({5, 0.3, -0.2 + 0.05 * static_cast<double>(seed)}, 300, seed);
    const auto r = fit_gev_mle_report({v, 1});
    EXPECT_GE(r.log_likelihood, r.start_log_likelihood - 1e-9);
    EXPECT_EQ(r.params, fit_gev_mle({v, 1}));
  }
}

TEST(GevFit, Errors) {
  EXPECT_THROW(fit_gev_mle({std::vector<double>(20, 3.0), 1}), Error);
  EXPECT_THROW(fit_gev_mle({std::vector<double>{1, 2, 3}, 1}), Error);
  const auto v = draws({2, 0.5, 0.1}, 200, 7);
  try {
    fit_gev_mle({v, 1}, GevFitOptions{5, 1e-8});
    FAIL();
  } catch (const FitError& e) {
    EXPECT_GT(e.best().sigma, 0);
  }
}

TEST(GevFit, PwmEstimateIsReasonable) {
  const auto v = draws({2, 0.5, 0.1}, 5000, 8);
  const auto p = gev_pwm_estimate(v);
  EXPECT_NEAR(p.mu, 2, 0.05);
  EXPECT_NEAR(p.sigma, 0.5, 0.05);
  EXPECT_NEAR(p.xi, 0.1, 0.05);
}
