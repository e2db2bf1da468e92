#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "aciq/analytic.hpp"
#include "aciq/random.hpp"
#include "support/oracles.hpp"

namespace aciq {
namespace {

const auto kLaplace1 = DistributionModel::laplace(1.0);
const auto kGauss1 = DistributionModel::gaussian(1.0);

double finite_difference(const AciqSetting& s, double alpha, double h = 1e-5) {
  return (mse(s, alpha + h) - mse(s, alpha - h)) / (2.0 * h);
}

std::function<double(double)> density_of(const DistributionModel& m) {
  if (m.family() == Family::kLaplace) return [b = m.scale()](double x) { return testing::laplace_density(x, b); };
  return [s = m.scale()](double x) { return testing::gaussian_density(x, s); };
}

// --- erf ------------------------------------------------------------------

TEST(Erf, KnownValues) {
  EXPECT_EQ(aciq::erf(0.0), 0.0);
  EXPECT_NEAR(aciq::erf(1.0), 0.8427007929, 1e-10);
  EXPECT_NEAR(aciq::erf(1.0), testing::erf_series_oracle(1.0), 1e-15);
  for (double x = 6.0; x < 40.0; x += 0.5) EXPECT_NEAR(aciq::erf(x), 1.0, 1e-12);
}

TEST(Erf, MatchesSeriesOracleAndStdOnRange) {
  for (double x = -6.0; x <= 6.0; x += 0.001) {
    EXPECT_NEAR(aciq::erf(x), std::erf(x), 1e-12) << x;
    EXPECT_EQ(aciq::erf(-x), -aciq::erf(x));
    if (std::abs(x) <= 3.0) {
      EXPECT_NEAR(aciq::erf(x), testing::erf_series_oracle(x), 1e-13) << x;
    }
  }
}

TEST(Erfc, RelativeAccuracyInTail) {
  for (double x = -3.0; x <= 26.0; x += 0.01) {
    const double ref = std::erfc(x);
    EXPECT_LE(std::abs(aciq::erfc(x) - ref), 1e-12 * ref) << x;
  }
}

// --- rounding noise ---------------------------------------------------------

TEST(RoundingNoiseUniform, Examples) {
  EXPECT_DOUBLE_EQ(rounding_noise_uniform(1.0, 4), 1.0 / 768.0);
  EXPECT_DOUBLE_EQ(rounding_noise_uniform(2.0, 2), 1.0 / 12.0);
  EXPECT_DOUBLE_EQ(rounding_noise_uniform(1.0, 4, ClipMode::kFusedRelu), 1.0 / 6144.0);
}

TEST(RoundingNoisePwl, UniformDensityReproducesUniformFormula) {
  for (int bits = 1; bits <= 10; ++bits) {
    for (double alpha : {0.3, 1.0, 4.2}) {
      const double pwl = rounding_noise_pwl([&](double) { return 1.0 / (2.0 * alpha); }, alpha, bits);
      EXPECT_NEAR(pwl, rounding_noise_uniform(alpha, bits), 1e-12 * rounding_noise_uniform(alpha, bits));
    }
  }
}

TEST(RoundingNoisePwl, MatchesNumericIntegration) {
  const double lap_exact = testing::exact_rounding_noise(density_of(kLaplace1), 4.0, 6);
  EXPECT_LE(std::abs(rounding_noise_pwl(kLaplace1, 4.0, 6) - lap_exact) / lap_exact, 0.01);
  const double gau_exact = testing::exact_rounding_noise(density_of(kGauss1), 3.0, 8);
  EXPECT_LE(std::abs(rounding_noise_pwl(kGauss1, 3.0, 8) - gau_exact) / gau_exact, 0.002);
}

TEST(RoundingNoisePwl, ErrorShrinksWithBits) {
  for (const auto& model : {kLaplace1, kGauss1}) {
    for (double alpha : {2.0, 4.0}) {
      double prev = INFINITY;
      for (int bits = 4; bits <= 10; ++bits) {
        const double exact = testing::exact_rounding_noise(density_of(model), alpha, bits);
        const double err = std::abs(rounding_noise_pwl(model, alpha, bits) - exact);
        EXPECT_LT(err, prev) << bits;
        prev = err;
      }
    }
  }
}

// --- clipping noise ---------------------------------------------------------

TEST(ClipNoise, VarianceLimitAndKnownValue) {
  EXPECT_NEAR(clip_noise(kLaplace1, 1e-12), 2.0, 1e-10);
  EXPECT_NEAR(clip_noise(kGauss1, 1e-12), 1.0, 1e-10);
  EXPECT_NEAR(clip_noise(kLaplace1, 5.03), 2.0 * std::exp(-5.03), 1e-17);
  EXPECT_NEAR(clip_noise(kLaplace1, 5.03), 1.308e-2, 1e-5);
  EXPECT_THROW(clip_noise(kLaplace1, 0.0), Error);
}

TEST(ClipNoise, AgreesWithTailIntegral) {
  for (const double scale : {0.5, 1.0, 3.0}) {
    for (auto family : {Family::kLaplace, Family::kGaussian}) {
      const DistributionModel m(family, scale);
      const auto f = density_of(m);
      for (double r = 0.5; r <= 10.0; r += 0.25) {
        const double alpha = r * scale;
        const double tail =
            2.0 * testing::integrate_to_infinity([&](double x) { return f(x) * (x - alpha) * (x - alpha); }, alpha);
        EXPECT_LE(std::abs(clip_noise(m, alpha) - tail), 1e-8 * tail) << to_string(family) << " " << alpha;
      }
    }
  }
}

// --- total MSE --------------------------------------------------------------

TEST(Mse, LaplaceFourBitValueAndGridMinimum) {
  const AciqSetting s(kLaplace1, 4);
  EXPECT_NEAR(mse(s, 5.03), 2.0 * std::exp(-5.03) + 5.03 * 5.03 / 768.0, 1e-15);
  EXPECT_NEAR(mse(s, 5.03), 0.04602, 1e-5);
  double best_alpha = 0.0, best = INFINITY;
  for (int i = 1; i <= 10000; ++i) {
    const double a = 0.001 * i;
    if (mse(s, a) < best) {
      best = mse(s, a);
      best_alpha = a;
    }
  }
  EXPECT_NEAR(best_alpha, 5.03, 0.0015);
}

TEST(Mse, VarianceLimit) {
  for (int bits = 1; bits <= 16; ++bits) EXPECT_NEAR(mse(AciqSetting(kLaplace1, bits), 1e-9), 2.0, 1e-8);
}

TEST(Mse, TwoBitOptimumBeatsNeighbours) {
  const AciqSetting s(kLaplace1, 2);
  EXPECT_LT(mse(s, 2.83), mse(s, 2.0));
  EXPECT_LT(mse(s, 2.83), mse(s, 4.0));
}

TEST(Mse, FusedReluForms) {
  const double a = 3.0;
  EXPECT_NEAR(mse(AciqSetting(kLaplace1, 4, ClipMode::kFusedRelu), a), std::exp(-a) + a * a / (24.0 * 256.0), 1e-15);
  const double z = a / std::sqrt(2.0);
  const double gauss = (a * a + 1.0) / 2.0 * std::erfc(z) + a * a / (24.0 * 256.0) -
                       a * std::exp(-a * a / 2.0) / std::sqrt(2.0 * M_PI);
  EXPECT_NEAR(mse(AciqSetting(kGauss1, 4, ClipMode::kFusedRelu), a), gauss, 1e-14);
  const double gsym = (a * a + 1.0) * std::erfc(z) + a * a / (3.0 * 256.0) -
                      std::sqrt(2.0) * a * std::exp(-a * a / 2.0) / std::sqrt(M_PI);
  EXPECT_NEAR(mse(AciqSetting(kGauss1, 4), a), gsym, 1e-14);
}

TEST(Mse, StrictlyDecreasesWithBits) {
  for (const auto& model : {kLaplace1, kGauss1}) {
    for (auto mode : {ClipMode::kSymmetric, ClipMode::kFusedRelu}) {
      for (double a : {0.5, 2.0, 6.0}) {
        for (int bits = 1; bits < 16; ++bits)
          EXPECT_LT(mse(AciqSetting(model, bits + 1, mode), a), mse(AciqSetting(model, bits, mode), a));
      }
    }
  }
}

// --- derivative -------------------------------------------------------------

TEST(MseDerivative, LaplaceExamples) {
  const AciqSetting s(kLaplace1, 4);
  EXPECT_LE(std::abs(mse_derivative(s, 5.03)), 2e-3);
  EXPECT_LT(mse_derivative(s, 1.0), 0.0);
  EXPECT_LT(finite_difference(s, 1.0), 0.0);
  EXPECT_NEAR(mse_derivative(s, 2.5), 2.0 * 2.5 / 768.0 - 2.0 * std::exp(-2.5), 1e-15);
}

TEST(MseDerivative, MatchesFiniteDifferences) {
  for (double scale : {0.5, 1.0, 2.0}) {
    for (auto family : {Family::kLaplace, Family::kGaussian}) {
      for (auto mode : {ClipMode::kSymmetric, ClipMode::kFusedRelu}) {
        for (int bits : {1, 2, 4, 8}) {
          const AciqSetting s(DistributionModel(family, scale), bits, mode);
          for (double r = 0.5; r <= 10.0; r += 0.25) {
            const double a = r * scale;
            EXPECT_NEAR(mse_derivative(s, a), finite_difference(s, a), 1e-6);
          }
        }
      }
    }
  }
}

TEST(MseDerivative, SingleSignChange) {
  for (auto family : {Family::kLaplace, Family::kGaussian}) {
    for (auto mode : {ClipMode::kSymmetric, ClipMode::kFusedRelu}) {
      for (int bits = 1; bits <= 8; ++bits) {
        const AciqSetting s(DistributionModel(family, 1.0), bits, mode);
        int flips = 0;
        double prev = mse_derivative(s, 0.1);
        for (double a = 0.1 + 1e-3; a <= 20.0; a += 1e-3) {
          const double d = mse_derivative(s, a);
          if (std::signbit(d) != std::signbit(prev)) ++flips;
          prev = d;
        }
        EXPECT_EQ(flips, 1) << to_string(family) << " " << to_string(mode) << " " << bits;
      }
    }
  }
}

// --- solver -----------------------------------------------------------------

TEST(OptimalAlpha, LaplaceConstants) {
  EXPECT_NEAR(optimal_alpha(AciqSetting(kLaplace1, 2)), 2.83, 0.01);
  EXPECT_NEAR(optimal_alpha(AciqSetting(kLaplace1, 3)), 3.89, 0.01);
  EXPECT_NEAR(optimal_alpha(AciqSetting(kLaplace1, 4)), 5.03, 0.01);
  EXPECT_NEAR(optimal_alpha(AciqSetting(DistributionModel::laplace(3.0), 4)), 15.09, 0.03);
}

TEST(OptimalAlpha, CachedLaplaceRatios) {
  const auto& r = laplace_optimal_ratios();
  EXPECT_NEAR(r[2], 2.83, 0.01);
  EXPECT_NEAR(r[3], 3.89, 0.01);
  EXPECT_NEAR(r[4], 5.03, 0.01);
  for (int m = 2; m <= 8; ++m) EXPECT_GT(r[m], r[m - 1]);
}

TEST(OptimalAlpha, GaussianMatchesGridSearch) {
  const AciqSetting s(kGauss1, 4);
  double best_alpha = 0.0, best = INFINITY;
  for (int i = 100; i <= 10000; ++i) {
    const double a = 0.001 * i;
    const double m = mse(s, a);
    if (m < best) {
      best = m;
      best_alpha = a;
    }
  }
  EXPECT_NEAR(optimal_alpha(s), best_alpha, 0.002);
}

TEST(OptimalAlpha, ScaleEquivariant) {
  Rng rng(5);
  for (auto family : {Family::kLaplace, Family::kGaussian}) {
    for (auto mode : {ClipMode::kSymmetric, ClipMode::kFusedRelu}) {
      for (int bits : {2, 4, 8}) {
        const double base = optimal_alpha(AciqSetting(DistributionModel(family, 1.0), bits, mode));
        for (int i = 0; i < 5; ++i) {
          const double c = 0.01 + 50.0 * rng.uniform();
          const double scaled = optimal_alpha(AciqSetting(DistributionModel(family, c), bits, mode));
          EXPECT_NEAR(scaled / c, base, 1e-12 * base);
        }
      }
    }
  }
}

TEST(OptimalAlpha, IncreasesWithBitsAndSolvesEverywhere) {
  for (auto family : {Family::kLaplace, Family::kGaussian}) {
    for (auto mode : {ClipMode::kSymmetric, ClipMode::kFusedRelu}) {
      double prev = 0.0;
      for (int bits = 1; bits <= 16; ++bits) {
        const AciqSetting s(DistributionModel(family, 1.0), bits, mode);
        const double a = optimal_alpha(s);
        EXPECT_GT(a, prev) << bits;
        EXPECT_NEAR(mse_derivative(s, a), 0.0, 1e-9);
        prev = a;
      }
    }
  }
}

TEST(Bisect, NoSignChangeReportsError) {
  try {
    bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
    EXPECT_STREQ(e.what(), "no optimum in bracket");
  }
  EXPECT_NEAR(bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-12), std::sqrt(2.0), 1e-12);
}

}  // namespace
}  // namespace aciq
