#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "aciq/bias_correction.hpp"
#include "aciq/distributions.hpp"
#include "aciq/quantizer.hpp"
#include "aciq/random.hpp"

namespace aciq {
namespace {

double centered_norm(std::span<const double> v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s);
}

ChannelTensor minmax_quantized(const ChannelTensor& t, int bits) {
  std::vector<double> out;
  for (std::size_t c = 0; c < t.channel_count(); ++c) {
    const auto q = quantize_minmax_channel(t.channel(c), bits);
    out.insert(out.end(), q.values.begin(), q.values.end());
  }
  return t.with_data(std::move(out));
}

TEST(CorrectionTerms, IdentityQuantizer) {
  const ChannelTensor t({3, 4}, 0, {1, 2, 3, 4, -1, 0, 5, 2, 7, 7, 8, 9});
  const auto terms = correction_terms(t, t);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_DOUBLE_EQ(terms.mu[c], 0.0);
    EXPECT_DOUBLE_EQ(terms.xi[c], 1.0);
  }
}

TEST(CorrectionTerms, ShiftedChannel) {
  const ChannelTensor orig({1, 2}, 0, {1, 3});
  const ChannelTensor quant({1, 2}, 0, {0, 2});
  const auto terms = correction_terms(orig, quant);
  EXPECT_DOUBLE_EQ(terms.mu[0], 1.0);
  EXPECT_DOUBLE_EQ(terms.xi[0], 1.0);
}

TEST(CorrectionTerms, ConstantQuantizedChannelKeepsUnitXi) {
  const ChannelTensor orig({1, 3}, 0, {0.1, 0.2, 0.3});
  const ChannelTensor quant({1, 3}, 0, {0.0, 0.0, 0.0});
  const auto terms = correction_terms(orig, quant);
  EXPECT_DOUBLE_EQ(terms.xi[0], 1.0);
  EXPECT_NEAR(terms.mu[0], 0.2, 1e-15);
}

TEST(CorrectionTerms, ShapeMismatch) {
  EXPECT_THROW(correction_terms(ChannelTensor({2, 2}, 0, std::vector<double>(4)),
                                ChannelTensor({4, 1}, 0, std::vector<double>(4))),
               Error);
}

TEST(ApplyCorrection, Formula) {
  const ChannelTensor q({1, 2}, 0, {0, 2});
  const auto out = apply_correction(q, CorrectionTerms{{1.0}, {0.5}});
  EXPECT_EQ(out.data(), (std::vector<double>{0.5, 1.5}));
  const auto same = apply_correction(q, CorrectionTerms{{0.0}, {1.0}});
  EXPECT_EQ(same.data(), q.data());
  EXPECT_THROW(apply_correction(q, CorrectionTerms{{0.0, 0.0}, {1.0, 1.0}}), Error);
}

// w <- xi (w + mu) restores the centered norm exactly. The mean becomes
// xi * E[W]; it equals E[W] only when xi = 1 or E[W] = 0.
TEST(ApplyCorrection, RestoresCenteredNormAndScalesMean) {
  Rng rng(77);
  std::vector<double> data(8 * 256);
  for (auto& x : data) x = rng.normal() * 0.3 + 0.05;
  const ChannelTensor orig({8, 256}, 0, data);
  const auto quant = minmax_quantized(orig, 4);
  const auto corrected = apply_correction(quant, correction_terms(orig, quant));
  ASSERT_TRUE(corrected.same_shape(orig));
  for (std::size_t c = 0; c < 8; ++c) {
    const auto terms = correction_terms(orig, quant);
    EXPECT_NEAR(mean_of(corrected.channel(c)), terms.xi[c] * mean_of(orig.channel(c)), 1e-12);
    EXPECT_NEAR(centered_norm(corrected.channel(c)), centered_norm(orig.channel(c)), 1e-9);
  }
}

TEST(FoldCorrection, Examples) {
  const auto id = fold_correction(0.7, -0.2, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(id.scale, 0.7);
  EXPECT_DOUBLE_EQ(id.offset, -0.2);
  const auto f = fold_correction(1.0, 0.0, 2.0, 3.0);
  EXPECT_DOUBLE_EQ(f.scale, 3.0);
  EXPECT_DOUBLE_EQ(f.offset, 6.0);
}

TEST(FoldCorrection, EqualsApplyOnAffineReconstruction) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const double s = 0.01 + rng.uniform();
    const double o = rng.normal();
    const double mu = 0.1 * rng.normal();
    const double xi = 0.5 + rng.uniform();
    const auto folded = fold_correction(s, o, mu, xi);
    for (int code = 0; code < 16; ++code) {
      const double direct = xi * (s * code + o + mu);
      EXPECT_NEAR(folded.scale * code + folded.offset, direct, 1e-12);
    }
  }
}

TEST(BiasCorrection, ImprovesMostChannels) {
  Rng rng(2);
  int improved = 0;
  for (int c = 0; c < 100; ++c) {
    std::vector<double> w(512);
    for (auto& x : w) x = rng.normal();
    const ChannelTensor orig({1, 512}, 0, w);
    const auto quant = minmax_quantized(orig, 4);
    const auto corrected = apply_correction(quant, correction_terms(orig, quant));
    if (mse_between(orig.data(), corrected.data()) < mse_between(orig.data(), quant.data())) ++improved;
  }
  EXPECT_GE(improved, 90);
}

}  // namespace
}  // namespace aciq
