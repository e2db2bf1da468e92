/**
 * Copyright 2026 The aciq-toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "aciq/distributions.hpp"
#include "aciq/pipeline.hpp"
#include "aciq/simulation.hpp"

namespace aciq {
namespace {

ChannelTensor gaussian_tensor(std::size_t channels, std::size_t per_channel, std::uint64_t seed) {
  std::vector<double> data;
  data.reserve(channels * per_channel);
  for (std::size_t c = 0; c < channels; ++c) {
    const double sigma = 0.5 + 0.05 * static_cast<double>(c);
    const auto x = sample(DistributionModel::gaussian(sigma, 0.1 * static_cast<double>(c % 5)), per_channel,
                          seed + c);
    data.insert(data.end(), x.begin(), x.end());
  }
  return ChannelTensor({channels, per_channel}, 0, std::move(data));
}

double population_variance(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

PipelineConfig config_with(MethodSet methods, int bits) {
  PipelineConfig cfg;
  cfg.methods = methods;
  cfg.weight_bits = cfg.activation_bits = bits;
  return cfg;
}

TEST(MethodSet, ParsesNamesAndRendersThem) {
  EXPECT_EQ(MethodSet::parse("none").mask(), 0u);
  EXPECT_EQ(MethodSet::parse("").mask(), 0u);
  EXPECT_EQ(MethodSet::parse("all"), MethodSet::all());
  const auto s = MethodSet::parse("bias_corr,aciq");
  EXPECT_TRUE(s.has(Method::kAciq));
  EXPECT_TRUE(s.has(Method::kBiasCorrection));
  EXPECT_FALSE(s.has(Method::kBitAllocWeights));
  EXPECT_EQ(s.name(), "aciq+bias_corr");
  EXPECT_EQ(MethodSet().name(), "none");
  EXPECT_THROW(MethodSet::parse("aciq,bogus"), Error);
}

TEST(MethodSet, CombinationsCountInBinaryOrder) {
  const auto all = method_combinations(MethodSet::all());
  ASSERT_EQ(all.size(), 16u);
  for (unsigned i = 0; i < 16; ++i) EXPECT_EQ(all[i].mask(), i);
  const auto two = method_combinations(MethodSet::parse("aciq,bias_corr"));
  EXPECT_EQ(two.size(), 4u);
}

TEST(Pipeline, EightBitsWithoutMethodsIsNearlyLossless) {
  const auto t = gaussian_tensor(64, 256, 3);
  const double var = population_variance(t.data());
  for (Role role : {Role::kWeights, Role::kActivations}) {
    const auto r = quantize_tensor(t, config_with(MethodSet(), 8), role);
    EXPECT_LE(r.report.total_mse, 1e-4 * var) << to_string(role);
  }
}

TEST(Pipeline, WeightBiasCorrectionMoments) {
  const auto t = gaussian_tensor(64, 512, 11);
  const auto r = quantize_tensor(t, config_with(MethodSet().with(Method::kBiasCorrection), 4), Role::kWeights);
  for (std::size_t c = 0; c < t.channel_count(); ++c) {
    const double xi = r.report.channels[c].xi;
    const double mean = mean_of(t.channel(c));
    EXPECT_NEAR(mean_of(r.output.channel(c)), xi * mean, 1e-12) << c;
    EXPECT_NEAR(detail::centered_norm(r.output.channel(c), mean_of(r.output.channel(c))),
                detail::centered_norm(t.channel(c), mean), 1e-9)
        << c;
  }
}

TEST(Pipeline, ActivationAciqWithAllocationBeatsMinMax) {
  const auto t = synthetic_laplace_tensor(64, 1024, 0.25, 4.0, 42);
  const auto naive = quantize_tensor(t, config_with(MethodSet(), 4), Role::kActivations);
  const auto tuned = quantize_tensor(
      t, config_with(MethodSet().with(Method::kAciq).with(Method::kBitAllocActivations), 4), Role::kActivations);
  EXPECT_LT(tuned.report.total_mse, naive.report.total_mse);
}

TEST(Pipeline, TotalIsElementWeightedChannelSum) {
  const auto t = synthetic_laplace_tensor(16, 300, 0.5, 2.0, 9);
  for (Role role : {Role::kWeights, Role::kActivations}) {
    const auto r = quantize_tensor(t, config_with(MethodSet::all(), 4), role).report;
    double weighted = 0.0;
    std::size_t n = 0;
    for (const auto& ch : r.channels) {
      weighted += ch.mse * static_cast<double>(ch.count);
      n += ch.count;
    }
    EXPECT_NEAR(r.total_mse, weighted / static_cast<double>(n), 1e-9 * r.total_mse);
  }
}

TEST(Pipeline, ReportedChannelMseMatchesTensors) {
  const auto t = synthetic_laplace_tensor(8, 200, 0.5, 2.0, 4);
  const auto r = quantize_tensor(t, config_with(MethodSet::all(), 3), Role::kActivations);
  for (std::size_t c = 0; c < t.channel_count(); ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.channel_size(); ++i) {
      const double d = t.channel(c)[i] - r.output.channel(c)[i];
      s += d * d;
    }
    EXPECT_NEAR(r.report.channels[c].mse, s / static_cast<double>(t.channel_size()), 1e-12);
  }
}

TEST(Pipeline, BitAllocationStaysNearQuota) {
  const auto t = synthetic_laplace_tensor(64, 256, 0.1, 10.0, 5);
  auto cfg = config_with(MethodSet().with(Method::kBitAllocWeights), 4);
  cfg.allocation.repair_quota = true;
  const auto r = quantize_tensor(t, cfg, Role::kWeights).report;
  EXPECT_LE(r.used_bins, r.quota_bins);
  std::vector<int> bits;
  for (const auto& ch : r.channels) bits.push_back(ch.bits);
  EXPECT_GT(*std::max_element(bits.begin(), bits.end()), *std::min_element(bits.begin(), bits.end()));
}

TEST(Pipeline, InapplicableMethodsWarn) {
  const auto t = synthetic_laplace_tensor(4, 100, 1.0, 1.0, 1);
  const auto w = quantize_tensor(t, config_with(MethodSet::parse("aciq"), 4), Role::kWeights).report;
  EXPECT_FALSE(w.warnings.empty());
  const auto a = quantize_tensor(t, config_with(MethodSet::parse("bias_corr"), 4), Role::kActivations).report;
  EXPECT_FALSE(a.warnings.empty());
}

TEST(Pipeline, ConstantChannelPassesThroughUnderAciq) {
  std::vector<double> data(2 * 50, 3.5);
  const auto laplace = sample(DistributionModel::laplace(1.0), 50, 2);
  std::copy(laplace.begin(), laplace.end(), data.begin() + 50);
  const ChannelTensor t({2, 50}, 0, data);
  const auto r = quantize_tensor(t, config_with(MethodSet::parse("aciq"), 4), Role::kActivations);
  EXPECT_TRUE(r.report.channels[0].passthrough);
  EXPECT_FALSE(r.report.channels[1].passthrough);
  EXPECT_EQ(r.report.channels[0].mse, 0.0);
  EXPECT_FALSE(r.report.warnings.empty());
}

TEST(Pipeline, InvalidBitsAreRejected) {
  const auto t = synthetic_laplace_tensor(2, 10, 1.0, 1.0, 1);
  EXPECT_THROW(quantize_tensor(t, config_with(MethodSet(), 0), Role::kWeights), Error);
  EXPECT_THROW(quantize_tensor(t, config_with(MethodSet(), 17), Role::kActivations), Error);
}

TEST(Compare, EmptyRowEqualsQuantizeWithMethodsOff) {
  const auto t = synthetic_laplace_tensor(16, 256, 0.25, 4.0, 42);
  const auto base = config_with(MethodSet(), 4);
  const auto rows = compare_methods(t, base, method_combinations(MethodSet::all()));
  ASSERT_EQ(rows.size(), 16u);
  const double w = quantize_tensor(t, base, Role::kWeights).report.total_mse;
  const double a = quantize_tensor(t, base, Role::kActivations).report.total_mse;
  EXPECT_EQ(rows[0].weights_mse, w);
  EXPECT_EQ(rows[0].activations_mse, a);
  EXPECT_EQ(rows[0].total_mse, w + a);
}

TEST(Compare, AllMethodsRowIsLowestOnHeterogeneousLaplaceTensor) {
  const auto t = synthetic_laplace_tensor(64, 1024, 0.25, 4.0, 42);
  const auto rows = compare_methods(t, config_with(MethodSet(), 4), method_combinations(MethodSet::all()));
  const double all = rows.back().total_mse;
  for (const auto& r : rows) EXPECT_LE(all, r.total_mse) << r.methods.name();
  EXPECT_LT(all, rows.front().total_mse);
}

TEST(KldCompare, RowsAndBaselines) {
  const auto x = sample(DistributionModel::laplace(1.0), 10000, 42);
  const auto rows = kld_compare(x, 4, Family::kLaplace);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].method, "aciq");
  EXPECT_EQ(rows[1].method, "kld");
  EXPECT_EQ(rows[2].method, "naive");
  double max_abs = 0.0;
  for (double v : x) max_abs = std::max(max_abs, std::abs(v));
  EXPECT_EQ(rows[2].threshold, max_abs);
  EXPECT_LE(rows[0].mse, rows[2].mse);
  EXPECT_LT(rows[0].micros, rows[1].micros);
}

TEST(KldCompare, ConstantSamplesAreDegenerate) {
  const std::vector<double> x(100, 0.0);
  try {
    kld_compare(x, 4, Family::kLaplace);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
  }
}

}  // namespace
}  // namespace aciq
