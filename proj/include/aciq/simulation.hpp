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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "aciq/analytic.hpp"
#include "aciq/bit_allocation.hpp"
#include "aciq/distributions.hpp"
#include "aciq/error.hpp"
#include "aciq/quantizer.hpp"

// Monte Carlo and brute-force oracles for the closed forms.

namespace aciq {

/// Analytic vs. simulated MSE over a grid of clipping values.
/// One sample set is drawn and reused at every alpha (paired design).
struct MseCurve {
  std::vector<double> alphas;
  std::vector<double> analytic;
  std::vector<double> empirical;
  int bits = 0;
  Family family = Family::kLaplace;
  ClipMode mode = ClipMode::kSymmetric;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  double max_relative_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i)
      worst = std::max(worst, std::abs(empirical[i] - analytic[i]) / analytic[i]);
    return worst;
  }
};

inline constexpr std::size_t kMinCurveSamples = 1000;

/// Empirical MSE of the prior-centered samples at one clipping value.
inline double paired_empirical_mse(std::span<const double> centered, double alpha, int bits,
                                   ClipMode mode) {
  const QuantGrid grid = make_grid(alpha, bits, grid_mode(mode));
  return mode == ClipMode::kSymmetric ? empirical_mse(centered, grid)
                                      : empirical_mse_fused_relu(centered, grid);
}

inline MseCurve mse_curve(const DistributionModel& model, int bits, ClipMode mode,
                          std::span<const double> alpha_grid, std::size_t n, std::uint64_t seed) {
  detail::require(!alpha_grid.empty(), "alpha grid is empty");
  detail::require(n >= kMinCurveSamples, "mse curve needs at least 1000 samples");
  for (std::size_t i = 1; i < alpha_grid.size(); ++i)
    detail::require(alpha_grid[i] > alpha_grid[i - 1], "alpha grid must be ascending");
  const AciqSetting setting(model, bits, mode);

  auto samples = sample(model, n, seed);
  for (double& x : samples) x -= model.mean();

  MseCurve curve;
  curve.alphas.assign(alpha_grid.begin(), alpha_grid.end());
  curve.bits = bits;
  curve.family = model.family();
  curve.mode = mode;
  curve.n_samples = n;
  curve.seed = seed;
  for (double alpha : curve.alphas) {
    curve.analytic.push_back(mse(setting, alpha));
    curve.empirical.push_back(paired_empirical_mse(samples, alpha, bits, mode));
  }
  return curve;
}

/// Evenly spaced grid lo, lo + step, ... up to hi (inclusive within step/2).
inline std::vector<double> alpha_range(double lo, double hi, double step) {
  detail::require(step > 0.0 && hi >= lo, "invalid alpha range");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5));
  for (std::size_t i = 0; i <= count; ++i) grid.push_back(lo + step * static_cast<double>(i));
  return grid;
}

/// Clipping value with the smallest empirical MSE; ties go to the smaller alpha.
inline double empirical_argmin(const MseCurve& curve) {
  detail::require(!curve.alphas.empty() && curve.empirical.size() == curve.alphas.size(),
                  "curve is degenerate");
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.empirical.size(); ++i)
    if (curve.empirical[i] < curve.empirical[best]) best = i;
  return curve.alphas[best];
}

struct SplitMse {
  std::size_t bins_i = 0;
  std::size_t bins_j = 0;
  double mse = 0.0;  // summed over both channels
};

struct TwoChannelExperiment {
  std::pair<std::size_t, std::size_t> best_split;
  std::pair<double, double> predicted_split;
  std::vector<SplitMse> mse_table;
};

/// Two channels of N(0, alpha_i^2) and N(0, alpha_j^2) samples, each clipped to
/// its own +-alpha and midpoint-quantized. Every integer split of `quota` bins
/// is measured; the best one is reported next to allocate_bins' prediction.
inline TwoChannelExperiment two_channel_bin_experiment(double alpha_i, double alpha_j,
                                                       std::size_t quota, std::size_t n,
                                                       std::uint64_t seed) {
  detail::require(quota >= 4, "bin quota must be at least 4");
  detail::require(alpha_i > 0.0 && alpha_j > 0.0, "channel ranges must be positive");
  detail::require(n >= 1, "sample count must be at least 1");
  const auto xi = sample(DistributionModel::gaussian(alpha_i), n, seed);
  const auto xj = sample(DistributionModel::gaussian(alpha_j), n, seed + 1);

  TwoChannelExperiment out;
  const std::vector<double> alphas{alpha_i, alpha_j};
  const auto predicted = allocate_bins(alphas, static_cast<double>(quota));
  out.predicted_split = {predicted[0], predicted[1]};

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t bi = 1; bi < quota; ++bi) {
    const std::size_t bj = quota - bi;
    const double m = empirical_mse(xi, make_grid_with_bins(alpha_i, bi, GridMode::kSymmetric)) +
                     empirical_mse(xj, make_grid_with_bins(alpha_j, bj, GridMode::kSymmetric));
    out.mse_table.push_back({bi, bj, m});
    if (m < best) {
      best = m;
      out.best_split = {bi, bj};
    }
  }
  return out;
}

inline constexpr std::size_t kMaxBruteForceChannels = 4;

/// Exhaustive integer split of `quota` bins (each channel >= 1) minimizing
/// allocation_mse. Exponential in the channel count.
inline std::vector<std::size_t> brute_force_bin_allocation(std::span<const double> alphas,
                                                           std::size_t quota, double b) {
  detail::require(!alphas.empty(), "no channels to allocate");
  detail::require(alphas.size() <= kMaxBruteForceChannels, "too many channels for brute force");
  detail::require(quota >= alphas.size(), "quota smaller than channel count");
  const std::size_t k = alphas.size();
  std::vector<std::size_t> current(k, 1);
  std::vector<std::size_t> best;
  double best_mse = std::numeric_limits<double>::infinity();
  std::vector<double> bins(k);

  // Enumerate compositions of quota into k positive parts in lexicographic order.
  auto recurse = [&](auto&& self, std::size_t idx, std::size_t remaining) -> void {
    if (idx + 1 == k) {
      current[idx] = remaining;
      for (std::size_t i = 0; i < k; ++i) bins[i] = static_cast<double>(current[i]);
      const double m = allocation_mse(alphas, bins, b);
      if (m < best_mse) {
        best_mse = m;
        best = current;
      }
      return;
    }
    for (std::size_t v = 1; v + (k - idx - 1) <= remaining; ++v) {
      current[idx] = v;
      self(self, idx + 1, remaining - v);
    }
  };
  recurse(recurse, 0, quota);
  return best;
}

/// Laplace-distributed channels with per-channel scales drawn log-uniformly
/// from [scale_lo, scale_hi]. Shape is {channels, per_channel}, channel axis 0.
inline ChannelTensor synthetic_laplace_tensor(std::size_t channels, std::size_t per_channel,
                                              double scale_lo, double scale_hi, std::uint64_t seed) {
  detail::require(channels >= 1 && per_channel >= 1, "tensor dimensions must be positive");
  detail::require(scale_lo > 0.0 && scale_hi >= scale_lo, "invalid scale range");
  Rng rng(seed);
  std::vector<double> data;
  data.reserve(channels * per_channel);
  for (std::size_t c = 0; c < channels; ++c) {
    const double scale = std::exp(std::log(scale_lo) + rng.uniform() * (std::log(scale_hi) - std::log(scale_lo)));
    for (std::size_t i = 0; i < per_channel; ++i) data.push_back(scale * rng.laplace());
  }
  return ChannelTensor({channels, per_channel}, 0, std::move(data));
}

}  // namespace aciq
