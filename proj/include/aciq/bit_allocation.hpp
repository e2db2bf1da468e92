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
#include <numbers>
#include <span>
#include <vector>

#include "aciq/error.hpp"
#include "aciq/quantizer.hpp"

// Per-channel bin allocation under a layer-wide bin quota B.
//
// Minimizing sum_i [clip_i + alpha_i^2 / (3 B_i^2)] subject to sum_i B_i = B
// gives equal marginal costs 2 ln2 alpha_i^2 / (3 B_i^3) across channels, i.e.
//   B_i* = B * alpha_i^(2/3) / sum_j alpha_j^(2/3),
// and bit-widths M_i = round(log2 B_i*).

namespace aciq {

/// Fractional optimal bins per channel. Zero-range channels get zero bins.
inline std::vector<double> allocate_bins(std::span<const double> alphas, double quota) {
  detail::require(!alphas.empty(), "no channels to allocate");
  detail::require(std::isfinite(quota) && quota > 0.0, "bin quota must be positive");
  std::vector<double> weights(alphas.size());
  double total = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    detail::require(std::isfinite(alphas[i]) && alphas[i] >= 0.0,
                    "channel ranges must be finite and non-negative");
    weights[i] = std::cbrt(alphas[i] * alphas[i]);
    total += weights[i];
  }
  detail::require(total > 0.0, "degenerate layer", ErrorCode::kDegenerate);
  for (auto& w : weights) w = quota * w / total;
  return weights;
}

struct BitAllocationOptions {
  int min_bits = 1;
  int max_bits = 8;
  // Greedily take bits back until sum 2^M_i <= quota. Off by default: plain
  // per-channel rounding may overshoot the quota.
  bool repair_quota = false;
};

struct BitAllocation {
  double quota_bins = 0.0;
  std::vector<double> fractional_bins;
  std::vector<int> bits;
  std::vector<double> alphas;

  double used_bins() const {
    double used = 0.0;
    for (int m : bits) used += std::ldexp(1.0, m);
    return used;
  }
  // (sum 2^M_i - B) / B; positive when the rounded allocation overshoots.
  double quota_drift() const { return (used_bins() - quota_bins) / quota_bins; }
};

/// Marginal MSE cost 2 ln2 alpha_i^2 / (3 B_i^3) of each channel. All entries
/// are equal at the optimal fractional allocation (they equal the Lagrange
/// multiplier of the quota constraint).
inline std::vector<double> marginal_costs(std::span<const double> alphas,
                                          std::span<const double> bins) {
  detail::require(alphas.size() == bins.size(), "alphas and bins differ in length");
  std::vector<double> out(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    detail::require(bins[i] > 0.0, "bins must be positive");
    out[i] = 2.0 * std::numbers::ln2 * alphas[i] * alphas[i] / (3.0 * bins[i] * bins[i] * bins[i]);
  }
  return out;
}

namespace detail {

inline void repair_quota(BitAllocation& alloc, int min_bits) {
  auto rounding_cost = [&](std::size_t i, int m) {
    return alloc.alphas[i] * alloc.alphas[i] / (3.0 * std::ldexp(1.0, 2 * m));
  };
  while (alloc.used_bins() > alloc.quota_bins) {
    std::size_t best = alloc.bits.size();
    double best_increase = 0.0;
    for (std::size_t i = 0; i < alloc.bits.size(); ++i) {
      if (alloc.bits[i] <= min_bits) continue;
      const double increase =
          rounding_cost(i, alloc.bits[i] - 1) - rounding_cost(i, alloc.bits[i]);
      if (best == alloc.bits.size() || increase < best_increase) {
        best = i;
        best_increase = increase;
      }
    }
    if (best == alloc.bits.size()) break;  // every channel already at min_bits
    --alloc.bits[best];
  }
}

}  // namespace detail

/// Integer bit-widths for `alphas.size()` channels averaging `avg_bits`
/// (quota B = channels * 2^avg_bits).
inline BitAllocation allocate_bits(std::span<const double> alphas, int avg_bits,
                                   const BitAllocationOptions& options = {}) {
  detail::require(avg_bits >= kMinBits && avg_bits <= kMaxBits, "bit-width must be in [1, 16]");
  detail::require(options.min_bits >= kMinBits && options.max_bits <= kMaxBits &&
                      options.min_bits <= options.max_bits,
                  "invalid bit clamp range");
  BitAllocation alloc;
  alloc.alphas.assign(alphas.begin(), alphas.end());
  alloc.quota_bins = static_cast<double>(alphas.size()) * std::ldexp(1.0, avg_bits);
  alloc.fractional_bins = allocate_bins(alphas, alloc.quota_bins);
  alloc.bits.resize(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alloc.fractional_bins[i] <= 0.0) {
      alloc.bits[i] = options.min_bits;
      continue;
    }
    const int m = static_cast<int>(std::lround(std::log2(alloc.fractional_bins[i])));
    alloc.bits[i] = std::clamp(m, options.min_bits, options.max_bits);
  }
  if (options.repair_quota) detail::repair_quota(alloc, options.min_bits);
  return alloc;
}

/// Layer objective with a shared Laplace b:
/// sum_i [2 b^2 e^{-alpha_i/b} + alpha_i^2 / (3 bins_i^2)].
inline double allocation_mse(std::span<const double> alphas, std::span<const double> bins,
                             double b) {
  detail::require(alphas.size() == bins.size(), "alphas and bins differ in length");
  detail::require(b > 0.0, "laplace scale must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    detail::require(bins[i] > 0.0, "bins must be positive");
    total += 2.0 * b * b * std::exp(-alphas[i] / b) + alphas[i] * alphas[i] / (3.0 * bins[i] * bins[i]);
  }
  return total;
}

/// Same objective with a per-channel Laplace scale.
inline double allocation_mse(std::span<const double> alphas, std::span<const double> bins,
                             std::span<const double> scales) {
  detail::require(scales.size() == alphas.size() && bins.size() == alphas.size(),
                  "scales, bins and alphas differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i)
    total += allocation_mse(alphas.subspan(i, 1), bins.subspan(i, 1), scales[i]);
  return total;
}

}  // namespace aciq
