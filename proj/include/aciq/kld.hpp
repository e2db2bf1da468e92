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
#include <vector>

#include "aciq/error.hpp"

// Histogram/KL-divergence threshold search: the usual calibration baseline
// that ACIQ is compared against. Thresholds are symmetric, so the histogram
// is built over magnitudes |x|.

namespace aciq {

inline constexpr std::size_t kDefaultHistogramBins = 2048;

struct Histogram {
  std::vector<double> edges;          // n + 1 ascending edges
  std::vector<std::uint64_t> counts;  // n counts

  std::size_t bin_count() const { return counts.size(); }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

/// Equal-width histogram of |x| over [0, upper]. Values above `upper` land in
/// the last bin.
inline Histogram build_histogram(std::span<const double> samples, std::size_t n_bins,
                                 double upper) {
  detail::require(!samples.empty(), "empty tensor");
  detail::require(n_bins >= 1, "histogram needs at least one bin");
  detail::require(std::isfinite(upper) && upper > 0.0, "histogram range is degenerate",
                  ErrorCode::kDegenerate);
  Histogram h;
  h.edges.resize(n_bins + 1);
  const double width = upper / static_cast<double>(n_bins);
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = width * static_cast<double>(i);
  h.edges.back() = upper;
  h.counts.assign(n_bins, 0);
  for (double x : samples) {
    const double pos = std::floor(std::abs(x) / width);
    const auto bin = pos >= static_cast<double>(n_bins) ? n_bins - 1 : static_cast<std::size_t>(pos);
    ++h.counts[bin];
  }
  return h;
}

/// Histogram of |x| over [0, max |x|].
inline Histogram build_histogram(std::span<const double> samples,
                                 std::size_t n_bins = kDefaultHistogramBins) {
  detail::require(!samples.empty(), "empty tensor");
  double upper = 0.0;
  for (double x : samples) upper = std::max(upper, std::abs(x));
  return build_histogram(samples, n_bins, upper);
}

/// KL(P || Q) of two unnormalized non-negative vectors; bins with p = 0
/// contribute nothing. Returns +inf if some p > 0 meets q = 0.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  detail::require(p.size() == q.size(), "distribution length mismatch");
  double sum_p = 0.0;
  double sum_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum_p += p[i];
    sum_q += q[i];
  }
  detail::require(sum_p > 0.0 && sum_q > 0.0, "empty distribution", ErrorCode::kDegenerate);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    const double pn = p[i] / sum_p;
    const double qn = q[i] / sum_q;
    kl += pn * std::log(pn / qn);
  }
  return std::max(kl, 0.0);
}

struct KldSearch {
  double threshold = 0.0;
  std::size_t bin = 0;  // truncation index; threshold == edges[bin]
  double divergence = 0.0;
};

namespace detail {

// Reference distribution for truncation at `cut`: the first `cut` bins with
// all outlier mass folded into bin cut - 1.
inline std::vector<double> reference_distribution(const Histogram& hist, std::size_t cut) {
  std::vector<double> p(hist.counts.begin(), hist.counts.begin() + static_cast<std::ptrdiff_t>(cut));
  for (std::size_t i = cut; i < hist.counts.size(); ++i) p[cut - 1] += static_cast<double>(hist.counts[i]);
  return p;
}

// The truncated histogram (outliers dropped, not folded) merged into `levels`
// groups, the last group taking the remainder, then spread back evenly over
// the non-empty bins of each group. Leaving the outliers out is what makes
// short truncations expensive: P carries their mass in its last bin, Q does
// not.
inline std::vector<double> expanded_quantized(std::span<const double> p, std::size_t levels) {
  const std::size_t per_level = p.size() / levels;
  std::vector<double> q(p.size(), 0.0);
  for (std::size_t g = 0; g < levels; ++g) {
    const std::size_t begin = g * per_level;
    const std::size_t end = g + 1 == levels ? p.size() : begin + per_level;
    double mass = 0.0;
    std::size_t nonempty = 0;
    for (std::size_t i = begin; i < end; ++i) {
      mass += p[i];
      if (p[i] > 0.0) ++nonempty;
    }
    if (nonempty == 0) continue;
    const double share = mass / static_cast<double>(nonempty);
    for (std::size_t i = begin; i < end; ++i)
      if (p[i] > 0.0) q[i] = share;
  }
  return q;
}

}  // namespace detail

/// Scans truncation points from 2^bits to n_bins and returns the edge whose
/// reference distribution is closest (in KL) to its 2^bits-level
/// quantization. Ties go to the smaller threshold.
inline KldSearch kld_search(const Histogram& hist, int bits) {
  detail::require(bits >= 1 && bits < 31, "bit-width out of range");
  const std::size_t levels = std::size_t{1} << bits;
  const std::size_t n = hist.bin_count();
  detail::require(n >= levels, "histogram has fewer bins than quantization levels");
  detail::require(hist.edges.size() == n + 1, "histogram edges do not match counts");
  detail::require(hist.total() >= 1, "empty histogram", ErrorCode::kDegenerate);

  KldSearch best;
  best.divergence = std::numeric_limits<double>::infinity();
  for (std::size_t cut = levels; cut <= n; ++cut) {
    const auto p = detail::reference_distribution(hist, cut);
    const std::vector<double> sliced(hist.counts.begin(), hist.counts.begin() + static_cast<std::ptrdiff_t>(cut));
    if (std::all_of(sliced.begin(), sliced.end(), [](double c) { return c <= 0.0; })) continue;
    const auto q = detail::expanded_quantized(sliced, levels);
    const double kl = kl_divergence(p, q);
    if (kl < best.divergence || best.bin == 0) {
      best.divergence = kl;
      best.bin = cut;
      best.threshold = hist.edges[cut];
    }
  }
  return best;
}

inline double kld_threshold(const Histogram& hist, int bits) { return kld_search(hist, bits).threshold; }

}  // namespace aciq
