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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "aciq/analytic.hpp"
#include "aciq/bias_correction.hpp"
#include "aciq/bit_allocation.hpp"
#include "aciq/distributions.hpp"
#include "aciq/error.hpp"
#include "aciq/kld.hpp"
#include "aciq/quantizer.hpp"

// Tensor-level pipelines combining the four methods.
//
//   activations: [bit allocation] -> ACIQ clipping or min/max -> quantize
//   weights:     [bit allocation] -> min/max quantize -> [bias correction]
//
// ACIQ is only meaningful for activations and bias correction only for
// weights; a flag that does not apply to the chosen role is ignored.

namespace aciq {

enum class Method : unsigned {
  kAciq = 1u,
  kBitAllocWeights = 2u,
  kBitAllocActivations = 4u,
  kBiasCorrection = 8u,
};

inline constexpr Method kAllMethods[] = {Method::kAciq, Method::kBitAllocWeights,
                                         Method::kBitAllocActivations, Method::kBiasCorrection};

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kAciq: return "aciq";
    case Method::kBitAllocWeights: return "bit_alloc_w";
    case Method::kBitAllocActivations: return "bit_alloc_a";
    case Method::kBiasCorrection: return "bias_corr";
  }
  return "?";
}

class MethodSet {
 public:
  constexpr MethodSet() = default;
  constexpr explicit MethodSet(unsigned mask) : mask_(mask & 0xFu) {}

  static constexpr MethodSet all() { return MethodSet(0xFu); }

  /// Comma-separated method names; "" and "none" give the empty set.
  static MethodSet parse(std::string_view text) {
    MethodSet set;
    std::string token;
    std::stringstream ss{std::string(text)};
    while (std::getline(ss, token, ',')) {
      if (token.empty() || token == "none") continue;
      if (token == "all") return all();
      bool found = false;
      for (Method m : kAllMethods) {
        if (token == to_string(m)) {
          set = set.with(m);
          found = true;
        }
      }
      detail::require(found, "unknown method name");
    }
    return set;
  }

  constexpr unsigned mask() const { return mask_; }
  constexpr bool has(Method m) const { return (mask_ & static_cast<unsigned>(m)) != 0; }
  constexpr MethodSet with(Method m) const { return MethodSet(mask_ | static_cast<unsigned>(m)); }
  constexpr bool operator==(const MethodSet&) const = default;

  std::string name() const {
    std::string out;
    for (Method m : kAllMethods) {
      if (!has(m)) continue;
      if (!out.empty()) out += '+';
      out += to_string(m);
    }
    return out.empty() ? "none" : out;
  }

 private:
  unsigned mask_ = 0;
};

enum class Role { kWeights, kActivations };

inline const char* to_string(Role role) { return role == Role::kWeights ? "weights" : "activations"; }

inline constexpr std::uint64_t kDefaultSeed = 42;

struct PipelineConfig {
  MethodSet methods;
  int weight_bits = 4;
  int activation_bits = 4;
  Family family = Family::kLaplace;
  ClipMode mode = ClipMode::kSymmetric;
  std::uint64_t seed = kDefaultSeed;
  BitAllocationOptions allocation;

  void validate() const {
    detail::require(weight_bits >= kMinBits && weight_bits <= kMaxBits, "weight bits must be in [1, 16]");
    detail::require(activation_bits >= kMinBits && activation_bits <= kMaxBits,
                    "activation bits must be in [1, 16]");
  }
};

struct ChannelReport {
  std::size_t channel = 0;
  int bits = 0;
  double alpha = 0.0;  // clipping value (ACIQ) or max |x| (min/max)
  double mu = 0.0;
  double xi = 1.0;
  double mse = 0.0;
  std::size_t count = 0;
  bool passthrough = false;
};

struct QuantizeReport {
  Role role = Role::kWeights;
  PipelineConfig config;
  std::vector<ChannelReport> channels;
  double total_mse = 0.0;  // element-weighted mean of the channel MSEs
  double quota_bins = 0.0;
  double used_bins = 0.0;
  std::vector<std::string> warnings;

  double per_channel_mean_mse() const {
    double sum = 0.0;
    for (const auto& c : channels) sum += c.mse;
    return channels.empty() ? 0.0 : sum / static_cast<double>(channels.size());
  }
};

struct QuantizeResult {
  ChannelTensor output;
  QuantizeReport report;
};

namespace detail {

inline double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

// Scale of the channel's prior. After a fused ReLU the data is read as the
// positive half of a zero-centered prior: Laplace b is the mean of the
// positive values, Gaussian sigma their root mean square.
inline double channel_scale(std::span<const double> values, Family family, ClipMode mode) {
  if (mode == ClipMode::kSymmetric) {
    if (family == Family::kGaussian && values.size() < 2) return 0.0;
    return estimate_scale(family, values);
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (v <= 0.0) continue;
    sum += family == Family::kLaplace ? v : v * v;
    ++n;
  }
  if (n == 0) return 0.0;
  const double m = sum / static_cast<double>(n);
  return family == Family::kLaplace ? m : std::sqrt(m);
}

inline double aciq_alpha(std::span<const double> values, Family family, ClipMode mode, int bits) {
  const double scale = channel_scale(values, family, mode);
  if (!(scale > 0.0)) return 0.0;
  return optimal_alpha(AciqSetting(DistributionModel(family, scale), bits, mode));
}

inline std::vector<int> channel_bits(const ChannelTensor& t, const std::vector<double>& alphas, int avg_bits,
                                     bool allocate, const BitAllocationOptions& options,
                                     QuantizeReport& report) {
  const std::size_t channels = t.channel_count();
  report.quota_bins = static_cast<double>(channels) * std::ldexp(1.0, avg_bits);
  std::vector<int> bits(channels, avg_bits);
  if (allocate) {
    const bool degenerate = std::all_of(alphas.begin(), alphas.end(), [](double a) { return a <= 0.0; });
    if (degenerate) {
      report.warnings.push_back("all channels are constant; bit allocation keeps uniform bits");
    } else {
      bits = allocate_bits(alphas, avg_bits, options).bits;
    }
  }
  report.used_bins = 0.0;
  for (int m : bits) report.used_bins += std::ldexp(1.0, m);
  return bits;
}

inline void finish_report(const ChannelTensor& input, const ChannelTensor& output, QuantizeReport& report) {
  double weighted = 0.0;
  std::size_t total = 0;
  for (std::size_t c = 0; c < input.channel_count(); ++c) {
    auto& ch = report.channels[c];
    ch.channel = c;
    ch.count = input.channel_size();
    ch.mse = mse_between(input.channel(c), output.channel(c));
    weighted += ch.mse * static_cast<double>(ch.count);
    total += ch.count;
  }
  report.total_mse = weighted / static_cast<double>(total);
}

inline QuantizeResult quantize_activations(const ChannelTensor& input, const PipelineConfig& config) {
  QuantizeReport report;
  report.role = Role::kActivations;
  report.config = config;
  const std::size_t channels = input.channel_count();
  report.channels.resize(channels);
  if (config.methods.has(Method::kBiasCorrection))
    report.warnings.push_back("bias_corr applies to weights only; ignored for activations");
  if (config.methods.has(Method::kBitAllocWeights))
    report.warnings.push_back("bit_alloc_w applies to weights only; ignored for activations");

  const bool use_aciq = config.methods.has(Method::kAciq);
  const bool allocate = config.methods.has(Method::kBitAllocActivations);

  std::vector<double> alloc_alphas(channels);
  if (allocate) {
    for (std::size_t c = 0; c < channels; ++c) {
      alloc_alphas[c] = use_aciq ? aciq_alpha(input.channel(c), config.family, config.mode, config.activation_bits)
                                 : max_abs(input.channel(c));
    }
  }
  const auto bits = channel_bits(input, alloc_alphas, config.activation_bits, allocate, config.allocation, report);

  std::vector<double> out(input.data());
  ChannelTensor output = input.with_data(std::move(out));
  for (std::size_t c = 0; c < channels; ++c) {
    auto& ch = report.channels[c];
    ch.bits = bits[c];
    const auto x = input.channel(c);
    auto y = output.channel(c);
    if (use_aciq) {
      const double scale = channel_scale(x, config.family, config.mode);
      if (!(scale > 0.0)) {
        ch.passthrough = true;
        report.warnings.push_back("channel " + std::to_string(c) +
                                  " has zero spread; ACIQ falls back to pass-through");
        continue;
      }
      const AciqSetting setting(DistributionModel(config.family, scale), bits[c], config.mode);
      ch.alpha = optimal_alpha(setting);
      const QuantGrid grid = make_grid(ch.alpha, bits[c], grid_mode(config.mode));
      if (config.mode == ClipMode::kSymmetric) {
        const double mean = mean_of(x);
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = mean + quantize(x[i] - mean, grid);
      } else {
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = fused_relu_quantize(x[i], grid);
      }
    } else {
      ch.alpha = max_abs(x);
      const auto q = quantize_minmax_channel(x, bits[c]);
      std::copy(q.values.begin(), q.values.end(), y.begin());
    }
  }
  finish_report(input, output, report);
  return {std::move(output), std::move(report)};
}

inline QuantizeResult quantize_weights(const ChannelTensor& input, const PipelineConfig& config) {
  QuantizeReport report;
  report.role = Role::kWeights;
  report.config = config;
  const std::size_t channels = input.channel_count();
  report.channels.resize(channels);
  if (config.methods.has(Method::kAciq))
    report.warnings.push_back("aciq applies to activations only; ignored for weights");
  if (config.methods.has(Method::kBitAllocActivations))
    report.warnings.push_back("bit_alloc_a applies to activations only; ignored for weights");

  const bool allocate = config.methods.has(Method::kBitAllocWeights);
  std::vector<double> alphas(channels);
  for (std::size_t c = 0; c < channels; ++c) alphas[c] = max_abs(input.channel(c));
  const auto bits = channel_bits(input, alphas, config.weight_bits, allocate, config.allocation, report);

  std::vector<double> out(input.size());
  for (std::size_t c = 0; c < channels; ++c) {
    report.channels[c].bits = bits[c];
    report.channels[c].alpha = alphas[c];
    const auto q = quantize_minmax_channel(input.channel(c), bits[c]);
    std::copy(q.values.begin(), q.values.end(), out.begin() + static_cast<std::ptrdiff_t>(c * input.channel_size()));
  }
  ChannelTensor output = input.with_data(std::move(out));
  if (config.methods.has(Method::kBiasCorrection)) {
    const auto terms = correction_terms(input, output);
    output = apply_correction(output, terms);
    for (std::size_t c = 0; c < channels; ++c) {
      report.channels[c].mu = terms.mu[c];
      report.channels[c].xi = terms.xi[c];
    }
  }
  finish_report(input, output, report);
  return {std::move(output), std::move(report)};
}

}  // namespace detail

inline QuantizeResult quantize_tensor(const ChannelTensor& input, const PipelineConfig& config, Role role) {
  config.validate();
  return role == Role::kWeights ? detail::quantize_weights(input, config)
                                : detail::quantize_activations(input, config);
}

struct CompareRow {
  MethodSet methods;
  double weights_mse = 0.0;
  double activations_mse = 0.0;
  double total_mse = 0.0;            // weights_mse + activations_mse
  double per_channel_mean_mse = 0.0;  // mean over channels of (weights + activations) MSE
};

/// Combinations to evaluate: every subset of `enabled`, in binary counting
/// order over (aciq, bit_alloc_w, bit_alloc_a, bias_corr).
inline std::vector<MethodSet> method_combinations(MethodSet enabled) {
  std::vector<MethodSet> out;
  for (unsigned mask = 0; mask < 16; ++mask)
    if ((mask & ~enabled.mask()) == 0) out.emplace_back(mask);
  return out;
}

/// Quantizes `input` once as weights and once as activations for each
/// combination and tabulates the resulting MSEs.
inline std::vector<CompareRow> compare_methods(const ChannelTensor& input, const PipelineConfig& base,
                                               const std::vector<MethodSet>& combinations) {
  std::vector<CompareRow> rows;
  for (const auto& combo : combinations) {
    PipelineConfig config = base;
    config.methods = combo;
    const auto w = quantize_tensor(input, config, Role::kWeights).report;
    const auto a = quantize_tensor(input, config, Role::kActivations).report;
    CompareRow row;
    row.methods = combo;
    row.weights_mse = w.total_mse;
    row.activations_mse = a.total_mse;
    row.total_mse = w.total_mse + a.total_mse;
    double sum = 0.0;
    for (std::size_t c = 0; c < w.channels.size(); ++c) sum += w.channels[c].mse + a.channels[c].mse;
    row.per_channel_mean_mse = sum / static_cast<double>(w.channels.size());
    rows.push_back(row);
  }
  return rows;
}

struct KldCompareRow {
  std::string method;  // aciq | kld | naive
  double threshold = 0.0;
  double mse = 0.0;
  double micros = 0.0;  // calibration wall-clock, best of the repeats
};

/// Per-tensor calibration head-to-head on zero-centered samples: ACIQ from the
/// estimated scale, KLD histogram search, and the naive max |x| threshold.
/// Each threshold is scored with the symmetric midpoint quantizer.
inline std::vector<KldCompareRow> kld_compare(std::span<const double> samples, int bits, Family family,
                                              std::size_t n_bins = kDefaultHistogramBins, int repeats = 3) {
  detail::require(!samples.empty(), "empty tensor");
  detail::require(repeats >= 1, "repeats must be positive");
  using clock = std::chrono::steady_clock;
  auto timed = [&](auto&& calibrate, double& threshold) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < repeats; ++r) {
      const auto start = clock::now();
      threshold = calibrate();
      const std::chrono::duration<double, std::micro> took = clock::now() - start;
      best = std::min(best, took.count());
    }
    return best;
  };

  std::vector<KldCompareRow> rows(3);
  rows[0].method = "aciq";
  rows[0].micros = timed(
      [&] {
        const double scale = estimate_scale(family, samples);
        detail::require(scale > 0.0, "tensor has zero spread", ErrorCode::kDegenerate);
        return optimal_alpha(AciqSetting(DistributionModel(family, scale), bits));
      },
      rows[0].threshold);
  rows[1].method = "kld";
  rows[1].micros = timed([&] { return kld_threshold(build_histogram(samples, n_bins), bits); }, rows[1].threshold);
  rows[2].method = "naive";
  rows[2].micros = timed([&] { return detail::max_abs(samples); }, rows[2].threshold);

  for (auto& row : rows) {
    detail::require(row.threshold > 0.0, "tensor has zero spread", ErrorCode::kDegenerate);
    row.mse = empirical_mse(samples, make_grid(row.threshold, bits, GridMode::kSymmetric));
  }
  return rows;
}

}  // namespace aciq
