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
#include <functional>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "aciq/error.hpp"

namespace aciq {

inline constexpr int kMinBits = 1;
inline constexpr int kMaxBits = 16;

/// Saturates x to [-alpha, alpha]. The boundary itself passes through.
inline double clip(double x, double alpha) {
  detail::require(alpha > 0.0, "clipping value must be positive");
  if (std::abs(x) <= alpha) return x;
  return x < 0.0 ? -alpha : alpha;
}

enum class GridMode {
  kSymmetric,  // range [-alpha, alpha]
  kUnsigned,   // range [0, alpha], used after a fused ReLU
};

/// Geometry of the uniform midpoint quantizer.
///
/// The range is cut into `bin_count()` equal bins of width `delta()`, and every
/// value in a bin is reconstructed as the bin's midpoint. Bins are half-open
/// [low, high) except the last one, which also owns the top of the range.
class QuantGrid {
 public:
  double alpha() const { return alpha_; }
  GridMode mode() const { return mode_; }
  // Bits needed to index the bins; equals M for grids from make_grid.
  int bits() const { return bits_; }
  std::size_t bin_count() const { return midpoints_.size(); }
  double delta() const { return delta_; }
  double low() const { return low_; }
  double high() const { return alpha_; }
  const std::vector<double>& midpoints() const { return midpoints_; }

  std::size_t bin_index(double x) const {
    const double clamped = std::clamp(x, low_, alpha_);
    const double pos = std::floor((clamped - low_) / delta_);
    const std::size_t last = midpoints_.size() - 1;
    std::size_t bin = pos > 0.0 ? std::min(static_cast<std::size_t>(pos), last) : 0;
    // The subtraction above can round across an edge; settle against the
    // edges low + k * delta themselves.
    while (bin > 0 && clamped < edge(bin)) --bin;
    while (bin < last && clamped >= edge(bin + 1)) ++bin;
    return bin;
  }

  friend QuantGrid make_grid_with_bins(double alpha, std::size_t bins, GridMode mode);

 private:
  QuantGrid() = default;

  double edge(std::size_t k) const { return low_ + static_cast<double>(k) * delta_; }

  double alpha_ = 1.0;
  GridMode mode_ = GridMode::kSymmetric;
  int bits_ = 0;
  double delta_ = 0.0;
  double low_ = 0.0;
  std::vector<double> midpoints_;
};

/// Grid with an arbitrary number of bins (not necessarily a power of two).
inline QuantGrid make_grid_with_bins(double alpha, std::size_t bins, GridMode mode) {
  detail::require(std::isfinite(alpha) && alpha > 0.0, "clipping value must be positive");
  detail::require(bins >= 1 && bins <= (std::size_t{1} << kMaxBits), "bin count out of range");
  QuantGrid g;
  g.alpha_ = alpha;
  g.mode_ = mode;
  g.bits_ = 0;
  while ((std::size_t{1} << g.bits_) < bins) ++g.bits_;
  const double width = mode == GridMode::kSymmetric ? 2.0 * alpha : alpha;
  g.low_ = mode == GridMode::kSymmetric ? -alpha : 0.0;
  g.delta_ = width / static_cast<double>(bins);
  g.midpoints_.resize(bins);
  for (std::size_t i = 0; i < bins; ++i)
    g.midpoints_[i] = g.low_ + static_cast<double>(2 * i + 1) * g.delta_ / 2.0;
  return g;
}

/// 2^bits bins over [-alpha, alpha] (delta = 2 alpha / 2^M) or [0, alpha]
/// (delta = alpha / 2^M).
inline QuantGrid make_grid(double alpha, int bits, GridMode mode) {
  detail::require(bits >= kMinBits && bits <= kMaxBits, "bit-width must be in [1, 16]");
  return make_grid_with_bins(alpha, std::size_t{1} << bits, mode);
}

/// Midpoint of the bin holding x; out-of-range values are clipped first.
inline double quantize(double x, const QuantGrid& grid) {
  return grid.midpoints()[grid.bin_index(x)];
}

/// Fused convolution + ReLU: non-positive pre-activations come out as an
/// exact zero, positive ones go through the midpoint quantizer on [0, alpha].
inline double fused_relu_quantize(double x, const QuantGrid& grid) {
  detail::require(grid.mode() == GridMode::kUnsigned, "fused ReLU needs an unsigned grid");
  return x <= 0.0 ? 0.0 : quantize(x, grid);
}

inline double empirical_mse(std::span<const double> samples, const QuantGrid& grid) {
  detail::require(!samples.empty(), "empty tensor");
  double sum = 0.0;
  for (double x : samples) {
    const double e = x - quantize(x, grid);
    sum += e * e;
  }
  return sum / static_cast<double>(samples.size());
}

/// Mean of (max(0, x) - fused_relu_quantize(x))^2.
inline double empirical_mse_fused_relu(std::span<const double> samples, const QuantGrid& grid) {
  detail::require(!samples.empty(), "empty tensor");
  double sum = 0.0;
  for (double x : samples) {
    const double e = std::max(0.0, x) - fused_relu_quantize(x, grid);
    sum += e * e;
  }
  return sum / static_cast<double>(samples.size());
}

/// Real-valued tensor stored channel-major: channel c owns the contiguous
/// slice [c * channel_size(), (c + 1) * channel_size()) of `data()`.
/// `channel_axis` records which axis of `shape` is the channel axis.
class ChannelTensor {
 public:
  ChannelTensor(std::vector<std::size_t> shape, std::size_t channel_axis, std::vector<double> data)
      : shape_(std::move(shape)), channel_axis_(channel_axis), data_(std::move(data)) {
    detail::require(!shape_.empty(), "tensor shape must not be empty");
    detail::require(channel_axis_ < shape_.size(), "channel axis out of range");
    for (auto d : shape_) detail::require(d >= 1, "tensor dimensions must be positive");
    const auto count = std::accumulate(shape_.begin(), shape_.end(), std::size_t{1},
                                       std::multiplies<>());
    detail::require(count == data_.size(), "shape does not match data length");
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t channel_axis() const { return channel_axis_; }
  const std::vector<double>& data() const { return data_; }
  std::size_t size() const { return data_.size(); }

  std::size_t channel_count() const { return shape_[channel_axis_]; }
  std::size_t channel_size() const { return data_.size() / channel_count(); }

  std::span<const double> channel(std::size_t c) const {
    return std::span<const double>(data_).subspan(c * channel_size(), channel_size());
  }
  std::span<double> channel(std::size_t c) {
    return std::span<double>(data_).subspan(c * channel_size(), channel_size());
  }

  // Same geometry, different values.
  ChannelTensor with_data(std::vector<double> data) const {
    return ChannelTensor(shape_, channel_axis_, std::move(data));
  }

  bool same_shape(const ChannelTensor& other) const {
    return shape_ == other.shape_ && channel_axis_ == other.channel_axis_;
  }

 private:
  std::vector<std::size_t> shape_;
  std::size_t channel_axis_;
  std::vector<double> data_;
};

/// Output of the min/max baseline: reconstruction = scale * code + offset.
struct MinMaxQuantized {
  std::vector<double> values;
  double scale = 0.0;   // 0 marks a constant channel
  double offset = 0.0;  // channel minimum
};

/// GEMMLOWP-style baseline: 2^bits evenly spaced levels from min to max,
/// round to nearest level. No clipping.
inline MinMaxQuantized quantize_minmax_channel(std::span<const double> channel, int bits) {
  detail::require(!channel.empty(), "empty channel");
  detail::require(bits >= kMinBits && bits <= kMaxBits, "bit-width must be in [1, 16]");
  const auto [lo_it, hi_it] = std::minmax_element(channel.begin(), channel.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  MinMaxQuantized out;
  out.offset = lo;
  if (hi == lo) {
    out.values.assign(channel.begin(), channel.end());
    return out;
  }
  const double max_code = static_cast<double>((1 << bits) - 1);
  out.scale = (hi - lo) / max_code;
  out.values.reserve(channel.size());
  for (double x : channel) {
    const double code = std::clamp(std::round((x - lo) / out.scale), 0.0, max_code);
    out.values.push_back(out.scale * code + out.offset);
  }
  return out;
}

inline double mse_between(std::span<const double> a, std::span<const double> b) {
  detail::require(a.size() == b.size() && !a.empty(), "length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

}  // namespace aciq
