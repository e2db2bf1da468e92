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

#include <array>
#include <cmath>
#include <numbers>

#include "aciq/bisect.hpp"
#include "aciq/distributions.hpp"
#include "aciq/erf.hpp"
#include "aciq/error.hpp"
#include "aciq/quantizer.hpp"

// Closed-form expected MSE of clipping + uniform midpoint quantization for
// Laplace and Gaussian priors, and the solver for the MSE-optimal clipping
// value. Every formula assumes a prior centered at zero; callers subtract the
// mean first.

namespace aciq {

enum class ClipMode {
  kSymmetric,  // quantize [-alpha, alpha]
  kFusedRelu,  // quantize max(0, x) over [0, alpha]
};

inline const char* to_string(ClipMode mode) {
  return mode == ClipMode::kSymmetric ? "symmetric" : "relu";
}

inline GridMode grid_mode(ClipMode mode) {
  return mode == ClipMode::kSymmetric ? GridMode::kSymmetric : GridMode::kUnsigned;
}

/// A prior, a bit-width and a quantizer mode: everything the closed forms need.
class AciqSetting {
 public:
  AciqSetting(DistributionModel model, int bits, ClipMode mode = ClipMode::kSymmetric)
      : model_(model), bits_(bits), mode_(mode) {
    detail::require(bits >= kMinBits && bits <= kMaxBits, "bit-width must be in [1, 16]");
  }

  const DistributionModel& model() const { return model_; }
  int bits() const { return bits_; }
  ClipMode mode() const { return mode_; }

  AciqSetting with_model(DistributionModel model) const { return {model, bits_, mode_}; }

 private:
  DistributionModel model_;
  int bits_;
  ClipMode mode_;
};

namespace detail {

inline constexpr double kSqrtPi = 1.7724538509055160273;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kSqrt2Pi = 2.5066282746310005024;

inline double four_pow(int bits) { return std::ldexp(1.0, 2 * bits); }

inline void require_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0, "clipping value must be positive");
}

// Gaussian tail integral  int_alpha^inf f(x) (x - alpha)^2 dx  for N(0, sigma^2).
inline double gaussian_tail(double sigma, double alpha) {
  const double z = alpha / (kSqrt2 * sigma);
  return 0.5 * (alpha * alpha + sigma * sigma) * aciq::erfc(z) -
         alpha * sigma * std::exp(-z * z) / kSqrt2Pi;
}

}  // namespace detail

/// Rounding noise under the uniform-within-bin model:
/// alpha^2 / (3 * 4^M) symmetric, alpha^2 / (24 * 4^M) after a fused ReLU.
inline double rounding_noise_uniform(double alpha, int bits, ClipMode mode = ClipMode::kSymmetric) {
  detail::require_alpha(alpha);
  detail::require(bits >= kMinBits && bits <= kMaxBits, "bit-width must be in [1, 16]");
  const double denom = mode == ClipMode::kSymmetric ? 3.0 : 24.0;
  return alpha * alpha / (denom * detail::four_pow(bits));
}

/// Rounding noise with the density replaced by its piecewise-linear
/// interpolant through the bin midpoints. The slope terms integrate to zero
/// over each bin, leaving delta^3 / 12 * sum_i f(q_i), which for the symmetric
/// grid is 2 alpha^3 / (3 * 8^M) * sum_i f(q_i). `density` is evaluated at
/// the midpoints of the symmetric grid on [-alpha, alpha].
template <typename Density>
double rounding_noise_pwl(Density&& density, double alpha, int bits) {
  const QuantGrid grid = make_grid(alpha, bits, GridMode::kSymmetric);
  double density_sum = 0.0;
  for (double q : grid.midpoints()) density_sum += density(q);
  const double d = grid.delta();
  return d * d * d / 12.0 * density_sum;
}

inline double rounding_noise_pwl(const DistributionModel& model, double alpha, int bits) {
  return rounding_noise_pwl([&](double q) { return pdf(model, model.mean() + q); }, alpha, bits);
}

/// Clipping noise from both tails, 2 * int_alpha^inf f(x) (x - alpha)^2 dx.
/// Laplace: 2 b^2 e^{-alpha/b}.
/// Gaussian: (alpha^2 + sigma^2) erfc(alpha / (sqrt2 sigma))
///           - sqrt2 alpha sigma e^{-alpha^2/(2 sigma^2)} / sqrt(pi).
inline double clip_noise(const DistributionModel& model, double alpha) {
  detail::require_alpha(alpha);
  const double s = model.scale();
  if (model.family() == Family::kLaplace) return 2.0 * s * s * std::exp(-alpha / s);
  return 2.0 * detail::gaussian_tail(s, alpha);
}

/// Clipping noise from the upper tail only (the fused-ReLU case).
inline double clip_noise_one_tail(const DistributionModel& model, double alpha) {
  return 0.5 * clip_noise(model, alpha);
}

/// Total expected MSE for the setting's family and mode.
inline double mse(const AciqSetting& setting, double alpha) {
  detail::require_alpha(alpha);
  const double clipping = setting.mode() == ClipMode::kSymmetric
                              ? clip_noise(setting.model(), alpha)
                              : clip_noise_one_tail(setting.model(), alpha);
  return clipping + rounding_noise_uniform(alpha, setting.bits(), setting.mode());
}

/// d mse / d alpha.
///
/// Laplace symmetric: 2 alpha / (3 * 4^M) - 2 b e^{-alpha/b}.
/// Gaussian symmetric: 2 alpha erfc(z) - 2 sqrt2 sigma e^{-z^2} / sqrt(pi)
///   + 2 alpha / (3 * 4^M), z = alpha / (sqrt2 sigma).
/// The fused-ReLU forms are the one-tail halves with alpha / (12 * 4^M).
inline double mse_derivative(const AciqSetting& setting, double alpha) {
  detail::require_alpha(alpha);
  const double s = setting.model().scale();
  const bool symmetric = setting.mode() == ClipMode::kSymmetric;
  const double rounding =
      alpha / ((symmetric ? 1.5 : 12.0) * detail::four_pow(setting.bits()));
  double tail;  // derivative of the one-tail clipping noise
  if (setting.model().family() == Family::kLaplace) {
    tail = -s * std::exp(-alpha / s);
  } else {
    const double z = alpha / (detail::kSqrt2 * s);
    tail = alpha * aciq::erfc(z) - 2.0 * s * std::exp(-z * z) / detail::kSqrt2Pi;
  }
  return (symmetric ? 2.0 * tail : tail) + rounding;
}

inline constexpr double kBracketLow = 1e-3;     // in units of the scale
inline constexpr double kBracketHigh = 20.0;    // in units of the scale
inline constexpr double kSolverWidth = 1e-9;    // in units of the scale
inline constexpr int kBracketExpansions = 4;

/// Clipping value minimizing `mse`, found by bisection on `mse_derivative`.
///
/// The solve runs on the unit-scale prior and is multiplied back, so the
/// result is exactly linear in the scale. The bracket [1e-3, 20] (in units of
/// the scale) is doubled at the top when the optimum lies beyond it, which
/// happens for Laplace at 16 bits.
inline double optimal_alpha(const AciqSetting& setting) {
  const double scale = setting.model().scale();
  const AciqSetting unit = setting.with_model(setting.model().with_scale(1.0));
  auto derivative = [&](double a) { return mse_derivative(unit, a); };
  double hi = kBracketHigh;
  for (int i = 0; i < kBracketExpansions && derivative(hi) < 0.0; ++i) hi *= 2.0;
  return scale * bisect(derivative, kBracketLow, hi, kSolverWidth);
}

/// alpha* / b for the symmetric Laplace quantizer at 1..8 bits, solved once.
inline const std::array<double, 9>& laplace_optimal_ratios() {
  static const std::array<double, 9> ratios = [] {
    std::array<double, 9> r{};
    for (int m = 1; m <= 8; ++m)
      r[m] = optimal_alpha(AciqSetting(DistributionModel::laplace(1.0), m));
    return r;
  }();
  return ratios;
}

}  // namespace aciq
