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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "aciq/error.hpp"
#include "aciq/random.hpp"

namespace aciq {

enum class Family { kLaplace, kGaussian };

inline const char* to_string(Family family) {
  return family == Family::kLaplace ? "laplace" : "gaussian";
}

/// A symmetric bell-shaped prior: Laplace(mean, b) or Normal(mean, sigma^2).
///
/// `scale` is b for Laplace and sigma for Gaussian. Construction rejects
/// non-positive scales; constant tensors have to be handled by the caller
/// (see kScaleFloor) before a model is built.
class DistributionModel {
 public:
  DistributionModel(Family family, double scale, double mean = 0.0)
      : family_(family), scale_(scale), mean_(mean) {
    detail::require(std::isfinite(scale) && scale > 0.0, "distribution scale must be positive");
    detail::require(std::isfinite(mean), "distribution mean must be finite");
  }

  static DistributionModel laplace(double b, double mean = 0.0) {
    return DistributionModel(Family::kLaplace, b, mean);
  }
  static DistributionModel gaussian(double sigma, double mean = 0.0) {
    return DistributionModel(Family::kGaussian, sigma, mean);
  }

  Family family() const { return family_; }
  double scale() const { return scale_; }
  double mean() const { return mean_; }

  DistributionModel with_scale(double scale) const { return {family_, scale, mean_}; }

  double variance() const {
    return family_ == Family::kLaplace ? 2.0 * scale_ * scale_ : scale_ * scale_;
  }

 private:
  Family family_;
  double scale_;
  double mean_;
};

// Substitute for a zero scale estimate when a model must still be built.
inline constexpr double kScaleFloor = 1e-12;

struct Centered {
  std::vector<double> values;
  double mean = 0.0;
};

inline double mean_of(std::span<const double> samples) {
  detail::require(!samples.empty(), "empty tensor");
  double sum = 0.0;
  for (double x : samples) sum += x;
  return sum / static_cast<double>(samples.size());
}

inline Centered center(std::span<const double> samples) {
  Centered out;
  out.mean = mean_of(samples);
  out.values.reserve(samples.size());
  for (double x : samples) out.values.push_back(x - out.mean);
  return out;
}

/// Mean absolute deviation around the sample mean, E|X - E X|.
///
/// Returns 0 for constant input; callers must not feed that into a model.
inline double estimate_laplace_b(std::span<const double> samples) {
  const double mu = mean_of(samples);
  double sum = 0.0;
  for (double x : samples) sum += std::abs(x - mu);
  return sum / static_cast<double>(samples.size());
}

/// Population standard deviation around the sample mean.
inline double estimate_gaussian_sigma(std::span<const double> samples) {
  detail::require(samples.size() >= 2, "gaussian sigma needs at least two samples");
  const double mu = mean_of(samples);
  double sum = 0.0;
  for (double x : samples) sum += (x - mu) * (x - mu);
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

inline double estimate_scale(Family family, std::span<const double> samples) {
  return family == Family::kLaplace ? estimate_laplace_b(samples)
                                    : estimate_gaussian_sigma(samples);
}

inline double pdf(const DistributionModel& model, double x) {
  const double s = model.scale();
  const double t = x - model.mean();
  if (model.family() == Family::kLaplace) return std::exp(-std::abs(t) / s) / (2.0 * s);
  return std::exp(-0.5 * (t / s) * (t / s)) / (std::sqrt(2.0 * std::numbers::pi) * s);
}

/// Draws `n` values. Laplace uses the inverse CDF
/// x = mean - b*sign(u-1/2)*ln(1-2|u-1/2|); Gaussian uses Box-Muller.
/// Both run off an Rng seeded with `seed`, so output is reproducible.
inline std::vector<double> sample(const DistributionModel& model, std::size_t n,
                                  std::uint64_t seed) {
  detail::require(n >= 1, "sample count must be at least 1");
  Rng rng(seed);
  std::vector<double> out(n);
  if (model.family() == Family::kLaplace) {
    for (auto& x : out) x = model.mean() + model.scale() * rng.laplace();
  } else {
    for (auto& x : out) x = model.mean() + model.scale() * rng.normal();
  }
  return out;
}

}  // namespace aciq
