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

// Prints the optimal clipping multipliers alpha*/scale for both priors and
// shows ACIQ against the min/max baseline on one synthetic tensor.

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "aciq/aciq.hpp"

int main() {
  using namespace aciq;
  std::printf("bits  laplace(b)  gaussian(sigma)  laplace-relu  gaussian-relu\n");
  for (int bits = 1; bits <= 8; ++bits) {
    auto ratio = [&](Family f, ClipMode m) {
      return optimal_alpha(AciqSetting(DistributionModel(f, 1.0), bits, m));
    };
    std::printf("%4d  %10.4f  %15.4f  %12.4f  %13.4f\n", bits, ratio(Family::kLaplace, ClipMode::kSymmetric),
                ratio(Family::kGaussian, ClipMode::kSymmetric), ratio(Family::kLaplace, ClipMode::kFusedRelu),
                ratio(Family::kGaussian, ClipMode::kFusedRelu));
  }

  const auto samples = sample(DistributionModel::laplace(1.0), 100000, 42);
  const double b = estimate_laplace_b(samples);
  const double alpha = optimal_alpha(AciqSetting(DistributionModel::laplace(b), 4));
  double max_abs = 0.0;
  for (double x : samples) max_abs = std::max(max_abs, std::abs(x));
  std::printf("\n4-bit, 100k Laplace samples: b=%.4f\n", b);
  std::printf("  aciq   alpha=%.4f  mse=%.6f\n", alpha, empirical_mse(samples, make_grid(alpha, 4, GridMode::kSymmetric)));
  std::printf("  maxabs alpha=%.4f  mse=%.6f\n", max_abs,
              empirical_mse(samples, make_grid(max_abs, 4, GridMode::kSymmetric)));
  return 0;
}
