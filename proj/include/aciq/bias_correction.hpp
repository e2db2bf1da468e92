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
#include <span>
#include <utility>
#include <vector>

#include "aciq/distributions.hpp"
#include "aciq/error.hpp"
#include "aciq/quantizer.hpp"

namespace aciq {

/// Per-channel constants that restore the mean and the centered L2 norm of a
/// quantized weight channel: w <- xi_c * (w + mu_c).
struct CorrectionTerms {
  std::vector<double> mu;
  std::vector<double> xi;
};

namespace detail {

inline double centered_norm(std::span<const double> values, double mean) {
  double sum = 0.0;
  for (double v : values) sum += (v - mean) * (v - mean);
  return std::sqrt(sum);
}

}  // namespace detail

/// mu_c = E[W_c] - E[W_c^q]
/// xi_c = ||W_c - E[W_c]||_2 / ||W_c^q - E[W_c^q]||_2   (1 if the denominator is 0)
inline CorrectionTerms correction_terms(const ChannelTensor& original,
                                        const ChannelTensor& quantized) {
  detail::require(original.same_shape(quantized), "shape mismatch");
  CorrectionTerms terms;
  const std::size_t channels = original.channel_count();
  terms.mu.resize(channels);
  terms.xi.resize(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    const auto w = original.channel(c);
    const auto q = quantized.channel(c);
    const double mean_w = mean_of(w);
    const double mean_q = mean_of(q);
    terms.mu[c] = mean_w - mean_q;
    const double denom = detail::centered_norm(q, mean_q);
    terms.xi[c] = denom > 0.0 ? detail::centered_norm(w, mean_w) / denom : 1.0;
  }
  return terms;
}

inline ChannelTensor apply_correction(const ChannelTensor& quantized, const CorrectionTerms& terms) {
  const std::size_t channels = quantized.channel_count();
  detail::require(terms.mu.size() == channels && terms.xi.size() == channels,
                  "channel count mismatch");
  ChannelTensor out = quantized;
  for (std::size_t c = 0; c < channels; ++c) {
    for (double& w : out.channel(c)) w = terms.xi[c] * (w + terms.mu[c]);
  }
  return out;
}

struct AffineParams {
  double scale = 0.0;
  double offset = 0.0;
};

/// Folds (mu, xi) into an affine reconstruction w = scale * code + offset, so
/// that the folded reconstruction equals xi * (w + mu).
inline AffineParams fold_correction(double scale, double offset, double mu, double xi) {
  return {xi * scale, xi * (offset + mu)};
}

}  // namespace aciq
