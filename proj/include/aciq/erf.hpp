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
#include <limits>
#include <numbers>

namespace aciq {
namespace detail {

// erf for 0 <= x < 3 from the everywhere-positive series
//   erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n (2x^2)^n x / (1*3*...*(2n+1)).
// No cancellation, so ~1 ulp per term; 3^2*2 = 18 bounds the growth phase.
inline double erf_series(double x) {
  const double two_x2 = 2.0 * x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= two_x2 / (2.0 * n + 1.0);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x) * sum;
}

// erfc for x >= 1 from the continued fraction
//   erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// evaluated with the modified Lentz method.
inline double erfc_continued_fraction(double x) {
  constexpr double kTiny = 1e-300;
  double f = x;
  double c = f;
  double d = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    c = x + a / c;
    if (std::abs(d) < kTiny) d = kTiny;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double step = c * d;
    f *= step;
    if (std::abs(step - 1.0) < 1e-16) break;
  }
  return std::exp(-x * x) / (std::sqrt(std::numbers::pi) * f);
}

inline constexpr double kErfSplit = 3.0;
// 1 - erf(x) keeps full relative accuracy only while erfc(x) is not small.
inline constexpr double kErfcSplit = 1.0;

}  // namespace detail

/// Error function, absolute error below 1e-12 everywhere.
inline double erf(double x) {
  if (std::isnan(x)) return x;
  const double ax = std::abs(x);
  double r;
  if (ax < detail::kErfSplit) {
    r = detail::erf_series(ax);
  } else if (ax > 27.0) {
    r = 1.0;
  } else {
    r = 1.0 - detail::erfc_continued_fraction(ax);
  }
  return x < 0.0 ? -r : r;
}

/// Complementary error function with relative accuracy kept in the far tail,
/// where 1 - erf(x) would round to zero.
inline double erfc(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return 2.0 - erfc(-x);
  if (x < detail::kErfcSplit) return 1.0 - detail::erf_series(x);
  if (x > 27.3) return 0.0;  // below the smallest subnormal
  return detail::erfc_continued_fraction(x);
}

}  // namespace aciq
