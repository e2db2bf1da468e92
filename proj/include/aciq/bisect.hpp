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
#include <utility>

#include "aciq/error.hpp"

namespace aciq {

/// Bisection for a root of `f` on [lo, hi]. Requires f(lo) and f(hi) to have
/// opposite signs (or one of them to be zero). Stops once the bracket is no
/// wider than `width` and returns its midpoint.
template <typename Fn>
double bisect(Fn&& f, double lo, double hi, double width) {
  detail::require(lo < hi && width > 0.0, "bisection needs lo < hi and a positive width");
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  detail::require(std::signbit(f_lo) != std::signbit(f_hi), "no optimum in bracket",
                  ErrorCode::kDegenerate);
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket exhausted in floating point
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace aciq
