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
#include <cstdint>
#include <numbers>
#include <random>

namespace aciq {

// Seeded source of uniform and normal draws.
//
// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
// standard. The real-valued transforms are written out here instead of using
// the <random> distributions, whose algorithms are implementation-defined, so
// a seed gives the same stream with every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1): the top 53 bits, offset by half an ulp.
  double uniform() {
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    return (static_cast<double>(engine_() >> 11) + 0.5) * kScale;
  }

  // Standard normal via Box-Muller; the second variate of each pair is kept.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Standard Laplace (b = 1) by inverse CDF.
  double laplace() {
    const double centered = uniform() - 0.5;
    const double sign = centered < 0.0 ? -1.0 : 1.0;
    return -sign * std::log(1.0 - 2.0 * std::abs(centered));
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace aciq
