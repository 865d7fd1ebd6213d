// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

#include "tarstop/errors.hpp"

namespace tarstop {

/// A real value constrained to [0, 1].
class Probability {
 public:
  constexpr Probability() noexcept = default;

  explicit Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw DomainError("probability out of [0,1]: " + std::to_string(value));
    }
  }

  /// For computed results that may overshoot [0,1] by rounding.
  static Probability clamped(double value) noexcept {
    Probability p;
    p.value_ = std::isnan(value) ? 0.0 : std::clamp(value, 0.0, 1.0);
    return p;
  }

  constexpr double value() const noexcept { return value_; }

  friend constexpr auto operator<=>(Probability, Probability) noexcept = default;

 private:
  double value_ = 0.0;
};

namespace detail {

// Products such as t*R are compared against integers with this relative slack;
// 0.8 * 10 must count as exactly 8.
inline constexpr double kIntegralTolerance = 1e-9;

inline bool near_integer(double x) noexcept {
  return std::abs(x - std::round(x)) <= kIntegralTolerance * std::max(1.0, std::abs(x));
}

inline std::uint64_t ceil_count(double x) noexcept {
  if (x <= 0.0) return 0;
  return static_cast<std::uint64_t>(near_integer(x) ? std::round(x) : std::ceil(x));
}

inline std::uint64_t floor_count(double x) noexcept {
  if (x <= 0.0) return 0;
  return static_cast<std::uint64_t>(near_integer(x) ? std::round(x) : std::floor(x));
}

inline void require_open_unit(double t, const char* name) {
  if (!(t > 0.0 && t < 1.0)) {
    throw DomainError(std::string(name) + " must lie strictly between 0 and 1, got " +
                      std::to_string(t));
  }
}

}  // namespace detail
}  // namespace tarstop
