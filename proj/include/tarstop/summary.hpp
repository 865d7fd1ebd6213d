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
#include <cstdint>
#include <span>
#include <vector>

#include "tarstop/errors.hpp"

namespace tarstop {

/// Box-and-whisker summary. Quartiles use linear interpolation between order
/// statistics (type 7); whiskers stop at the most extreme observation within
/// 1.5 IQR of the box.
struct BoxplotStats {
  std::size_t count = 0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double mean = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  std::vector<double> outliers;  // ascending
};

namespace detail {
inline double sorted_quantile(std::span<const double> sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}
}  // namespace detail

/// Independent of input order.
inline BoxplotStats summarize(std::span<const double> values) {
  if (values.empty()) throw DomainError("cannot summarize an empty set");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  BoxplotStats s;
  s.count = v.size();
  s.q1 = detail::sorted_quantile(v, 0.25);
  s.median = detail::sorted_quantile(v, 0.5);
  s.q3 = detail::sorted_quantile(v, 0.75);
  long double sum = 0.0L;
  for (double x : v) sum += x;
  s.mean = static_cast<double>(sum / static_cast<long double>(v.size()));
  const double reach = 1.5 * (s.q3 - s.q1);
  const double lo_fence = s.q1 - reach, hi_fence = s.q3 + reach;
  s.whisker_lo = s.q1;
  s.whisker_hi = s.q3;
  for (double x : v) {
    if (x < lo_fence || x > hi_fence) {
      s.outliers.push_back(x);
    } else {
      s.whisker_lo = std::min(s.whisker_lo, x);
      s.whisker_hi = std::max(s.whisker_hi, x);
    }
  }
  return s;
}

}  // namespace tarstop
