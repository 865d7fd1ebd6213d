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

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tarstop/errors.hpp"
#include "tarstop/probability.hpp"

namespace tarstop {

/// Sorted A-ranks of the positives found in a random sample, plus the number
/// of documents that had to be inspected to collect them (0 when unknown).
class PositiveSample {
 public:
  PositiveSample() = default;

  explicit PositiveSample(std::vector<std::uint64_t> ranks, std::uint64_t draw_count = 0)
      : ranks_(std::move(ranks)), draw_count_(draw_count) {
    for (std::size_t i = 0; i < ranks_.size(); ++i) {
      if (ranks_[i] == 0) throw DataError("sample ranks must be >= 1");
      if (i > 0 && ranks_[i] <= ranks_[i - 1]) {
        throw DataError("sample ranks must be strictly increasing");
      }
    }
    if (draw_count_ != 0 && draw_count_ < ranks_.size()) {
      throw DataError("draw_count smaller than the number of sampled positives");
    }
  }

  std::span<const std::uint64_t> ranks() const noexcept { return ranks_; }
  std::uint64_t size() const noexcept { return ranks_.size(); }
  std::uint64_t draw_count() const noexcept { return draw_count_; }

  /// 1-based order statistic d_k.
  std::uint64_t order_stat(std::uint64_t k) const {
    if (k == 0 || k > ranks_.size()) {
      throw InsufficientSampleError("order statistic d_" + std::to_string(k) +
                                    " not available in a sample of " +
                                    std::to_string(ranks_.size()));
    }
    return ranks_[k - 1];
  }

  friend bool operator==(const PositiveSample&, const PositiveSample&) = default;

 private:
  std::vector<std::uint64_t> ranks_;
  std::uint64_t draw_count_ = 0;
};

/// A recall goal given as an exact fraction num/den, 0 < num < den.
struct RecallRatio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  void validate() const {
    if (!(num > 0 && num < den)) throw DomainError("recall ratio must lie strictly in (0,1)");
  }
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Interpolation anchor of the Hyndman-Fan type 7 quantile estimator:
/// h = (r - 1) t + 1, j = floor(h), fraction = h - j.
struct Q7Anchor {
  double h = 0.0;
  std::uint64_t j = 0;
  double fraction = 0.0;

  bool integral() const noexcept { return fraction == 0.0; }
};

struct Q7Estimate {
  double raw = 0.0;
  std::uint64_t rank = 0;  // ceil(raw)
};

namespace detail {
inline void require_q7_size(std::uint64_t r) {
  if (r < 2) throw DomainError("Q7 estimation needs a sample of at least 2 positives");
}
}  // namespace detail

/// Integrality of h is decided with a 1e-9 relative tolerance; use the
/// RecallRatio overload for an exact decision.
inline Q7Anchor q7_anchor(std::uint64_t r, Probability t) {
  detail::require_q7_size(r);
  detail::require_open_unit(t.value(), "recall goal");
  const double h = static_cast<double>(r - 1) * t.value() + 1.0;
  if (detail::near_integer(h)) {
    return {std::round(h), static_cast<std::uint64_t>(std::round(h)), 0.0};
  }
  const double j = std::floor(h);
  return {h, static_cast<std::uint64_t>(j), h - j};
}

inline Q7Anchor q7_anchor(std::uint64_t r, RecallRatio t) {
  detail::require_q7_size(r);
  t.validate();
  // h = ((r-1) num + den) / den
  const unsigned __int128 numer = static_cast<unsigned __int128>(r - 1) * t.num + t.den;
  const auto j = static_cast<std::uint64_t>(numer / t.den);
  const auto rem = static_cast<std::uint64_t>(numer % t.den);
  const double fraction = static_cast<double>(rem) / static_cast<double>(t.den);
  return {static_cast<double>(j) + fraction, j, fraction};
}

/// d_j + (h - j)(d_{j+1} - d_j), reported raw and rounded up to a rank.
inline Q7Estimate q7_estimate(const PositiveSample& sample, Probability t) {
  if (sample.size() < 2) {
    throw InsufficientSampleError("Q7 estimation needs at least 2 sampled positives");
  }
  const Q7Anchor anchor = q7_anchor(sample.size(), t);
  const auto lo = static_cast<double>(sample.order_stat(anchor.j));
  if (anchor.integral()) {
    return {lo, static_cast<std::uint64_t>(lo)};
  }
  const auto hi = static_cast<double>(sample.order_stat(anchor.j + 1));
  const double raw = lo + anchor.fraction * (hi - lo);
  return {raw, detail::ceil_count(raw)};
}

/// Number of sampled positives the QPET rule must find before stopping.
inline std::uint64_t qpet_stop_index(std::uint64_t r, Probability t) {
  const auto a = q7_anchor(r, t);
  return a.integral() ? a.j : a.j + 1;
}

inline std::uint64_t qpet_stop_index(std::uint64_t r, RecallRatio t) {
  const auto a = q7_anchor(r, t);
  return a.integral() ? a.j : a.j + 1;
}

/// ceil(r t): the first sample count at which the plug-in recall reaches t.
inline std::uint64_t pet_stop_index(std::uint64_t r, Probability t) {
  if (r < 1) throw DomainError("PET needs at least one sampled positive");
  detail::require_open_unit(t.value(), "recall goal");
  return std::max<std::uint64_t>(1, detail::ceil_count(static_cast<double>(r) * t.value()));
}

inline std::uint64_t pet_stop_index(std::uint64_t r, RecallRatio t) {
  if (r < 1) throw DomainError("PET needs at least one sampled positive");
  t.validate();
  const unsigned __int128 prod = static_cast<unsigned __int128>(r) * t.num;
  return static_cast<std::uint64_t>((prod + t.den - 1) / t.den);
}

/// Expected recall of PET at goal 0.5 on a collection of N documents that are
/// all relevant, using a sample of n: (1/2)(n/(n+1))((N+1)/N).
inline double pet_expected_recall_all_relevant(std::uint64_t N, std::uint64_t n) {
  if (N == 0 || n == 0 || N % 2 != 0 || n % 2 != 0) {
    throw DomainError("N and n must be positive even integers");
  }
  if (n > N) throw DomainError("sample size n cannot exceed N");
  const double nd = static_cast<double>(n), Nd = static_cast<double>(N);
  return 0.5 * (nd / (nd + 1.0)) * ((Nd + 1.0) / Nd);
}

}  // namespace tarstop
