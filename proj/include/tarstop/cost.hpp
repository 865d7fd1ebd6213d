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

#include <cstdint>
#include <optional>

#include "tarstop/errors.hpp"
#include "tarstop/probability.hpp"
#include "tarstop/quantile.hpp"
#include "tarstop/record.hpp"

namespace tarstop {

/// A stopping rank, or nullopt when the rule never fired (NO_STOP).
using StopRank = std::optional<std::uint64_t>;
inline constexpr std::nullopt_t kNoStop = std::nullopt;

/// Documents reviewed, split by where they were reviewed and their label.
/// A document in both the sample and the review is counted in both.
struct CostBreakdown {
  std::uint64_t sample_pos = 0;
  std::uint64_t sample_neg = 0;
  std::uint64_t review_pos = 0;
  std::uint64_t review_neg = 0;
  std::uint64_t phase2_penalty = 0;  // continuation in review order, 0 once the goal is met
  std::uint64_t total = 0;

  static CostBreakdown of(std::uint64_t sp, std::uint64_t sn, std::uint64_t rp, std::uint64_t rn,
                          std::uint64_t penalty) noexcept {
    return {sp, sn, rp, rn, penalty, sp + sn + rp + rn + penalty};
  }

  friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

struct SampleCost {
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
};

inline SampleCost sample_cost(const PositiveSample& sample) noexcept {
  const auto drawn = sample.draw_count() == 0 ? sample.size() : sample.draw_count();
  return {sample.size(), drawn - sample.size()};
}

/// Review-side cost of stopping at `stop`, with the phase-2 penalty charged as
/// the documents still needed, in record order, to reach recall t. NO_STOP
/// reviews the whole collection.
inline CostBreakdown cost_breakdown(const RankRecord& record, SampleCost sample, StopRank stop,
                                    Probability t) {
  if (!stop) {
    const auto R = record.positive_count();
    return CostBreakdown::of(sample.positives, sample.negatives, R,
                             record.collection_size() - R, 0);
  }
  if (*stop > record.collection_size()) throw DomainError("stop rank beyond collection size");
  const auto found = record.found_by(*stop);
  const auto goal_rank = t_quantile_rank(record, t);
  const std::uint64_t penalty = goal_rank > *stop ? goal_rank - *stop : 0;
  return CostBreakdown::of(sample.positives, sample.negatives, found, *stop - found, penalty);
}

inline CostBreakdown cost_breakdown(const RankRecord& record, const PositiveSample& sample,
                                    StopRank stop, Probability t) {
  return cost_breakdown(record, sample_cost(sample), stop, t);
}

}  // namespace tarstop
