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
#include <cstdint>
#include <string>
#include <vector>

#include "tarstop/errors.hpp"
#include "tarstop/quantile.hpp"
#include "tarstop/random.hpp"
#include "tarstop/record.hpp"

namespace tarstop {

/// Simple random sampling without replacement from the whole collection,
/// stopping as soon as r positives have been drawn. The r positives are a
/// uniform r-subset of the record's positives; draw_count includes the
/// negatives drawn along the way.
inline PositiveSample draw_positive_sample(const RankRecord& record, std::uint64_t r,
                                           std::uint64_t seed) {
  const auto R = record.positive_count();
  if (r < 1) throw InfeasibleSampleError("sample needs r >= 1");
  if (r > R) {
    throw InfeasibleSampleError("cannot draw " + std::to_string(r) + " positives from a record with " +
                                std::to_string(R));
  }
  Rng rng(seed);

  // Draw count: each draw is positive with probability (positives left)/(docs left).
  std::uint64_t pos_left = R, docs_left = record.collection_size(), found = 0, drawn = 0;
  while (found < r) {
    if (uniform_below(rng, docs_left) < pos_left) {
      ++found;
      --pos_left;
    }
    --docs_left;
    ++drawn;
  }

  // Which positives: Floyd's algorithm over positive indices [0, R).
  std::vector<bool> taken(R, false);
  std::vector<std::uint64_t> picked;
  picked.reserve(r);
  for (std::uint64_t j = R - r; j < R; ++j) {
    const auto t = uniform_below(rng, j + 1);
    const auto idx = taken[t] ? j : t;
    taken[idx] = true;
    picked.push_back(idx);
  }
  std::sort(picked.begin(), picked.end());
  std::vector<std::uint64_t> ranks;
  ranks.reserve(r);
  for (auto idx : picked) ranks.push_back(record.positive_ranks()[idx]);
  return PositiveSample(std::move(ranks), drawn);
}

}  // namespace tarstop
