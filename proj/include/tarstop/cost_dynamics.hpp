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
#include <span>
#include <string>
#include <vector>

#include "tarstop/cost.hpp"
#include "tarstop/errors.hpp"
#include "tarstop/random.hpp"
#include "tarstop/record.hpp"
#include "tarstop/replicate.hpp"
#include "tarstop/rules.hpp"

namespace tarstop {

/// Review-side cost of stopping at the end of one batch. The phase-2 penalty
/// continues in recorded review order (a stand-in for re-ranking the
/// unreviewed documents), so it upper-bounds an optimal second phase.
struct CostCurvePoint {
  std::uint64_t batch = 0;
  std::uint64_t stop_rank = 0;
  Probability recall;
  std::uint64_t review_pos = 0;
  std::uint64_t review_neg = 0;
  std::uint64_t phase2_penalty = 0;
  std::uint64_t review_total = 0;  // review_pos + review_neg + phase2_penalty
};

/// Worst QBCB stop, by total cost, over the replications for one sample size.
struct WorstCaseMarker {
  std::uint64_t sample_size = 0;
  std::uint64_t stop_index = 0;  // QBCB j
  std::uint64_t worst_rep = 0;
  std::uint64_t worst_seed = 0;
  std::uint64_t stop_batch = 0;
  std::uint64_t total_cost = 0;
  std::uint64_t sample_cost = 0;     // of the worst replication
  double mean_sample_cost = 0.0;     // raises the curve for this size
};

struct CostDynamics {
  std::vector<CostCurvePoint> curve;  // batches 0..B
  std::vector<WorstCaseMarker> markers;
};

inline std::vector<CostCurvePoint> cost_curve(const RankRecord& record, Probability t) {
  if (record.batch_size() == 0) {
    throw DomainError("cost dynamics requires a record with batch_size > 0");
  }
  std::vector<CostCurvePoint> curve;
  curve.reserve(record.batch_count() + 1);
  for (std::uint64_t b = 0; b <= record.batch_count(); ++b) {
    const auto rank = record.batch_end(b);
    const auto c = cost_breakdown(record, SampleCost{}, rank, t);
    curve.push_back({b, rank, recall_at(record, rank), c.review_pos, c.review_neg,
                     c.phase2_penalty, c.total});
  }
  return curve;
}

/// Per-batch cost curve plus, for each sample size, the worst stopping point of
/// the QBCB rule over `reps` replications. Each size draws from its own
/// stream derive_seed(master_seed, r).
inline CostDynamics cost_dynamics(const RankRecord& record, Probability t,
                                  std::span<const std::uint64_t> sample_sizes, std::uint64_t reps,
                                  std::uint64_t master_seed, Probability alpha,
                                  unsigned threads = 0) {
  CostDynamics out;
  out.curve = cost_curve(record, t);
  for (auto r : sample_sizes) {
    const auto config = RuleConfig::qbcb(r, t, alpha);
    const auto summary = replicate(record, config, reps, derive_seed(master_seed, r), threads);
    WorstCaseMarker m;
    m.sample_size = r;
    m.stop_index = rule_stop_index(config);
    long double sample_sum = 0.0L;
    bool first = true;
    for (const auto& row : summary.per_rep) {
      const auto& c = row.outcome.cost;
      sample_sum += static_cast<long double>(c.sample_pos + c.sample_neg);
      if (first || c.total > m.total_cost) {
        first = false;
        m.worst_rep = row.rep;
        m.worst_seed = row.seed;
        m.stop_batch = row.outcome.stop_batch;
        m.total_cost = c.total;
        m.sample_cost = c.sample_pos + c.sample_neg;
      }
    }
    m.mean_sample_cost = static_cast<double>(sample_sum / static_cast<long double>(reps));
    out.markers.push_back(m);
  }
  return out;
}

}  // namespace tarstop
