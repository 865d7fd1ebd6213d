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
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "tarstop/errors.hpp"
#include "tarstop/random.hpp"
#include "tarstop/record.hpp"
#include "tarstop/rules.hpp"
#include "tarstop/sampling.hpp"
#include "tarstop/summary.hpp"

namespace tarstop {

struct ReplicationRow {
  std::uint64_t rep = 0;
  std::uint64_t seed = 0;
  StopOutcome outcome;
};

struct ReplicationSummary {
  std::vector<ReplicationRow> per_rep;  // ordered by rep
  BoxplotStats recall_stats;
  BoxplotStats cost_stats;  // total cost
  std::uint64_t no_stop_count = 0;
  std::uint64_t goal_met_count = 0;

  double coverage() const noexcept {
    return per_rep.empty() ? 0.0
                           : static_cast<double>(goal_met_count) /
                                 static_cast<double>(per_rep.size());
  }
};

/// Lower edge of the Monte Carlo band for a 1-alpha guarantee: (1-alpha) - 3 sigma.
inline double coverage_floor(double alpha, std::uint64_t reps) {
  return (1.0 - alpha) - 3.0 * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(reps));
}

/// Checks everything that would make every replication fail, before any runs.
inline void check_replicable(const RankRecord& record, const RuleConfig& config) {
  config.validate();
  if (config.sample_positives > record.positive_count()) {
    throw InfeasibleSampleError("r = " + std::to_string(config.sample_positives) +
                                " exceeds the record's " +
                                std::to_string(record.positive_count()) + " positives");
  }
  if (config.rule != RuleKind::Countdown) (void)rule_stop_index(config);
}

inline ReplicationRow replicate_one(const RankRecord& record, const RuleConfig& config,
                                    std::uint64_t rep, std::uint64_t master_seed) {
  const auto seed = derive_seed(master_seed, rep);
  try {
    const auto sample = draw_positive_sample(record, config.sample_positives, seed);
    return {rep, seed, run_rule(record, sample, config)};
  } catch (const std::exception& e) {
    throw ReplicationError("replication " + std::to_string(rep) + " (seed " +
                               std::to_string(seed) + ") failed: " + e.what(),
                           rep, seed);
  }
}

/// `reps` independent samples, rule applied to each. Replication i always uses
/// derive_seed(master_seed, i), so outputs do not depend on `threads`, and
/// raising `reps` leaves earlier rows unchanged.
inline ReplicationSummary replicate(const RankRecord& record, const RuleConfig& config,
                                    std::uint64_t reps, std::uint64_t master_seed,
                                    unsigned threads = 0) {
  if (reps < 1) throw DomainError("reps must be >= 1");
  check_replicable(record, config);

  ReplicationSummary out;
  out.per_rep.resize(reps);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, reps));

  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned w) {
    try {
      for (std::uint64_t i = w; i < reps; i += threads) {
        out.per_rep[i] = replicate_one(record, config, i, master_seed);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  // Report the lowest failing replication, independent of scheduling.
  std::exception_ptr first;
  std::uint64_t first_rep = reps;
  for (auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const ReplicationError& re) {
      if (re.rep() < first_rep) {
        first_rep = re.rep();
        first = e;
      }
    } catch (...) {
      if (!first) first = e;
    }
  }
  if (first) std::rethrow_exception(first);

  std::vector<double> recalls, costs;
  recalls.reserve(reps);
  costs.reserve(reps);
  for (const auto& row : out.per_rep) {
    const auto& o = row.outcome;
    recalls.push_back(o.achieved_recall.value());
    costs.push_back(static_cast<double>(o.cost.total));
    if (!o.stopped()) ++out.no_stop_count;
    if (!o.stopped() || goal_met(record, *o.stop_rank, config.recall_goal)) ++out.goal_met_count;
  }
  out.recall_stats = summarize(recalls);
  out.cost_stats = summarize(costs);
  return out;
}

}  // namespace tarstop
