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

// Stopping rules evaluated against a completed review. Each rule reads only
// the sampled positives' A-ranks, the positive census and batch boundaries,
// so any review order can be plugged in.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "tarstop/certify.hpp"
#include "tarstop/cost.hpp"
#include "tarstop/errors.hpp"
#include "tarstop/probability.hpp"
#include "tarstop/quantile.hpp"
#include "tarstop/record.hpp"

namespace tarstop {

enum class RuleKind { Pet, Qpet, Qbcb, Target, Countdown };

inline constexpr std::uint64_t kTargetSetSize = 10;

inline std::string_view to_string(RuleKind kind) noexcept {
  switch (kind) {
    case RuleKind::Pet: return "pet";
    case RuleKind::Qpet: return "qpet";
    case RuleKind::Qbcb: return "qbcb";
    case RuleKind::Target: return "target";
    case RuleKind::Countdown: return "countdown";
  }
  return "?";
}

inline std::optional<RuleKind> parse_rule_kind(std::string_view name) noexcept {
  for (auto k : {RuleKind::Pet, RuleKind::Qpet, RuleKind::Qbcb, RuleKind::Target,
                 RuleKind::Countdown}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

struct RuleConfig {
  RuleKind rule = RuleKind::Qbcb;
  Probability recall_goal;
  Probability alpha;                    // QBCB only
  std::uint64_t sample_positives = 0;  // r
  std::uint64_t sample_total = 0;      // n, Countdown only; 0 takes it from the sample

  static RuleConfig pet(std::uint64_t r, Probability t) { return {RuleKind::Pet, t, {}, r, 0}; }
  static RuleConfig qpet(std::uint64_t r, Probability t) { return {RuleKind::Qpet, t, {}, r, 0}; }
  static RuleConfig qbcb(std::uint64_t r, Probability t, Probability alpha) {
    return {RuleKind::Qbcb, t, alpha, r, 0};
  }
  static RuleConfig target(Probability t) {
    return {RuleKind::Target, t, {}, kTargetSetSize, 0};
  }
  static RuleConfig countdown(std::uint64_t r, std::uint64_t n, Probability t) {
    return {RuleKind::Countdown, t, {}, r, n};
  }

  void validate() const {
    if (sample_positives < 1) throw ConfigError("rule needs at least one sampled positive");
    switch (rule) {
      case RuleKind::Countdown:
        if (!(recall_goal.value() > 0.0)) throw ConfigError("countdown recall goal must be > 0");
        if (sample_total != 0 && sample_total < sample_positives) {
          throw ConfigError("countdown sample total n must be >= r");
        }
        return;
      case RuleKind::Qbcb:
        if (!(alpha.value() > 0.0 && alpha.value() < 1.0)) {
          throw ConfigError("QBCB alpha must lie strictly in (0,1)");
        }
        break;
      case RuleKind::Target:
        if (sample_positives != kTargetSetSize) {
          throw ConfigError("the Target rule uses a target set of exactly 10 positives");
        }
        break;
      case RuleKind::Qpet:
        if (sample_positives < 2) throw ConfigError("QPET needs r >= 2");
        break;
      case RuleKind::Pet:
        break;
    }
    if (!(recall_goal.value() > 0.0 && recall_goal.value() < 1.0)) {
      throw ConfigError("recall goal must lie strictly in (0,1)");
    }
  }
};

struct StopOutcome {
  StopRank stop_rank;
  std::uint64_t stop_batch = 0;  // 0 without batches
  Probability achieved_recall;
  CostBreakdown cost;

  bool stopped() const noexcept { return stop_rank.has_value(); }
};

/// Count of sampled positives a rule waits for (PET, QPET, QBCB, Target).
inline std::uint64_t rule_stop_index(const RuleConfig& config) {
  config.validate();
  const auto r = config.sample_positives;
  const auto t = config.recall_goal;
  switch (config.rule) {
    case RuleKind::Pet: return pet_stop_index(r, t);
    case RuleKind::Qpet: return qpet_stop_index(r, t);
    case RuleKind::Qbcb: {
      const auto plan = qbcb_index(r, t, config.alpha);
      if (plan.trivial) {
        throw ConfigError("QBCB plan is trivial for r = " + std::to_string(r) +
                          "; minimum r = " +
                          std::to_string(min_sample_nontrivial(t, config.alpha)));
      }
      return plan.index;
    }
    case RuleKind::Target: return r;
    case RuleKind::Countdown: break;
  }
  throw ConfigError("countdown has no sample stop index");
}

namespace detail {

inline StopOutcome finish(const RankRecord& record, StopRank stop, SampleCost sample,
                          Probability t) {
  StopOutcome out;
  if (!stop) {
    out.stop_batch = record.batch_count();
    out.achieved_recall = Probability::clamped(1.0);
  } else {
    std::uint64_t rank = *stop;
    if (record.batch_size() > 0) {
      out.stop_batch = record.batch_of(rank);
      rank = record.batch_end(out.stop_batch);
    }
    stop = rank;
    out.achieved_recall = recall_at(record, rank);
  }
  out.stop_rank = stop;
  out.cost = cost_breakdown(record, sample, stop, t);
  return out;
}

}  // namespace detail

/// found * n / (N * r); can exceed 1.
inline double countdown_recall_estimate(std::uint64_t found, std::uint64_t N, std::uint64_t n,
                                        std::uint64_t r) {
  return static_cast<double>(found) * static_cast<double>(n) /
         (static_cast<double>(N) * static_cast<double>(r));
}

/// Stop once the positives found reach ceil(t N r / n); NO_STOP if the
/// collection holds fewer positives than that.
inline StopOutcome run_countdown(const RankRecord& record, std::uint64_t n, std::uint64_t r,
                                 Probability t) {
  if (!(r >= 1 && n >= r)) throw ConfigError("countdown requires n >= r >= 1");
  if (!(t.value() > 0.0)) throw ConfigError("countdown recall goal must be > 0");
  const long double estimate_total = static_cast<long double>(record.collection_size()) *
                                     static_cast<long double>(r) / static_cast<long double>(n);
  const auto target = std::max<std::uint64_t>(
      1, detail::ceil_count(static_cast<double>(static_cast<long double>(t.value()) *
                                                estimate_total)));
  const SampleCost sample{r, n - r};
  if (target > record.positive_count()) return detail::finish(record, kNoStop, sample, t);
  return detail::finish(record, record.positive_ranks()[target - 1], sample, t);
}

inline StopOutcome run_rule(const RankRecord& record, const PositiveSample& sample,
                            const RuleConfig& config) {
  config.validate();
  if (sample.size() != config.sample_positives) {
    throw ConfigError("sample has " + std::to_string(sample.size()) +
                      " positives but the rule expects r = " +
                      std::to_string(config.sample_positives));
  }
  for (auto rank : sample.ranks()) {
    if (!record.is_positive(rank)) {
      throw DataError("sampled rank " + std::to_string(rank) + " is not a positive of the record");
    }
  }
  if (config.rule == RuleKind::Countdown) {
    const auto drawn = sample.draw_count() == 0 ? sample.size() : sample.draw_count();
    const auto n = config.sample_total != 0 ? config.sample_total : drawn;
    return run_countdown(record, n, sample.size(), config.recall_goal);
  }
  const auto k = rule_stop_index(config);
  return detail::finish(record, sample.order_stat(k), sample_cost(sample), config.recall_goal);
}

}  // namespace tarstop
