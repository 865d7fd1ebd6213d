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

// The quantile binomial confidence bound (QBCB) stopping rule: choose the
// smallest order statistic j whose realization is, with probability 1-alpha,
// at or above the t-quantile of the positive population. Also the
// Clopper-Pearson recall bounds reported at that stopping point and the
// sample-size planners built on them.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tarstop/errors.hpp"
#include "tarstop/probability.hpp"
#include "tarstop/stat_kernel.hpp"

namespace tarstop {

/// Tail sums are accepted as meeting 1-alpha when within this slack of it.
inline constexpr double kConfidenceSlack = 1e-12;

/// Clopper-Pearson bisection stops once the bracket is this narrow.
inline constexpr double kBoundTolerance = 1e-12;

struct RecallEstimates {
  Probability lcb;
  Probability plugin;
  Probability ucb;
  Probability confidence;
};

struct StoppingPlan {
  std::uint64_t sample_size = 0;  // r
  Probability recall_goal;
  Probability confidence;
  std::uint64_t index = 0;  // j; r + 1 when trivial
  bool trivial = false;
  std::optional<RecallEstimates> estimates;  // absent for trivial plans
};

struct TableRow {
  std::uint64_t sample_size = 0;
  std::uint64_t index = 0;
  RecallEstimates estimates;
  bool starred = false;  // j* = j - 1 fallback rather than the QBCB j
};

namespace detail {

inline void require_plan_args(std::uint64_t r, Probability t, Probability alpha) {
  if (r < 1) throw DomainError("sample size r must be >= 1");
  require_open_unit(t.value(), "recall goal");
  require_open_unit(alpha.value(), "alpha");
}

inline bool meets_confidence(double mass, Probability alpha) noexcept {
  return mass >= (1.0 - alpha.value()) - kConfidenceSlack;
}

template <class Increasing>
double bisect_increasing(Increasing&& f, double target) {
  double lo = 0.0, hi = 1.0;
  while (hi - lo > kBoundTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// One-sided lower Clopper-Pearson bound: the t solving P_t[X >= j] = alpha.
inline Probability cp_lower_bound(std::uint64_t j, std::uint64_t r, Probability alpha) {
  if (r < 1 || j > r) throw DomainError("cp_lower_bound requires j <= r, r >= 1");
  detail::require_open_unit(alpha.value(), "alpha");
  if (j == 0) return Probability{};
  const double bound = detail::bisect_increasing(
      [&](double t) { return detail::binomial_mass(r, t).at_least(j); }, alpha.value());
  return Probability::clamped(bound);
}

/// One-sided upper Clopper-Pearson bound: the t solving P_t[X <= j] = alpha.
inline Probability cp_upper_bound(std::uint64_t j, std::uint64_t r, Probability alpha) {
  if (r < 1 || j > r) throw DomainError("cp_upper_bound requires j <= r, r >= 1");
  detail::require_open_unit(alpha.value(), "alpha");
  if (j == r) return Probability::clamped(1.0);
  // P_t[X <= j] decreases in t, so bisect on its complement.
  const double bound = detail::bisect_increasing(
      [&](double t) { return detail::binomial_mass(r, t).at_least(j + 1); }, 1.0 - alpha.value());
  return Probability::clamped(bound);
}

inline RecallEstimates recall_estimates(std::uint64_t j, std::uint64_t r, Probability alpha) {
  if (!(j >= 1 && j <= r)) throw DomainError("recall_estimates requires 1 <= j <= r");
  return {cp_lower_bound(j, r, alpha),
          Probability::clamped(static_cast<double>(j) / static_cast<double>(r)),
          cp_upper_bound(j, r, alpha), Probability::clamped(1.0 - alpha.value())};
}

/// Smallest j in [1, r+1] with P[Binomial(r, t) < j] >= 1 - alpha. j = r + 1
/// means only the trivial interval [1, N] has the requested confidence.
inline StoppingPlan qbcb_index(std::uint64_t r, Probability t, Probability alpha) {
  detail::require_plan_args(r, t, alpha);
  const auto cdf = detail::binomial_mass(r, t.value()).below_table();
  std::uint64_t j = 1;
  while (j <= r && !detail::meets_confidence(cdf[j], alpha)) ++j;
  StoppingPlan plan{r, t, Probability::clamped(1.0 - alpha.value()), j, j == r + 1, std::nullopt};
  if (!plan.trivial) plan.estimates = recall_estimates(j, r, alpha);
  return plan;
}

/// As qbcb_index, but with the exact hypergeometric law for a positive
/// population of known size R.
inline StoppingPlan qbcb_index_exact(std::uint64_t R, std::uint64_t r, Probability t,
                                     Probability alpha) {
  detail::require_plan_args(r, t, alpha);
  if (r > R) throw DomainError("qbcb_index_exact requires r <= R");
  const auto cdf =
      detail::hypergeometric_mass(R, r, detail::below_quantile_slots(R, t.value())).below_table();
  std::uint64_t j = 1;
  while (j <= r && !detail::meets_confidence(cdf[j], alpha)) ++j;
  StoppingPlan plan{r, t, Probability::clamped(1.0 - alpha.value()), j, j == r + 1, std::nullopt};
  if (!plan.trivial) plan.estimates = recall_estimates(j, r, alpha);
  return plan;
}

/// Smallest sample size whose QBCB plan is non-trivial.
inline std::uint64_t min_sample_nontrivial(Probability t, Probability alpha,
                                           std::uint64_t max_r = 100'000'000) {
  detail::require_open_unit(t.value(), "recall goal");
  detail::require_open_unit(alpha.value(), "alpha");
  // j <= r exactly when P[X < r] = 1 - t^r reaches 1 - alpha.
  const long double log_t = std::log(static_cast<long double>(t.value()));
  for (std::uint64_t r = 1; r <= max_r; ++r) {
    const double all_found = static_cast<double>(std::exp(static_cast<long double>(r) * log_t));
    if (detail::meets_confidence(1.0 - all_found, alpha)) return r;
  }
  throw DomainError("no non-trivial sample size up to " + std::to_string(max_r));
}

/// For each ceiling, the smallest non-trivial sample size whose QBCB stopping
/// point has a one-sided upper Clopper-Pearson recall bound <= ceiling.
/// Scans upward: the bound is not monotone in r.
inline std::vector<std::uint64_t> min_samples_for_ucb_ceilings(std::span<const double> ceilings,
                                                               Probability t, Probability alpha,
                                                               std::uint64_t max_r = 1'000'000) {
  for (double c : ceilings) {
    if (!(c > t.value())) {
      throw DomainError("upper-bound ceiling " + std::to_string(c) +
                        " must exceed the recall goal " + std::to_string(t.value()));
    }
  }
  std::vector<std::uint64_t> out(ceilings.size(), 0);
  std::size_t open = ceilings.size();
  for (std::uint64_t r = min_sample_nontrivial(t, alpha); open > 0 && r <= max_r; ++r) {
    const auto cdf = detail::binomial_mass(r, t.value()).below_table();
    std::uint64_t j = 1;
    while (j <= r && !detail::meets_confidence(cdf[j], alpha)) ++j;
    if (j > r) continue;
    for (std::size_t i = 0; i < ceilings.size(); ++i) {
      if (out[i] != 0) continue;
      // ucb(j) <= c  <=>  P_c[X <= j] <= alpha, since P_u[X <= j] falls in u.
      const bool ok = ceilings[i] >= 1.0 ||
                      (j < r && detail::binomial_mass(r, std::min(ceilings[i], 1.0)).below(j + 1) <=
                                    alpha.value());
      if (ok) {
        out[i] = r;
        --open;
      }
    }
  }
  if (open > 0) throw DomainError("ceiling not reachable with r <= " + std::to_string(max_r));
  return out;
}

inline std::uint64_t min_sample_for_ucb_at_most(double ceiling, Probability t, Probability alpha,
                                                std::uint64_t max_r = 1'000'000) {
  const double c[] = {ceiling};
  return min_samples_for_ucb_ceilings(c, t, alpha, max_r).front();
}

/// Ceilings hi, hi - step, ..., down to lo (inclusive, to within step/2).
inline std::vector<double> ceiling_grid(double hi, double lo, double step) {
  if (!(step > 0.0) || hi < lo) throw DomainError("invalid ceiling grid");
  std::vector<double> out;
  const auto n = static_cast<std::uint64_t>(std::floor((hi - lo) / step + 0.5));
  for (std::uint64_t i = 0; i <= n; ++i) {
    // Round to 1e-9 so 0.99 - 13 * 0.01 prints and compares as 0.86.
    out.push_back(std::round((hi - static_cast<double>(i) * step) * 1e9) / 1e9);
  }
  return out;
}

/// Rows of a QBCB stopping-point table. Trivial sizes contribute one starred
/// row with j* = r; sizes listed in `also_starred` contribute a j* = j - 1 row
/// ahead of their QBCB row.
inline std::vector<TableRow> table_rows(Probability t, Probability alpha,
                                        std::span<const std::uint64_t> sample_sizes,
                                        std::span<const std::uint64_t> also_starred = {}) {
  std::vector<TableRow> rows;
  for (std::uint64_t r : sample_sizes) {
    if (r < 1) throw DomainError("table sample sizes must be positive");
    const StoppingPlan plan = qbcb_index(r, t, alpha);
    if (plan.trivial) {
      rows.push_back({r, r, recall_estimates(r, r, alpha), true});
      continue;
    }
    const bool extra =
        std::find(also_starred.begin(), also_starred.end(), r) != also_starred.end();
    if (extra && plan.index >= 2) {
      rows.push_back({r, plan.index - 1, recall_estimates(plan.index - 1, r, alpha), true});
    }
    rows.push_back({r, plan.index, *plan.estimates, false});
  }
  return rows;
}

/// Largest recall goal that a stop-after-all-r-found rule certifies at 1-alpha.
inline Probability target_rule_implied_goal(std::uint64_t r, Probability alpha) {
  if (r < 1) throw DomainError("target set size must be >= 1");
  detail::require_open_unit(alpha.value(), "alpha");
  return Probability::clamped(std::pow(alpha.value(), 1.0 / static_cast<double>(r)));
}

}  // namespace tarstop
