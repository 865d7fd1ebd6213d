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

// Combinatorial probability kernels: log binomial coefficients, binomial and
// hypergeometric lower tails, and the distribution of the k-th order
// statistic of a sample drawn without replacement from ranks {1..N}.
//
// Sums are formed from terms scaled relative to their largest member and then
// normalized by the scaled total, so nothing underflows for samples in the
// hundreds of thousands.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "tarstop/errors.hpp"
#include "tarstop/probability.hpp"

namespace tarstop {

/// Query for P[D_(k) = a] where D_(k) is the k-th smallest of n draws without
/// replacement from {1..N}.
struct OrderStatQuery {
  std::uint64_t population_size = 0;  // N
  std::uint64_t sample_size = 0;      // n
  std::uint64_t order_index = 0;      // k
  std::uint64_t value = 0;            // a

  void validate() const {
    if (!(order_index >= 1 && order_index <= sample_size && sample_size <= population_size)) {
      throw DomainError("order statistic query requires 1 <= k <= n <= N");
    }
    if (!(value >= 1 && value <= population_size)) {
      throw DomainError("order statistic value must lie in [1, N]");
    }
  }
};

/// Exact rational probability with a 64-bit numerator and denominator.
struct ExactRatio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double to_double() const noexcept {
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

namespace detail {

inline constexpr std::uint64_t kLogFactorialTableSize = 1024;
inline constexpr std::uint64_t kDirectSumLimit = 64;

inline long double log_factorial(std::uint64_t n) {
  static const auto table = [] {
    std::array<long double, kLogFactorialTableSize> t{};
    long double acc = 0.0L;
    for (std::uint64_t i = 1; i < kLogFactorialTableSize; ++i) {
      acc += std::log(static_cast<long double>(i));
      t[i] = acc;
    }
    return t;
  }();
  if (n < kLogFactorialTableSize) return table[n];
  // Stirling series for ln Gamma(x), x = n + 1 > 1024; truncation error < 1e-30.
  const long double x = static_cast<long double>(n) + 1.0L;
  const long double inv = 1.0L / x;
  const long double inv2 = inv * inv;
  const long double series =
      inv * (1.0L / 12.0L - inv2 * (1.0L / 360.0L - inv2 * (1.0L / 1260.0L - inv2 / 1680.0L)));
  return (x - 0.5L) * std::log(x) - x + 0.5L * std::log(2.0L * std::numbers::pi_v<long double>) +
         series;
}

inline long double log_choose_ld(std::uint64_t n, std::uint64_t k) {
  const std::uint64_t m = std::min(k, n - k);
  if (m == 0) return 0.0L;
  if (m <= kDirectSumLimit) {
    // Small m: avoid cancelling two huge log-factorials.
    long double acc = 0.0L;
    for (std::uint64_t i = 1; i <= m; ++i) {
      acc += std::log(static_cast<long double>(n - m + i) / static_cast<long double>(i));
    }
    return acc;
  }
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

// Normalized weights exp(l_k - max l) over a contiguous support; prefix(j)
// returns the probability mass strictly below offset j.
class ShiftedMass {
 public:
  ShiftedMass(std::uint64_t first, std::vector<long double> log_terms) : first_(first) {
    long double peak = -std::numeric_limits<long double>::infinity();
    for (auto l : log_terms) peak = std::max(peak, l);
    weights_.reserve(log_terms.size());
    for (auto l : log_terms) {
      weights_.push_back(std::exp(l - peak));
      total_ += weights_.back();
    }
  }

  /// Unnormalized linear-space weights; the shift is already applied.
  static ShiftedMass from_weights(std::uint64_t first, std::vector<long double> weights) {
    ShiftedMass m;
    m.first_ = first;
    m.weights_ = std::move(weights);
    for (auto w : m.weights_) m.total_ += w;
    return m;
  }

  std::uint64_t first() const noexcept { return first_; }
  std::uint64_t last() const noexcept { return first_ + weights_.size() - 1; }

  /// P[X < j]
  double below(std::uint64_t j) const noexcept {
    if (j <= first_) return 0.0;
    if (j > last()) return 1.0;
    long double acc = 0.0L;
    for (std::uint64_t k = first_; k < j; ++k) acc += weights_[k - first_];
    return static_cast<double>(std::clamp(acc / total_, 0.0L, 1.0L));
  }

  /// P[X >= j]
  double at_least(std::uint64_t j) const noexcept {
    if (j <= first_) return 1.0;
    if (j > last()) return 0.0;
    long double acc = 0.0L;
    for (std::uint64_t k = j; k <= last(); ++k) acc += weights_[k - first_];
    return static_cast<double>(std::clamp(acc / total_, 0.0L, 1.0L));
  }

  /// Cumulative P[X < j] for every j in [0, last()+1].
  std::vector<double> below_table() const {
    std::vector<double> out(last() + 2, 0.0);
    long double acc = 0.0L;
    for (std::uint64_t j = first_; j <= last(); ++j) {
      acc += weights_[j - first_];
      out[j + 1] = static_cast<double>(std::clamp(acc / total_, 0.0L, 1.0L));
    }
    out[last() + 1] = 1.0;
    return out;
  }

 private:
  ShiftedMass() = default;

  std::uint64_t first_ = 0;
  std::vector<long double> weights_;
  long double total_ = 0.0L;
};

inline ShiftedMass binomial_mass(std::uint64_t r, double t) {
  if (t <= 0.0) return ShiftedMass(0, {0.0L});
  if (t >= 1.0) return ShiftedMass(r, {0.0L});
  // Weights relative to the mode via the ratio C(r,k+1)/C(r,k) * t/(1-t):
  // multiplications only, flushed to zero far below long double precision.
  constexpr long double kFlush = 1e-4000L;
  const long double odds = static_cast<long double>(t) / (1.0L - static_cast<long double>(t));
  const auto mode = std::min<std::uint64_t>(
      r, static_cast<std::uint64_t>(std::floor(static_cast<long double>(r + 1) * t)));
  std::vector<long double> w(r + 1, 0.0L);
  w[mode] = 1.0L;
  for (std::uint64_t k = mode; k < r && w[k] > kFlush; ++k) {
    w[k + 1] = w[k] * static_cast<long double>(r - k) / static_cast<long double>(k + 1) * odds;
  }
  for (std::uint64_t k = mode; k > 0 && w[k] > kFlush; --k) {
    w[k - 1] = w[k] * static_cast<long double>(k) / static_cast<long double>(r - k + 1) / odds;
  }
  return ShiftedMass::from_weights(0, std::move(w));
}

// Count of population positions strictly below the t-quantile slot: ceil(tR) - 1.
inline std::uint64_t below_quantile_slots(std::uint64_t R, double t) {
  const std::uint64_t pos = ceil_count(t * static_cast<double>(R));
  return pos == 0 ? 0 : pos - 1;
}

inline ShiftedMass hypergeometric_mass(std::uint64_t R, std::uint64_t r, std::uint64_t m) {
  // X = number of the r draws landing among the m marked of R.
  if (r > R || m > R) throw DomainError("hypergeometric_mass requires r <= R and m <= R");
  const std::uint64_t unmarked = R - m;
  const std::uint64_t kmin = r > unmarked ? r - unmarked : 0;
  const std::uint64_t kmax = std::min(m, r);
  std::vector<long double> terms;
  terms.reserve(kmax - kmin + 1);
  long double l = log_choose_ld(m, kmin) + log_choose_ld(unmarked, r - kmin);
  terms.push_back(l);
  for (std::uint64_t k = kmin; k < kmax; ++k) {
    // term(k+1)/term(k) = (m-k)(r-k) / ((k+1)(unmarked-r+k+1))
    l += std::log(static_cast<long double>(m - k) * static_cast<long double>(r - k) /
                  (static_cast<long double>(k + 1) *
                   static_cast<long double>(unmarked - r + k + 1)));
    terms.push_back(l);
  }
  return ShiftedMass(kmin, std::move(terms));
}

inline std::uint64_t exact_choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    c = c * (n - i) / (i + 1);
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      throw DomainError("binomial coefficient overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(c);
}

}  // namespace detail

/// ln C(n, k).
inline double log_choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) throw DomainError("log_choose requires k <= n");
  return static_cast<double>(detail::log_choose_ld(n, k));
}

/// P[Binomial(r, t) <= j - 1], i.e. the sum over k < j of C(r,k) t^k (1-t)^(r-k).
inline Probability binomial_cdf_below(std::uint64_t r, std::uint64_t j, Probability t) {
  if (j > r + 1) throw DomainError("binomial_cdf_below requires j <= r + 1");
  if (j == 0) return Probability{};
  if (j == r + 1) return Probability::clamped(1.0);
  return Probability::clamped(detail::binomial_mass(r, t.value()).below(j));
}

/// P[Binomial(r, t) >= j].
inline Probability binomial_sf_at_least(std::uint64_t r, std::uint64_t j, Probability t) {
  if (j > r + 1) throw DomainError("binomial_sf_at_least requires j <= r + 1");
  if (j == 0) return Probability::clamped(1.0);
  if (j == r + 1) return Probability{};
  return Probability::clamped(detail::binomial_mass(r, t.value()).at_least(j));
}

/// Probability that fewer than j of r positives drawn without replacement from
/// R fall strictly below the t-quantile position ceil(tR).
inline Probability hypergeometric_cdf_below(std::uint64_t R, std::uint64_t r, Probability t,
                                            std::uint64_t j) {
  if (r > R) throw DomainError("hypergeometric_cdf_below requires r <= R");
  if (r == 0) throw DomainError("hypergeometric_cdf_below requires r >= 1");
  detail::require_open_unit(t.value(), "t");
  if (j > r + 1) throw DomainError("hypergeometric_cdf_below requires j <= r + 1");
  const auto mass = detail::hypergeometric_mass(R, r, detail::below_quantile_slots(R, t.value()));
  return Probability::clamped(mass.below(j));
}

/// P[D_(k) = a] = C(a-1, k-1) C(N-a, n-k) / C(N, n).
inline Probability order_stat_pmf(const OrderStatQuery& q) {
  q.validate();
  const auto N = q.population_size, n = q.sample_size, k = q.order_index, a = q.value;
  if (a - 1 < k - 1 || N - a < n - k) return Probability{};
  const long double l = detail::log_choose_ld(a - 1, k - 1) + detail::log_choose_ld(N - a, n - k) -
                        detail::log_choose_ld(N, n);
  return Probability::clamped(static_cast<double>(std::exp(l)));
}

/// Same probability as order_stat_pmf in exact integer arithmetic; throws
/// DomainError when C(N, n) exceeds 64 bits.
inline ExactRatio order_stat_pmf_exact(const OrderStatQuery& q) {
  q.validate();
  const auto N = q.population_size, n = q.sample_size, k = q.order_index, a = q.value;
  const std::uint64_t den = detail::exact_choose(N, n);
  if (a - 1 < k - 1 || N - a < n - k) return {0, den};
  const unsigned __int128 num = static_cast<unsigned __int128>(detail::exact_choose(a - 1, k - 1)) *
                                detail::exact_choose(N - a, n - k);
  return {static_cast<std::uint64_t>(num), den};
}

/// E[D_(k)] = k (N + 1) / (n + 1).
inline double order_stat_mean(std::uint64_t N, std::uint64_t n, std::uint64_t k) {
  if (!(k >= 1 && k <= n && n <= N)) {
    throw DomainError("order_stat_mean requires 1 <= k <= n <= N");
  }
  return static_cast<double>(k) * static_cast<double>(N + 1) / static_cast<double>(n + 1);
}

}  // namespace tarstop
