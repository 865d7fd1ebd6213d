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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tarstop/errors.hpp"
#include "tarstop/probability.hpp"
#include "tarstop/random.hpp"
#include "tarstop/record.hpp"

namespace tarstop {

enum class SyntheticFamily { Uniform, GeometricDecay, AllRelevant };

inline std::string_view to_string(SyntheticFamily f) noexcept {
  switch (f) {
    case SyntheticFamily::Uniform: return "uniform";
    case SyntheticFamily::GeometricDecay: return "geometric";
    case SyntheticFamily::AllRelevant: return "all-relevant";
  }
  return "?";
}

inline std::optional<SyntheticFamily> parse_family(std::string_view name) noexcept {
  for (auto f : {SyntheticFamily::Uniform, SyntheticFamily::GeometricDecay,
                 SyntheticFamily::AllRelevant}) {
    if (name == to_string(f)) return f;
  }
  return std::nullopt;
}

/// Generator for stand-in review trajectories. GeometricDecay front-loads
/// positives the way an effective prioritized review does; smaller decay is a
/// harder category.
struct SyntheticModel {
  SyntheticFamily family = SyntheticFamily::Uniform;
  std::uint64_t collection_size = 0;
  double prevalence = 0.0;
  double decay = 1.0;

  void validate() const {
    if (collection_size == 0) throw DomainError("collection size must be positive");
    if (family == SyntheticFamily::AllRelevant) return;
    if (!(prevalence > 0.0 && prevalence <= 1.0)) {
      throw DomainError("prevalence must lie in (0,1]");
    }
    if (static_cast<double>(collection_size) * prevalence < 1.0) {
      throw DomainError("expected positive count N * prevalence must be >= 1");
    }
    if (family == SyntheticFamily::GeometricDecay && !(decay > 0.0)) {
      throw DomainError("decay must be > 0");
    }
  }
};

namespace detail {

inline std::vector<std::uint64_t> uniform_positions(std::uint64_t N, std::uint64_t k, Rng& rng) {
  // Selection sampling: scans ranks in order, so output is already sorted.
  std::vector<std::uint64_t> out;
  out.reserve(k);
  for (std::uint64_t a = 1; a <= N && out.size() < k; ++a) {
    if (uniform_below(rng, N - a + 1) < k - out.size()) out.push_back(a);
  }
  return out;
}

// Inclusion probabilities min(1, c w_a) with w_a = exp(-decay a / N), with c
// chosen so they sum to N * prevalence.
inline std::vector<double> decay_inclusion(std::uint64_t N, double prevalence, double decay) {
  std::vector<double> w(N);
  for (std::uint64_t a = 1; a <= N; ++a) {
    w[a - 1] = std::exp(-decay * static_cast<double>(a) / static_cast<double>(N));
  }
  const double target = static_cast<double>(N) * prevalence;
  auto mass = [&](double c) {
    long double s = 0.0L;
    for (double x : w) s += std::min(1.0, c * x);
    return static_cast<double>(s);
  };
  double lo = 0.0, hi = 1.0 / w.back();
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) < target ? lo : hi) = mid;
  }
  for (double& x : w) x = std::min(1.0, hi * x);
  return w;
}

}  // namespace detail

/// Deterministic in (model, seed).
inline RankRecord gen_synthetic(const SyntheticModel& model, std::uint64_t seed,
                                std::uint64_t batch_size = 0) {
  model.validate();
  const auto N = model.collection_size;
  switch (model.family) {
    case SyntheticFamily::AllRelevant: {
      std::vector<std::uint64_t> all(N);
      for (std::uint64_t a = 0; a < N; ++a) all[a] = a + 1;
      return RankRecord(N, std::move(all), batch_size);
    }
    case SyntheticFamily::Uniform: {
      Rng rng(seed);
      const auto k = detail::floor_count(static_cast<double>(N) * model.prevalence);
      return RankRecord(N, detail::uniform_positions(N, k, rng), batch_size);
    }
    case SyntheticFamily::GeometricDecay: {
      const auto p = detail::decay_inclusion(N, model.prevalence, model.decay);
      // Redraw on the (rare) empty outcome; attempt index keeps it deterministic.
      for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
        Rng rng(derive_seed(seed, attempt));
        std::vector<std::uint64_t> pos;
        for (std::uint64_t a = 1; a <= N; ++a) {
          if (uniform_unit(rng) < p[a - 1]) pos.push_back(a);
        }
        if (!pos.empty()) return RankRecord(N, std::move(pos), batch_size);
      }
      throw DataError("geometric model produced no positives in 1000 attempts");
    }
  }
  throw DomainError("unknown synthetic family");
}

}  // namespace tarstop
