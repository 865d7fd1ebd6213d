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
#include <span>
#include <string>
#include <vector>

#include "tarstop/errors.hpp"
#include "tarstop/probability.hpp"

namespace tarstop {

/// A completed one-phase review: the review-order position (A-rank) of every
/// relevant document in a collection of N documents.
class RankRecord {
 public:
  RankRecord(std::uint64_t collection_size, std::vector<std::uint64_t> positive_ranks,
             std::uint64_t batch_size = 0)
      : n_(collection_size), positives_(std::move(positive_ranks)), batch_size_(batch_size) {
    if (n_ == 0) throw DataError("collection size must be positive");
    if (positives_.empty()) throw DataError("record needs at least one positive");
    for (std::size_t i = 0; i < positives_.size(); ++i) {
      const auto p = positives_[i];
      if (p < 1 || p > n_) {
        throw DataError("positive rank " + std::to_string(p) + " outside [1, " +
                        std::to_string(n_) + "]");
      }
      if (i > 0 && p == positives_[i - 1]) {
        throw DataError("duplicate positive rank " + std::to_string(p));
      }
      if (i > 0 && p < positives_[i - 1]) {
        throw DataError("positive ranks must be ascending");
      }
    }
  }

  std::uint64_t collection_size() const noexcept { return n_; }
  std::span<const std::uint64_t> positive_ranks() const noexcept { return positives_; }
  std::uint64_t positive_count() const noexcept { return positives_.size(); }
  std::uint64_t batch_size() const noexcept { return batch_size_; }

  std::uint64_t batch_count() const noexcept {
    return batch_size_ == 0 ? 0 : (n_ + batch_size_ - 1) / batch_size_;
  }

  /// 1-based batch containing `rank`; 0 for rank 0.
  std::uint64_t batch_of(std::uint64_t rank) const noexcept {
    return batch_size_ == 0 ? 0 : (rank + batch_size_ - 1) / batch_size_;
  }

  /// Last rank reviewed when batch `b` completes.
  std::uint64_t batch_end(std::uint64_t b) const noexcept {
    return std::min(n_, b * batch_size_);
  }

  /// Positives with A-rank <= rank.
  std::uint64_t found_by(std::uint64_t rank) const noexcept {
    return static_cast<std::uint64_t>(
        std::upper_bound(positives_.begin(), positives_.end(), rank) - positives_.begin());
  }

  bool is_positive(std::uint64_t rank) const noexcept {
    return std::binary_search(positives_.begin(), positives_.end(), rank);
  }

  friend bool operator==(const RankRecord&, const RankRecord&) = default;

 private:
  std::uint64_t n_;
  std::vector<std::uint64_t> positives_;
  std::uint64_t batch_size_;
};

/// A-rank of the ceil(tR)-th positive: the earliest stop with recall >= t.
inline std::uint64_t t_quantile_rank(const RankRecord& record, Probability t) {
  if (!(t.value() > 0.0)) throw DomainError("quantile level must be > 0");
  const auto R = record.positive_count();
  const auto idx = std::clamp<std::uint64_t>(
      detail::ceil_count(t.value() * static_cast<double>(R)), 1, R);
  return record.positive_ranks()[idx - 1];
}

/// Whether stopping at `rank` reaches recall t (i.e. rank >= t_quantile_rank).
inline bool goal_met(const RankRecord& record, std::uint64_t rank, Probability t) {
  return rank >= t_quantile_rank(record, t);
}

inline Probability recall_at(const RankRecord& record, std::uint64_t rank) {
  if (rank > record.collection_size()) throw DomainError("rank beyond collection size");
  return Probability::clamped(static_cast<double>(record.found_by(rank)) /
                              static_cast<double>(record.positive_count()));
}

}  // namespace tarstop
