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
#include <stdexcept>
#include <string>

namespace tarstop {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data violates a structural invariant (ranks, samples, records).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rule configuration cannot produce a meaningful stop.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sample lacks the order statistics an estimator needs.
class InsufficientSampleError : public DataError {
 public:
  using DataError::DataError;
};

/// Requested more sampled positives than the record contains.
class InfeasibleSampleError : public DataError {
 public:
  using DataError::DataError;
};

/// Record document failed schema validation.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line, std::string field)
      : DataError(what), line_(line), field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// A single replication failed; carries the seed so it can be rerun alone.
class ReplicationError : public std::runtime_error {
 public:
  ReplicationError(const std::string& what, std::uint64_t rep, std::uint64_t seed)
      : std::runtime_error(what), rep_(rep), seed_(seed) {}

  std::uint64_t rep() const noexcept { return rep_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t rep_;
  std::uint64_t seed_;
};

}  // namespace tarstop
