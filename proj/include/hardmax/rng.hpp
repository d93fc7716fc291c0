// Copyright 2026 The hardmax Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hardmax {

/// Seed for one named substream of one trial.
///
/// Formula (stable across versions, relied on for reproducibility):
///   seed = base_seed XOR splitmix64(splitmix64(fnv1a64(role)) + index)
/// Roles in use: "instance" (drawing the hidden directions) and
/// "algorithm" (an algorithm's private randomness).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index,
                          std::string_view role);

/// Deterministic random stream. One Rng per logical user (instance draw,
/// algorithm, probe sampler); streams are never shared between trials.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  /// Uniform in [0, 1).
  double uniform() { return uniform_(gen_); }
  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace hardmax
