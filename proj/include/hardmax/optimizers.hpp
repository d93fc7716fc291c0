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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hardmax/events.hpp"
#include "hardmax/instance.hpp"
#include "hardmax/oracle.hpp"
#include "hardmax/rng.hpp"
#include "hardmax/vecspace.hpp"

namespace hardmax {

/// A first-order method driven round by round. next_query() may use only
/// past oracle responses (fed back through observe); the harness owns the
/// oracle and never lets an algorithm touch the instance.
class Algorithm {
 public:
  virtual ~Algorithm() = default;
  virtual std::string name() const = 0;
  /// Query for round t (1-based). Must satisfy ||x|| <= B.
  virtual Vec next_query(int t) = 0;
  /// Feeds back the oracle's answer to the round-t query.
  virtual void observe(int t, const OracleResponse& response) = 0;
};

/// Geometry an algorithm is allowed to know up front: dimension, radius,
/// Lipschitz constant, query budget, and a private random stream.
struct AlgorithmContext {
  std::size_t d = 0;
  double L = 1.0;
  double B = 1.0;
  int budget = 0;
  std::uint64_t seed = 0;  // base for the algorithm's private stream
};

using AlgorithmFactory =
    std::function<std::unique_ptr<Algorithm>(const AlgorithmContext&)>;

/// Name -> factory registry. Names accepted by make_algorithm:
///   subgrad-const   projected subgradient, constant step B/(L sqrt(budget))
///   subgrad-avg     projected subgradient, decaying step B/(L sqrt(s));
///                   odd rounds query the iterate, even rounds probe the
///                   running average so its value passes through the oracle
///   random-search   fresh uniform point on the radius-B sphere each round
///   span-greedy     queries from the span of returned subgradients
///   span-hybrid     span direction mixed with a fresh random direction
std::vector<std::string> algorithm_names();
bool is_algorithm_name(const std::string& name);
std::unique_ptr<Algorithm> make_algorithm(const std::string& name,
                                          const AlgorithmContext& ctx);

/// Everything recorded about one algorithm-vs-instance run.
struct TrialRecord {
  std::string algo;
  int budget = 0;
  /// Best value seen at any query, and the round it occurred.
  double best_value = 0.0;
  int best_round = 0;
  /// f(x_hat) + eps, the success threshold used for success_value.
  double success_cutoff = 0.0;
  /// Some query achieved value <= f(x_hat) + eps, and the first round
  /// where that happened.
  bool success_value = false;
  std::optional<int> first_value_success_round;
  /// Some query carried no witness of eps-suboptimality (certificate
  /// form), and the first round where that happened.
  bool success_cert = false;
  std::optional<int> first_cert_success_round;
  /// Events instrumentation over rounds 1..min(budget, k).
  EventTrace trace;
  /// Active-index containment held at every instrumented round.
  bool index_containment = true;
  std::optional<int> index_violation_round;
  /// Full query history (heavy; drop it for bulk statistics).
  QueryLedger ledger;
};

struct RunOptions {
  bool keep_ledger = true;
  /// Also compute the revealed-span projection diagnostic before each
  /// instrumented round.
  bool span_diagnostics = false;
  std::vector<SpanBoundReport> span_reports;  // filled when enabled
};

/// Runs `algo` against the resisting oracle on `inst` for `budget` rounds,
/// instrumenting events for rounds <= k. Success is measured against the
/// instance's advertised accuracy eps = L * B * eps_unit.
TrialRecord run_algorithm(const HardInstance& inst, Algorithm& algo,
                          int budget, RunOptions* options = nullptr);

/// Convenience: build the named algorithm and run it.
TrialRecord run_named_algorithm(const HardInstance& inst,
                                const std::string& name, int budget,
                                std::uint64_t algo_seed,
                                RunOptions* options = nullptr);

}  // namespace hardmax
