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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hardmax/optimizers.hpp"
#include "hardmax/rng.hpp"

namespace hardmax {

/// 95% Wilson score interval for a binomial proportion.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

Interval wilson_interval(int successes, int trials);

/// One Monte Carlo batch: `trials` independent (instance, algorithm) pairs
/// at fixed (k, d, L, B). Trial i draws its instance seed and its
/// algorithm seed from base_seed via derive_seed, so results do not
/// depend on thread count or scheduling.
struct ExperimentConfig {
  int k = 4;
  std::size_t d = 0;
  double L = 1.0;
  double B = 1.0;
  std::string algo = "subgrad-const";
  int budget = 0;  // 0 means k
  int trials = 1;
  std::uint64_t base_seed = 0;
  int threads = 0;  // 0 means hardware concurrency

  int effective_budget() const { return budget > 0 ? budget : k; }
  /// Throws std::invalid_argument unless trials >= 1, d >= 2k, k >= 1,
  /// L > 0, B > 0, and algo names a registered algorithm.
  void validate() const;
};

/// Aggregates over one batch. Fractions and intervals are precomputed so
/// emitters never redo arithmetic.
struct SummaryStats {
  ExperimentConfig config;

  int trials = 0;
  int success_value_count = 0;  // some query reached f(x_hat) + eps
  int success_cert_count = 0;   // some query had no suboptimality witness
  int concealed_count = 0;      // trace concealed at every round <= k
  int guards_count = 0;         // guard event held at every round <= k
  int index_violations = 0;     // trials where containment failed

  /// Per trial, the first round with a value success; budget+1 when the
  /// trial never succeeded. Sorted ascending.
  std::vector<int> first_success_rounds;
  /// Mean first-success round over successful trials only; NaN if none.
  double mean_first_success = 0.0;
  /// Median of first_success_rounds (failures included as budget+1).
  double median_first_success = 0.0;

  double success_frac_value = 0.0;
  double success_frac_cert = 0.0;
  double concealed_frac = 0.0;  // empirical concealment probability
  Interval success_value_interval;
  Interval concealed_interval;

  /// Analytic concealment bound 1 - k^2 exp(-c^2 (d-2k+1) / (40 k)).
  double concealment_bound = 0.0;
  /// Reference expected query count (15/16) k.
  double expected_query_reference = 0.0;
};

using ProgressFn = std::function<void(int completed, int total)>;

SummaryStats run_trial_batch(const ExperimentConfig& cfg,
                             ProgressFn progress = {});

/// The analytic concealment bound, computed exactly as displayed:
/// 1 - k^2 exp(-c^2 (d - 2k + 1) / (40 k)) with c = 1/(2 k^{3/2}).
/// Negative for small d; not clamped.
double concealment_probability_bound(int k, std::size_t d);

/// Fraction of uniform unit vectors in R^d_prime whose first coordinate
/// exceeds tau in absolute value, against the bound exp(-tau^2 (d'-1)/2).
struct CapResult {
  double empirical = 0.0;
  double analytic_bound = 0.0;
};

/// Requires d_prime >= 2, tau > 0, samples >= 1. tau >= 1 is allowed
/// (the cap is empty and empirical comes back 0).
CapResult cap_probability_experiment(std::size_t d_prime, double tau,
                                     int samples, Rng& rng);

/// One named check inside a verification suite. For fault-injection
/// self-tests, pass means the corresponding checker DID fire.
struct SuiteItem {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<SuiteItem> items;
  bool pass() const;
  int failures() const;
};

/// Suites: "lipschitz", "subgradient", "lemma1", "lemma2", "cap", "all".
/// `trials` scales the randomized checks; log (when given) receives one
/// line per item. Throws std::invalid_argument for an unknown suite.
SuiteReport run_verification_suite(const std::string& suite, int trials,
                                   std::uint64_t base_seed,
                                   std::ostream* log = nullptr);

std::vector<std::string> verification_suite_names();

/// Grid of batches over k_list x d_list for one algorithm. Cells with
/// d < 2k are skipped with a warning line (they violate the instance
/// precondition). Cell index c uses base seed derive_seed(base_seed, c,
/// "sweep-cell").
struct SweepConfig {
  std::vector<int> k_list;
  std::vector<std::size_t> d_list;
  std::string algo = "random-search";
  int trials = 1;
  int budget = 0;  // 0 means k per cell
  double L = 1.0;
  double B = 1.0;
  std::uint64_t base_seed = 0;
  int threads = 0;
};

std::vector<SummaryStats> run_sweep(const SweepConfig& cfg,
                                    std::ostream* warnings = nullptr,
                                    ProgressFn progress = {});

/// CSV schema, one row per batch:
///   k,d,L,B,algo,trials,budget,success_frac_value,success_frac_cert,
///   P_E_hat,P_E_bound,seed
/// Floats are shortest round-trip decimals; identical inputs produce
/// byte-identical output.
void write_stats_csv(std::span<const SummaryStats> rows, std::ostream& os);
void write_stats_csv_file(std::span<const SummaryStats> rows,
                          const std::string& path);

/// Same content plus counts, intervals, and first-success statistics,
/// as a JSON array with a fixed key order.
void write_stats_json(std::span<const SummaryStats> rows, std::ostream& os);
void write_stats_json_file(std::span<const SummaryStats> rows,
                           const std::string& path);

}  // namespace hardmax
