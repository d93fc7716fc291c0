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

#include "hardmax/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "hardmax/events.hpp"
#include "hardmax/instance.hpp"
#include "hardmax/oracle.hpp"
#include "text_format.hpp"

namespace hardmax {
namespace {

// 97.5th percentile of the standard normal; pins the 95% two-sided level.
constexpr double kWilsonZ = 1.959963984540054;

struct TrialOutcome {
  bool success_value = false;
  bool success_cert = false;
  bool concealed = false;
  bool guards = false;
  bool containment = true;
  int first_success = 0;  // budget+1 when the trial never succeeded
};

TrialOutcome run_one_trial(const ExperimentConfig& cfg, int trial_index) {
  const int budget = cfg.effective_budget();
  const std::uint64_t inst_seed =
      derive_seed(cfg.base_seed, static_cast<std::uint64_t>(trial_index), "instance");
  const std::uint64_t algo_seed =
      derive_seed(cfg.base_seed, static_cast<std::uint64_t>(trial_index), "algorithm");
  const HardInstance inst = build_instance(cfg.k, cfg.d, cfg.L, cfg.B, inst_seed);
  RunOptions options;
  options.keep_ledger = false;
  const TrialRecord rec =
      run_named_algorithm(inst, cfg.algo, budget, algo_seed, &options);

  TrialOutcome out;
  out.success_value = rec.success_value;
  out.success_cert = rec.success_cert;
  out.concealed = rec.trace.concealed_all();
  out.guards = rec.trace.guards_all();
  out.containment = rec.index_containment;
  out.first_success = rec.first_value_success_round.value_or(budget + 1);
  return out;
}

SummaryStats summarize(const ExperimentConfig& cfg,
                       std::vector<TrialOutcome> outcomes) {
  const int budget = cfg.effective_budget();
  SummaryStats stats;
  stats.config = cfg;
  stats.trials = static_cast<int>(outcomes.size());

  double first_sum = 0.0;
  int first_count = 0;
  for (const TrialOutcome& out : outcomes) {
    stats.success_value_count += out.success_value ? 1 : 0;
    stats.success_cert_count += out.success_cert ? 1 : 0;
    stats.concealed_count += out.concealed ? 1 : 0;
    stats.guards_count += out.guards ? 1 : 0;
    stats.index_violations += out.containment ? 0 : 1;
    stats.first_success_rounds.push_back(out.first_success);
    if (out.first_success <= budget) {
      first_sum += out.first_success;
      ++first_count;
    }
  }
  std::sort(stats.first_success_rounds.begin(), stats.first_success_rounds.end());

  stats.mean_first_success =
      first_count > 0 ? first_sum / first_count
                      : std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = stats.first_success_rounds.size();
  if (n % 2 == 1) {
    stats.median_first_success = stats.first_success_rounds[n / 2];
  } else {
    stats.median_first_success = 0.5 * (stats.first_success_rounds[n / 2 - 1] +
                                        stats.first_success_rounds[n / 2]);
  }

  const double trials = static_cast<double>(stats.trials);
  stats.success_frac_value = stats.success_value_count / trials;
  stats.success_frac_cert = stats.success_cert_count / trials;
  stats.concealed_frac = stats.concealed_count / trials;
  stats.success_value_interval =
      wilson_interval(stats.success_value_count, stats.trials);
  stats.concealed_interval = wilson_interval(stats.concealed_count, stats.trials);
  stats.concealment_bound = concealment_probability_bound(cfg.k, cfg.d);
  stats.expected_query_reference = 15.0 / 16.0 * static_cast<double>(cfg.k);
  return stats;
}

void run_indexed(int count, int threads, ProgressFn& progress,
                 const std::function<void(int)>& body) {
  int n_threads = threads > 0
                      ? threads
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = std::min(n_threads, count);
  if (n_threads <= 1) {
    for (int i = 0; i < count; ++i) {
      body(i);
      if (progress) progress(i + 1, count);
    }
    return;
  }

  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex mu;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
      const int completed = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(mu);
        progress(completed, count);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

Interval wilson_interval(int successes, int trials) {
  if (trials < 1) throw std::invalid_argument("wilson_interval: trials must be >= 1");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_interval: successes out of range");
  const double n = trials;
  const double p = successes / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double center = p + z2 / (2.0 * n);
  const double radius =
      kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return Interval{(center - radius) / denom, (center + radius) / denom};
}

void ExperimentConfig::validate() const {
  if (k < 1) throw std::invalid_argument("config: k must be >= 1");
  if (d < 2 * static_cast<std::size_t>(k))
    throw std::invalid_argument("config: d must be >= 2k");
  if (!(L > 0.0) || !(B > 0.0))
    throw std::invalid_argument("config: L and B must be positive");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (budget < 0) throw std::invalid_argument("config: budget must be >= 0");
  if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
  if (!is_algorithm_name(algo))
    throw std::invalid_argument("config: unknown algorithm '" + algo + "'");
}

SummaryStats run_trial_batch(const ExperimentConfig& cfg, ProgressFn progress) {
  cfg.validate();
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
  run_indexed(cfg.trials, cfg.threads, progress, [&](int i) {
    outcomes[static_cast<std::size_t>(i)] = run_one_trial(cfg, i);
  });
  return summarize(cfg, std::move(outcomes));
}

double concealment_probability_bound(int k, std::size_t d) {
  if (k < 1) throw std::invalid_argument("concealment_probability_bound: k must be >= 1");
  const double kd = static_cast<double>(k);
  const double eps_unit = 1.0 / (2.0 * std::sqrt(kd));
  const double c = eps_unit / kd;
  const double room = static_cast<double>(d) - 2.0 * kd + 1.0;
  return 1.0 - kd * kd * std::exp(-c * c * room / (40.0 * kd));
}

CapResult cap_probability_experiment(std::size_t d_prime, double tau,
                                     int samples, Rng& rng) {
  if (d_prime < 2)
    throw std::invalid_argument("cap_probability_experiment: d_prime must be >= 2");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("cap_probability_experiment: tau must be positive");
  if (samples < 1)
    throw std::invalid_argument("cap_probability_experiment: samples must be >= 1");

  CapResult result;
  result.analytic_bound =
      std::exp(-tau * tau * (static_cast<double>(d_prime) - 1.0) / 2.0);
  if (tau >= 1.0) {
    // A unit vector's coordinate cannot exceed 1; the cap is empty.
    result.empirical = 0.0;
    return result;
  }
  int hits = 0;
  for (int i = 0; i < samples; ++i) {
    const Vec u = sample_unit_sphere(d_prime, rng);
    if (std::abs(u[0]) >= tau) ++hits;
  }
  result.empirical = static_cast<double>(hits) / static_cast<double>(samples);
  return result;
}

bool SuiteReport::pass() const {
  return std::all_of(items.begin(), items.end(),
                     [](const SuiteItem& it) { return it.pass; });
}

int SuiteReport::failures() const {
  return static_cast<int>(std::count_if(
      items.begin(), items.end(), [](const SuiteItem& it) { return !it.pass; }));
}

namespace {

void log_item(std::ostream* log, const SuiteItem& item) {
  if (log == nullptr) return;
  *log << (item.pass ? "  [ok]   " : "  [FAIL] ") << item.name << ": "
       << item.detail << '\n';
}

void add_item(SuiteReport& report, std::ostream* log, SuiteItem item) {
  log_item(log, item);
  report.items.push_back(std::move(item));
}

std::uint64_t suite_seed(std::uint64_t base, int item, const char* suite) {
  return derive_seed(base, static_cast<std::uint64_t>(item),
                     std::string("suite-") + suite);
}

void run_lipschitz_suite(SuiteReport& report, int trials, std::uint64_t seed,
                         std::ostream* log) {
  struct Case {
    int k;
    double L;
    double B;
  };
  const Case cases[] = {{1, 1.0, 1.0}, {4, 1.0, 1.0}, {16, 1.0, 1.0},
                        {4, 2.5, 0.5}};
  const std::size_t d = 1024;
  int item_index = 0;
  for (const Case& cs : cases) {
    const std::uint64_t s = suite_seed(seed, item_index++, "lipschitz");
    const HardInstance inst = build_instance(cs.k, d, cs.L, cs.B, s);
    Rng rng(derive_seed(s, 1, "probes"));
    double worst = 0.0;
    int violations = 0;
    for (int i = 0; i < trials; ++i) {
      const Vec x = sample_ball(d, cs.B, rng);
      const Vec y = sample_ball(d, cs.B, rng);
      Vec diff = x;
      axpy(-1.0, y, diff);
      const double dist = norm(diff);
      const double gap = std::abs(evaluate(inst, x) - evaluate(inst, y));
      if (dist > 0.0) worst = std::max(worst, gap / (cs.L * dist));
      if (gap > cs.L * dist * (1.0 + 1e-9)) ++violations;
    }
    SuiteItem item;
    item.name = "lipschitz k=" + std::to_string(cs.k) + " L=" +
                detail::decimal(cs.L) + " B=" + detail::decimal(cs.B);
    item.pass = violations == 0;
    item.detail = std::to_string(trials) + " pairs, " +
                  std::to_string(violations) + " violations, max |gap|/(L*dist) = " +
                  detail::decimal(worst);
    add_item(report, log, std::move(item));
  }
}

void run_subgradient_suite(SuiteReport& report, int trials, std::uint64_t seed,
                           std::ostream* log) {
  const std::size_t d = 1024;
  const int probes_per_query = 16;
  int item_index = 0;
  for (int k : {1, 4, 16}) {
    const std::uint64_t s = suite_seed(seed, item_index++, "subgradient");
    const HardInstance inst = build_instance(k, d, 1.0, 1.0, s);
    Rng rng(derive_seed(s, 1, "probes"));
    int violations = 0;
    for (int i = 0; i < trials; ++i) {
      const Vec x = sample_ball(d, inst.B, rng);
      const OracleResponse resp = resisting_response(inst, x);
      if (!subgradient_validity_check(inst, x, resp, probes_per_query, rng))
        ++violations;
    }
    SuiteItem item;
    item.name = "subgradient-inequality k=" + std::to_string(k);
    item.pass = violations == 0;
    item.detail = std::to_string(trials) + " queries x " +
                  std::to_string(probes_per_query) + " probes, " +
                  std::to_string(violations) + " violations";
    add_item(report, log, std::move(item));
  }

  // Fault injection: a doubled subgradient must be rejected by probing.
  {
    const std::uint64_t s = suite_seed(seed, item_index++, "subgradient");
    const HardInstance inst = build_instance(4, d, 1.0, 1.0, s);
    Rng rng(derive_seed(s, 1, "probes"));
    const Vec x = sample_ball(d, inst.B, rng);
    OracleResponse resp = resisting_response(inst, x);
    scale(resp.subgradient, 2.0);
    const bool ok = subgradient_validity_check(inst, x, resp, std::max(trials, 200), rng);
    SuiteItem item;
    item.name = "subgradient-selftest doubled-gradient";
    item.pass = !ok;
    item.detail = item.pass ? "violation detected as expected"
                            : "doubled subgradient slipped through";
    add_item(report, log, std::move(item));
  }
}

void run_concealment_implication_suite(SuiteReport& report, int trials,
                                       std::uint64_t seed, std::ostream* log) {
  // Honest runs: mixed algorithms at a dimension large enough that the
  // guard premise actually holds in most runs.
  {
    const int k = 4;
    const std::size_t d = 100000;
    const std::vector<std::string> algos = algorithm_names();
    const std::uint64_t s = suite_seed(seed, 0, "lemma1");
    int premise_runs = 0;
    int counterexamples = 0;
    const int runs = std::max(trials, 25);
    for (int i = 0; i < runs; ++i) {
      const HardInstance inst = build_instance(
          k, d, 1.0, 1.0, derive_seed(s, static_cast<std::uint64_t>(i), "instance"));
      RunOptions options;
      options.keep_ledger = false;
      const TrialRecord rec = run_named_algorithm(
          inst, algos[static_cast<std::size_t>(i) % algos.size()], k,
          derive_seed(s, static_cast<std::uint64_t>(i), "algorithm"), &options);
      const CheckVerdict verdict = check_guards_imply_concealment(rec.trace);
      if (!verdict.not_applicable) ++premise_runs;
      if (!verdict.pass) ++counterexamples;
    }
    SuiteItem item;
    item.name = "guards-imply-concealment honest-runs";
    item.pass = counterexamples == 0;
    item.detail = std::to_string(runs) + " runs, premise held in " +
                  std::to_string(premise_runs) + ", counterexamples " +
                  std::to_string(counterexamples);
    add_item(report, log, std::move(item));
  }

  // Sensitivity: a forged trace with guards passing and concealment
  // broken must be flagged.
  {
    const HardInstance inst = build_instance(4, 64, 1.0, 1.0,
                                             suite_seed(seed, 1, "lemma1"));
    EventTrace trace = make_trace(inst);
    RoundRecord rec;
    rec.t = 1;
    rec.alignments.assign(static_cast<std::size_t>(inst.k), inst.c);
    rec.future_alignment = inst.c;  // at the full c, twice the threshold
    rec.concealed = false;
    rec.guard_margin = 0.0;
    rec.guard_ok = true;
    trace.rounds.push_back(std::move(rec));
    const CheckVerdict verdict = check_guards_imply_concealment(trace);
    SuiteItem item;
    item.name = "guards-imply-concealment selftest forged-trace";
    item.pass = !verdict.pass && verdict.counterexample_round == 1;
    item.detail = item.pass ? "forged trace flagged as expected"
                            : "forged trace was not flagged";
    add_item(report, log, std::move(item));
  }

  // Fault injection on the threshold: doubling the guard threshold can
  // let unconcealed runs through as "all guards held". Reported, not
  // asserted: whether it fires depends on the draw.
  {
    const int k = 4;
    const std::size_t d = 4500;
    const std::uint64_t s = suite_seed(seed, 2, "lemma1");
    int fired = 0;
    const int runs = std::max(trials / 2, 25);
    for (int i = 0; i < runs; ++i) {
      const HardInstance inst = build_instance(
          k, d, 1.0, 1.0, derive_seed(s, static_cast<std::uint64_t>(i), "instance"));
      EventTrace trace = make_trace_with_threshold(inst, 2.0 * guard_threshold(inst));
      ProjectionTracker tracker(inst);
      QueryLedger ledger;
      AlgorithmContext ctx;
      ctx.d = d;
      ctx.L = 1.0;
      ctx.B = 1.0;
      ctx.budget = k;
      ctx.seed = derive_seed(s, static_cast<std::uint64_t>(i), "algorithm");
      const std::unique_ptr<Algorithm> algo = make_algorithm("span-hybrid", ctx);
      for (int t = 1; t <= k; ++t) {
        const Vec x = algo->next_query(t);
        const OracleResponse resp = resisting_query(inst, ledger, x);
        tracker.observe_round(trace, x);
        algo->observe(t, resp);
      }
      if (!check_guards_imply_concealment(trace).pass) ++fired;
    }
    SuiteItem item;
    item.name = "guards-imply-concealment selftest doubled-threshold";
    item.pass = true;  // informational: the corrupted threshold MAY fire
    item.detail = "checker fired in " + std::to_string(fired) + " of " +
                  std::to_string(runs) + " corrupted-threshold runs";
    add_item(report, log, std::move(item));
  }
}

void run_containment_suite(SuiteReport& report, int trials, std::uint64_t seed,
                           std::ostream* log) {
  // Honest runs: the oracle may never answer with a piece index past the
  // round number while the round is concealed.
  {
    const int k = 4;
    const std::size_t d = 10000;
    const std::vector<std::string> algos = algorithm_names();
    const std::uint64_t s = suite_seed(seed, 0, "lemma2");
    int counterexamples = 0;
    const int runs = std::max(trials, 25);
    for (int i = 0; i < runs; ++i) {
      const HardInstance inst = build_instance(
          k, d, 1.0, 1.0, derive_seed(s, static_cast<std::uint64_t>(i), "instance"));
      RunOptions options;
      options.keep_ledger = false;
      const TrialRecord rec = run_named_algorithm(
          inst, algos[static_cast<std::size_t>(i) % algos.size()], k,
          derive_seed(s, static_cast<std::uint64_t>(i), "algorithm"), &options);
      if (!rec.index_containment) ++counterexamples;
    }
    SuiteItem item;
    item.name = "active-index-containment honest-runs";
    item.pass = counterexamples == 0;
    item.detail = std::to_string(runs) + " runs, counterexamples " +
                  std::to_string(counterexamples);
    add_item(report, log, std::move(item));
  }

  // Fault injection: an oracle answering with the next piece up must trip
  // the checker at round 1, where the zero query is always concealed.
  {
    const HardInstance inst = build_instance(4, 64, 1.0, 1.0,
                                             suite_seed(seed, 1, "lemma2"));
    EventTrace trace = make_trace(inst);
    ProjectionTracker tracker(inst);
    QueryLedger ledger;
    const Vec x(inst.d, 0.0);
    const PieceScan scan = scan_pieces(inst, x);
    OracleResponse resp = resisting_response(inst, x);
    const int shifted = std::min(resp.active_index + 1, inst.k);
    resp.active_index = shifted;
    resp.subgradient = inst.directions[static_cast<std::size_t>(shifted - 1)];
    scale(resp.subgradient, inst.L);
    ledger.append(x, resp);
    tracker.observe_round(trace, x, scan.alignments);
    const CheckVerdict verdict = check_active_index_containment(trace, ledger, 1);
    SuiteItem item;
    item.name = "active-index-containment selftest shifted-oracle";
    item.pass = !verdict.pass && verdict.counterexample_round == 1;
    item.detail = item.pass ? "shifted oracle answer flagged as expected"
                            : "shifted oracle answer was not flagged";
    add_item(report, log, std::move(item));
  }
}

void run_cap_suite(SuiteReport& report, int trials, std::uint64_t seed,
                   std::ostream* log) {
  // Main bound check; the analytic bound sits ~3x above the true cap
  // probability here, so sampling noise has ample room.
  {
    const int samples = std::max(trials, 2000);
    Rng rng(suite_seed(seed, 0, "cap"));
    const CapResult res = cap_probability_experiment(2000, 0.05, samples, rng);
    SuiteItem item;
    item.name = "cap-bound d'=2000 tau=0.05";
    item.pass = res.empirical <= res.analytic_bound * 1.25;
    item.detail = std::to_string(samples) + " samples, empirical " +
                  detail::decimal(res.empirical) + ", bound " +
                  detail::decimal(res.analytic_bound);
    add_item(report, log, std::move(item));
  }

  // tau at or above 1: the cap is empty.
  {
    Rng rng(suite_seed(seed, 1, "cap"));
    const CapResult res = cap_probability_experiment(5, 1.0, 100, rng);
    SuiteItem item;
    item.name = "cap-empty tau=1";
    item.pass = res.empirical == 0.0;
    item.detail = "empirical " + detail::decimal(res.empirical);
    add_item(report, log, std::move(item));
  }

  // Two dimensions: |<u, e1>| >= sqrt(2)/2 covers exactly half the circle.
  {
    const int samples = std::max(trials, 2000);
    Rng rng(suite_seed(seed, 2, "cap"));
    const CapResult res =
        cap_probability_experiment(2, std::sqrt(2.0) / 2.0, samples, rng);
    const double tol = std::max(0.05, 4.0 / std::sqrt(static_cast<double>(samples)));
    SuiteItem item;
    item.name = "cap-arc d'=2 tau=sqrt(2)/2";
    item.pass = std::abs(res.empirical - 0.5) <= tol;
    item.detail = std::to_string(samples) + " samples, empirical " +
                  detail::decimal(res.empirical) + ", expected 0.5 +/- " +
                  detail::decimal(tol);
    add_item(report, log, std::move(item));
  }

  // Invalid tau must be rejected.
  {
    Rng rng(suite_seed(seed, 3, "cap"));
    bool threw = false;
    try {
      cap_probability_experiment(10, 0.0, 10, rng);
    } catch (const std::invalid_argument&) {
      threw = true;
    }
    SuiteItem item;
    item.name = "cap-invalid tau=0";
    item.pass = threw;
    item.detail = threw ? "rejected as expected" : "accepted invalid tau";
    add_item(report, log, std::move(item));
  }
}

}  // namespace

std::vector<std::string> verification_suite_names() {
  return {"lipschitz", "subgradient", "lemma1", "lemma2", "cap", "all"};
}

SuiteReport run_verification_suite(const std::string& suite, int trials,
                                   std::uint64_t base_seed, std::ostream* log) {
  if (trials < 1)
    throw std::invalid_argument("run_verification_suite: trials must be >= 1");
  SuiteReport report;
  report.suite = suite;
  if (log != nullptr) *log << "suite " << suite << " (trials " << trials << ")\n";
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "lipschitz") {
    run_lipschitz_suite(report, trials, base_seed, log);
    known = true;
  }
  if (all || suite == "subgradient") {
    run_subgradient_suite(report, trials, base_seed, log);
    known = true;
  }
  if (all || suite == "lemma1") {
    run_concealment_implication_suite(report, trials, base_seed, log);
    known = true;
  }
  if (all || suite == "lemma2") {
    run_containment_suite(report, trials, base_seed, log);
    known = true;
  }
  if (all || suite == "cap") {
    run_cap_suite(report, trials, base_seed, log);
    known = true;
  }
  if (!known)
    throw std::invalid_argument("run_verification_suite: unknown suite '" + suite + "'");
  return report;
}

std::vector<SummaryStats> run_sweep(const SweepConfig& cfg,
                                    std::ostream* warnings,
                                    ProgressFn progress) {
  if (cfg.k_list.empty() || cfg.d_list.empty())
    throw std::invalid_argument("run_sweep: k_list and d_list must be non-empty");

  // Cell seeds key off the full-grid position so adding or removing other
  // grid points never reshuffles an existing cell's draw.
  struct Cell {
    int k;
    std::size_t d;
    std::uint64_t cell_index;
  };
  std::vector<Cell> cells;
  std::uint64_t index = 0;
  for (int k : cfg.k_list) {
    for (std::size_t d : cfg.d_list) {
      if (d < 2 * static_cast<std::size_t>(k)) {
        if (warnings != nullptr) {
          *warnings << "sweep: skipping k=" << k << " d=" << d
                    << " (requires d >= 2k)\n";
        }
      } else {
        cells.push_back(Cell{k, d, index});
      }
      ++index;
    }
  }

  const int total_trials = static_cast<int>(cells.size()) * cfg.trials;
  int done_trials = 0;
  std::vector<SummaryStats> rows;
  rows.reserve(cells.size());
  for (const Cell& cell : cells) {
    ExperimentConfig cell_cfg;
    cell_cfg.k = cell.k;
    cell_cfg.d = cell.d;
    cell_cfg.L = cfg.L;
    cell_cfg.B = cfg.B;
    cell_cfg.algo = cfg.algo;
    cell_cfg.budget = cfg.budget;
    cell_cfg.trials = cfg.trials;
    cell_cfg.threads = cfg.threads;
    cell_cfg.base_seed = derive_seed(cfg.base_seed, cell.cell_index, "sweep-cell");
    ProgressFn inner;
    if (progress) {
      inner = [&](int completed, int) { progress(done_trials + completed, total_trials); };
    }
    rows.push_back(run_trial_batch(cell_cfg, inner));
    done_trials += cfg.trials;
  }
  return rows;
}

void write_stats_csv(std::span<const SummaryStats> rows, std::ostream& os) {
  os << "k,d,L,B,algo,trials,budget,success_frac_value,success_frac_cert,"
        "P_E_hat,P_E_bound,seed\n";
  for (const SummaryStats& s : rows) {
    const ExperimentConfig& c = s.config;
    os << c.k << ',' << c.d << ',' << detail::decimal(c.L) << ','
       << detail::decimal(c.B) << ',' << c.algo << ',' << s.trials << ','
       << c.effective_budget() << ',' << detail::decimal(s.success_frac_value)
       << ',' << detail::decimal(s.success_frac_cert) << ','
       << detail::decimal(s.concealed_frac) << ','
       << detail::decimal(s.concealment_bound) << ',' << c.base_seed << '\n';
  }
}

void write_stats_csv_file(std::span<const SummaryStats> rows,
                          const std::string& path) {
  std::ofstream os(path, std::ios::trunc | std::ios::binary);
  if (!os) throw std::runtime_error("write_stats_csv_file: cannot open " + path);
  write_stats_csv(rows, os);
  if (!os) throw std::runtime_error("write_stats_csv_file: write failed for " + path);
}

void write_stats_json(std::span<const SummaryStats> rows, std::ostream& os) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const SummaryStats& s : rows) {
    const ExperimentConfig& c = s.config;
    nlohmann::ordered_json row;
    row["k"] = c.k;
    row["d"] = c.d;
    row["L"] = c.L;
    row["B"] = c.B;
    row["algo"] = c.algo;
    row["trials"] = s.trials;
    row["budget"] = c.effective_budget();
    row["success_frac_value"] = s.success_frac_value;
    row["success_frac_cert"] = s.success_frac_cert;
    row["P_E_hat"] = s.concealed_frac;
    row["P_E_bound"] = s.concealment_bound;
    row["seed"] = c.base_seed;
    row["success_value_count"] = s.success_value_count;
    row["success_cert_count"] = s.success_cert_count;
    row["concealed_count"] = s.concealed_count;
    row["guards_count"] = s.guards_count;
    row["index_violations"] = s.index_violations;
    row["success_value_interval"] = {s.success_value_interval.lo,
                                     s.success_value_interval.hi};
    row["concealed_interval"] = {s.concealed_interval.lo, s.concealed_interval.hi};
    if (std::isnan(s.mean_first_success)) {
      row["mean_first_success"] = nullptr;
    } else {
      row["mean_first_success"] = s.mean_first_success;
    }
    row["median_first_success"] = s.median_first_success;
    row["expected_query_reference"] = s.expected_query_reference;
    arr.push_back(std::move(row));
  }
  os << arr.dump(2) << '\n';
}

void write_stats_json_file(std::span<const SummaryStats> rows,
                           const std::string& path) {
  std::ofstream os(path, std::ios::trunc | std::ios::binary);
  if (!os) throw std::runtime_error("write_stats_json_file: cannot open " + path);
  write_stats_json(rows, os);
  if (!os) throw std::runtime_error("write_stats_json_file: write failed for " + path);
}

}  // namespace hardmax
