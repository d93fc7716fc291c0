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

// Command-line front end. Exit codes: 0 pass, 1 checker counterexample or
// runtime failure, 2 usage error.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hardmax/harness.hpp"
#include "hardmax/instance.hpp"
#include "hardmax/optimizers.hpp"
#include "hardmax/rng.hpp"

namespace {

// "--config FILE" support. CLI11 only processes config files registered on
// the top-level command, so subcommand configs are expanded here before
// parsing: each "key=value" line becomes a "--key=value" token appended to
// the argument list, skipping keys the command line already sets explicitly.
// Keys are the long option names of the invoked subcommand, without dashes.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  std::vector<std::string> out;
  out.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 == args.size())
        throw std::invalid_argument("--config: missing file path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(std::string("--config=").size());
    } else {
      out.push_back(args[i]);
    }
  }
  if (path.empty()) return out;

  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);

  std::vector<std::string> explicit_names;
  for (const std::string& arg : out) {
    if (arg.rfind("--", 0) == 0)
      explicit_names.push_back(arg.substr(2, arg.find('=') - 2));
  }

  const auto trim = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };

  std::map<std::string, std::string> values;  // last assignment wins
  std::vector<std::string> order;             // tokens appended in file order
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
    if (stripped[0] == '[')
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  ": sections are not supported");
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key=value: " + stripped);
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " has an empty key");
    if (values.emplace(key, value).second) order.push_back(key);
    else values[key] = value;
  }
  for (const std::string& key : order) {
    if (std::find(explicit_names.begin(), explicit_names.end(), key) ==
        explicit_names.end()) {
      out.push_back("--" + key + "=" + values.at(key));
    }
  }
  return out;
}

hardmax::ProgressFn stderr_progress(int total, bool quiet) {
  if (quiet || total < 2) return {};
  const int stride = std::max(1, total / 10);
  return [stride](int completed, int t) {
    if (completed % stride == 0 || completed == t) {
      std::cerr << "progress " << completed << '/' << t << '\n';
    }
  };
}

void print_batch_summary(const hardmax::SummaryStats& stats) {
  const hardmax::ExperimentConfig& cfg = stats.config;
  std::cout << "algo=" << cfg.algo << " k=" << cfg.k << " d=" << cfg.d
            << " L=" << cfg.L << " B=" << cfg.B << " trials=" << stats.trials
            << " budget=" << cfg.effective_budget() << '\n';
  std::cout << "  success_frac_value=" << stats.success_frac_value << " [95% "
            << stats.success_value_interval.lo << ", "
            << stats.success_value_interval.hi << "]\n";
  std::cout << "  success_frac_cert=" << stats.success_frac_cert << '\n';
  std::cout << "  P_E_hat=" << stats.concealed_frac << " [95% "
            << stats.concealed_interval.lo << ", " << stats.concealed_interval.hi
            << "]  P_E_bound=" << stats.concealment_bound << '\n';
  std::cout << "  guards_frac=" << (static_cast<double>(stats.guards_count) /
                                    static_cast<double>(stats.trials))
            << " median_first_success=" << stats.median_first_success
            << " (budget+1 when never)  reference_queries="
            << stats.expected_query_reference << '\n';
  if (stats.index_violations > 0) {
    std::cout << "  CHECKER: active-index containment failed in "
              << stats.index_violations << " trials\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adversarial max-of-linear instances, resisting oracle, and "
               "first-order algorithm experiments"};
  app.require_subcommand(1);
  int exit_code = 0;
  // Help-only sink: expand_config consumes "--config FILE" before parsing.
  std::string config_path;

  // gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "draw an instance and write it to disk");
  gen->add_option("--config", config_path,
                  "read key=value defaults (explicit flags override)");
  int gen_k = 4;
  std::uint64_t gen_d = 64;
  double gen_L = 1.0;
  double gen_B = 1.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--k", gen_k, "number of linear pieces")->required();
  gen->add_option("--d", gen_d, "ambient dimension (>= 2k)")->required();
  gen->add_option("--L", gen_L, "Lipschitz constant");
  gen->add_option("--B", gen_B, "domain radius");
  gen->add_option("--seed", gen_seed, "instance seed");
  gen->add_option("--out", gen_out, "output JSON path")->required();
  gen->callback([&]() {
    const hardmax::HardInstance inst = hardmax::build_instance(
        gen_k, static_cast<std::size_t>(gen_d), gen_L, gen_B, gen_seed);
    hardmax::save_instance(inst, gen_out);
    std::cout << "wrote instance k=" << inst.k << " d=" << inst.d
              << " L=" << inst.L << " B=" << inst.B << " seed=" << inst.seed
              << " eps=" << inst.eps() << " to " << gen_out << '\n';
  });

  // run ----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "run Monte Carlo trials of one algorithm");
  run->add_option("--config", config_path,
                  "read key=value defaults (explicit flags override)");
  std::string run_mode = "lower_bound";
  std::string run_algo = "subgrad-const";
  int run_k = 4;
  std::uint64_t run_d = 64;
  double run_L = 1.0;
  double run_B = 1.0;
  int run_budget = 0;
  int run_trials = 100;
  std::uint64_t run_seed = 0;
  double run_tau = 0.05;
  int run_threads = 0;
  bool run_quiet = false;
  std::string run_csv;
  std::string run_json;
  run->add_option("--mode", run_mode, "experiment mode")
      ->check(CLI::IsMember({"lower_bound", "upper_bound", "cap_check",
                             "lemma_suite"}));
  run->add_option("--algo", run_algo, "algorithm name")
      ->check(CLI::IsMember(hardmax::algorithm_names()));
  run->add_option("--k", run_k, "number of linear pieces");
  run->add_option("--d", run_d, "ambient dimension (cap_check: sphere dimension)");
  run->add_option("--L", run_L, "Lipschitz constant");
  run->add_option("--B", run_B, "domain radius");
  run->add_option("--budget", run_budget, "queries per trial (0 means k)");
  run->add_option("--trials", run_trials, "trial count (cap_check: samples)");
  run->add_option("--seed", run_seed, "base seed");
  run->add_option("--tau", run_tau, "cap threshold (cap_check only)");
  run->add_option("--threads", run_threads, "worker threads (0 means auto)");
  run->add_option("--csv", run_csv, "write stats CSV to this path");
  run->add_option("--json", run_json, "write stats JSON to this path");
  run->add_flag("--quiet", run_quiet, "suppress progress lines on stderr");
  run->callback([&]() {
    if (run_mode == "cap_check") {
      hardmax::Rng rng(run_seed);
      const hardmax::CapResult res = hardmax::cap_probability_experiment(
          static_cast<std::size_t>(run_d), run_tau, run_trials, rng);
      std::cout << "cap d'=" << run_d << " tau=" << run_tau
                << " samples=" << run_trials << " empirical=" << res.empirical
                << " bound=" << res.analytic_bound << '\n';
      if (!run_csv.empty()) {
        std::ofstream os(run_csv, std::ios::trunc | std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + run_csv);
        os << "d_prime,tau,samples,empirical,analytic_bound,seed\n"
           << run_d << ',' << run_tau << ',' << run_trials << ','
           << res.empirical << ',' << res.analytic_bound << ',' << run_seed
           << '\n';
      }
      if (res.empirical > res.analytic_bound * 1.25) exit_code = 1;
      return;
    }
    if (run_mode == "lemma_suite") {
      const hardmax::SuiteReport report =
          hardmax::run_verification_suite("all", run_trials, run_seed, &std::cout);
      std::cout << (report.pass() ? "suite PASS" : "suite FAIL") << " ("
                << report.items.size() << " items, " << report.failures()
                << " failures)\n";
      if (!report.pass()) exit_code = 1;
      return;
    }
    hardmax::ExperimentConfig cfg;
    cfg.k = run_k;
    cfg.d = static_cast<std::size_t>(run_d);
    cfg.L = run_L;
    cfg.B = run_B;
    cfg.algo = run_algo;
    cfg.budget = run_budget;
    cfg.trials = run_trials;
    cfg.base_seed = run_seed;
    cfg.threads = run_threads;
    const hardmax::SummaryStats stats =
        hardmax::run_trial_batch(cfg, stderr_progress(cfg.trials, run_quiet));
    print_batch_summary(stats);
    const std::span<const hardmax::SummaryStats> rows(&stats, 1);
    if (!run_csv.empty()) hardmax::write_stats_csv_file(rows, run_csv);
    if (!run_json.empty()) hardmax::write_stats_json_file(rows, run_json);
    if (stats.index_violations > 0) exit_code = 1;
  });

  // verify ---------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "run a checker suite");
  verify->add_option("--config", config_path,
                     "read key=value defaults (explicit flags override)");
  std::string verify_suite = "all";
  int verify_trials = 200;
  std::uint64_t verify_seed = 0;
  verify->add_option("--suite", verify_suite, "which suite to run")
      ->check(CLI::IsMember(hardmax::verification_suite_names()));
  verify->add_option("--trials", verify_trials, "randomized checks per item");
  verify->add_option("--seed", verify_seed, "base seed");
  verify->callback([&]() {
    const hardmax::SuiteReport report = hardmax::run_verification_suite(
        verify_suite, verify_trials, verify_seed, &std::cout);
    std::cout << (report.pass() ? "suite PASS" : "suite FAIL") << " ("
              << report.items.size() << " items, " << report.failures()
              << " failures)\n";
    if (!report.pass()) exit_code = 1;
  });

  // sweep ----------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "run a (k, d) grid for one algorithm");
  sweep->add_option("--config", config_path,
                    "read key=value defaults (explicit flags override)");
  std::vector<int> sweep_k;
  std::vector<std::uint64_t> sweep_d;
  std::string sweep_algo = "random-search";
  int sweep_trials = 50;
  int sweep_budget = 0;
  double sweep_L = 1.0;
  double sweep_B = 1.0;
  std::uint64_t sweep_seed = 0;
  int sweep_threads = 0;
  bool sweep_quiet = false;
  std::string sweep_csv;
  std::string sweep_json;
  sweep->add_option("--k-list", sweep_k, "k values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--d-list", sweep_d, "d values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--algo", sweep_algo, "algorithm name")
      ->check(CLI::IsMember(hardmax::algorithm_names()));
  sweep->add_option("--trials", sweep_trials, "trials per cell");
  sweep->add_option("--budget", sweep_budget, "queries per trial (0 means k)");
  sweep->add_option("--L", sweep_L, "Lipschitz constant");
  sweep->add_option("--B", sweep_B, "domain radius");
  sweep->add_option("--seed", sweep_seed, "base seed");
  sweep->add_option("--threads", sweep_threads, "worker threads (0 means auto)");
  sweep->add_option("--csv", sweep_csv, "write one row per cell to this path")
      ->required();
  sweep->add_option("--json", sweep_json, "write stats JSON to this path");
  sweep->add_flag("--quiet", sweep_quiet, "suppress progress lines on stderr");
  sweep->callback([&]() {
    hardmax::SweepConfig cfg;
    cfg.k_list = sweep_k;
    cfg.d_list.assign(sweep_d.begin(), sweep_d.end());
    cfg.algo = sweep_algo;
    cfg.trials = sweep_trials;
    cfg.budget = sweep_budget;
    cfg.L = sweep_L;
    cfg.B = sweep_B;
    cfg.base_seed = sweep_seed;
    cfg.threads = sweep_threads;
    const int cells = static_cast<int>(sweep_k.size() * sweep_d.size());
    const std::vector<hardmax::SummaryStats> rows = hardmax::run_sweep(
        cfg, &std::cerr, stderr_progress(cells * sweep_trials, sweep_quiet));
    if (rows.empty())
      throw CLI::ValidationError("sweep", "no valid (k, d) cells (all need d >= 2k)");
    hardmax::write_stats_csv_file(rows, sweep_csv);
    if (!sweep_json.empty()) hardmax::write_stats_json_file(rows, sweep_json);
    std::cout << "wrote " << rows.size() << " rows to " << sweep_csv << '\n';
    int violations = 0;
    for (const hardmax::SummaryStats& s : rows) violations += s.index_violations;
    if (violations > 0) {
      std::cout << "CHECKER: active-index containment failed in " << violations
                << " trials\n";
      exit_code = 1;
    }
  });

  try {
    std::vector<std::string> args =
        expand_config(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());  // App::parse consumes from the back
    app.parse(std::move(args));
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_code;
}
