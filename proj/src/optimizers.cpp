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

#include "hardmax/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace hardmax {
namespace {

void project_to_ball(Vec& x, double radius) {
  const double n = norm(x);
  if (n > radius) scale(x, radius / n);
}

/// Projected subgradient with the constant step B/(L sqrt(T)) tuned to the
/// known budget T. Starts at the center of the ball.
class SubgradConst final : public Algorithm {
 public:
  explicit SubgradConst(const AlgorithmContext& ctx)
      : radius_(ctx.B),
        step_(ctx.B / (ctx.L * std::sqrt(static_cast<double>(std::max(1, ctx.budget))))),
        z_(ctx.d, 0.0) {}

  std::string name() const override { return "subgrad-const"; }
  Vec next_query(int) override { return z_; }
  void observe(int, const OracleResponse& resp) override {
    axpy(-step_, resp.subgradient, z_);
    project_to_ball(z_, radius_);
  }

 private:
  double radius_;
  double step_;
  Vec z_;
};

/// Projected subgradient with decaying step B/(L sqrt(s)). Odd rounds
/// query the iterate z_s and drive the update; even rounds query the
/// running average of the iterates so far, so the averaged value is
/// measured through the oracle rather than asserted.
class SubgradAvg final : public Algorithm {
 public:
  explicit SubgradAvg(const AlgorithmContext& ctx)
      : lipschitz_(ctx.L), radius_(ctx.B), z_(ctx.d, 0.0), sum_(ctx.d, 0.0) {}

  std::string name() const override { return "subgrad-avg"; }

  Vec next_query(int t) override {
    if (t % 2 == 1) {
      axpy(1.0, z_, sum_);
      ++count_;
      return z_;
    }
    Vec avg = sum_;
    scale(avg, 1.0 / static_cast<double>(count_));
    // The average of feasible points is feasible; the projection only
    // trims accumulated roundoff.
    project_to_ball(avg, radius_);
    return avg;
  }

  void observe(int t, const OracleResponse& resp) override {
    if (t % 2 == 0) return;  // probe round; no update
    const int s = (t + 1) / 2;
    const double step = radius_ / (lipschitz_ * std::sqrt(static_cast<double>(s)));
    axpy(-step, resp.subgradient, z_);
    project_to_ball(z_, radius_);
  }

 private:
  double lipschitz_;
  double radius_;
  Vec z_;
  Vec sum_;
  int count_ = 0;
};

/// A fresh uniform point on the radius-B sphere every round, from the
/// algorithm's private stream. Ignores all oracle feedback.
class RandomSearch final : public Algorithm {
 public:
  explicit RandomSearch(const AlgorithmContext& ctx)
      : radius_(ctx.B), d_(ctx.d), rng_(ctx.seed) {}

  std::string name() const override { return "random-search"; }
  Vec next_query(int) override {
    Vec x = sample_unit_sphere(d_, rng_);
    scale(x, radius_);
    return x;
  }
  void observe(int, const OracleResponse&) override {}

 private:
  double radius_;
  std::size_t d_;
  Rng rng_;
};

/// Span-restricted: queries the negated normalized sum of an orthonormal
/// basis of the returned subgradients; the center while the span is empty.
class SpanGreedy final : public Algorithm {
 public:
  explicit SpanGreedy(const AlgorithmContext& ctx)
      : radius_(ctx.B), basis_(ctx.d) {}

  std::string name() const override { return "span-greedy"; }

  Vec next_query(int) override {
    if (basis_.empty()) return Vec(basis_.dim(), 0.0);
    Vec x(basis_.dim(), 0.0);
    for (std::size_t i = 0; i < basis_.size(); ++i) axpy(1.0, basis_[i], x);
    // An orthonormal sum has norm sqrt(m) exactly, never zero here.
    scale(x, -radius_ / norm(x));
    return x;
  }

  void observe(int, const OracleResponse& resp) override {
    basis_.append_residual(resp.subgradient);
  }

 private:
  double radius_;
  OrthonormalBasis basis_;
};

/// Span direction plus one fresh random unit direction per round: probes
/// whether guessing new coordinates helps beyond the revealed span.
class SpanHybrid final : public Algorithm {
 public:
  explicit SpanHybrid(const AlgorithmContext& ctx)
      : radius_(ctx.B), d_(ctx.d), basis_(ctx.d), rng_(ctx.seed) {}

  std::string name() const override { return "span-hybrid"; }

  Vec next_query(int) override {
    Vec x = sample_unit_sphere(d_, rng_);
    for (std::size_t i = 0; i < basis_.size(); ++i) axpy(1.0, basis_[i], x);
    const double n = norm(x);
    if (n < 1e-12) {
      // The random direction canceled the span sum (measure zero); fall
      // back to the fresh direction alone.
      Vec u = sample_unit_sphere(d_, rng_);
      scale(u, radius_);
      return u;
    }
    scale(x, -radius_ / n);
    return x;
  }

  void observe(int, const OracleResponse& resp) override {
    basis_.append_residual(resp.subgradient);
  }

 private:
  double radius_;
  std::size_t d_;
  OrthonormalBasis basis_;
  Rng rng_;
};

struct RegistryEntry {
  const char* name;
  AlgorithmFactory factory;
};

const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> entries = {
      {"subgrad-const",
       [](const AlgorithmContext& ctx) -> std::unique_ptr<Algorithm> {
         return std::make_unique<SubgradConst>(ctx);
       }},
      {"subgrad-avg",
       [](const AlgorithmContext& ctx) -> std::unique_ptr<Algorithm> {
         return std::make_unique<SubgradAvg>(ctx);
       }},
      {"random-search",
       [](const AlgorithmContext& ctx) -> std::unique_ptr<Algorithm> {
         return std::make_unique<RandomSearch>(ctx);
       }},
      {"span-greedy",
       [](const AlgorithmContext& ctx) -> std::unique_ptr<Algorithm> {
         return std::make_unique<SpanGreedy>(ctx);
       }},
      {"span-hybrid",
       [](const AlgorithmContext& ctx) -> std::unique_ptr<Algorithm> {
         return std::make_unique<SpanHybrid>(ctx);
       }},
  };
  return entries;
}

}  // namespace

std::vector<std::string> algorithm_names() {
  std::vector<std::string> names;
  for (const RegistryEntry& e : registry()) names.emplace_back(e.name);
  return names;
}

bool is_algorithm_name(const std::string& name) {
  for (const RegistryEntry& e : registry()) {
    if (name == e.name) return true;
  }
  return false;
}

std::unique_ptr<Algorithm> make_algorithm(const std::string& name,
                                          const AlgorithmContext& ctx) {
  for (const RegistryEntry& e : registry()) {
    if (name == e.name) return e.factory(ctx);
  }
  throw std::invalid_argument("unknown algorithm: " + name);
}

TrialRecord run_algorithm(const HardInstance& inst, Algorithm& algo,
                          int budget, RunOptions* options) {
  if (budget < 1) throw std::invalid_argument("run_algorithm: budget must be >= 1");
  RunOptions local_options;
  RunOptions& opt = options != nullptr ? *options : local_options;

  TrialRecord rec;
  rec.algo = algo.name();
  rec.budget = budget;
  const ReferenceSolution ref = reference_solution(inst);
  rec.success_cutoff = ref.f_x_hat + inst.eps();
  rec.trace = make_trace(inst);

  QueryLedger ledger;
  ProjectionTracker tracker(inst);

  for (int t = 1; t <= budget; ++t) {
    const Vec x = algo.next_query(t);
    if (opt.span_diagnostics && t <= inst.k) {
      opt.span_reports.push_back(revealed_span_bound(tracker, inst));
    }
    PieceScan scan;
    const OracleResponse resp = resisting_query(inst, ledger, x, &scan);
    if (t <= inst.k) {
      tracker.observe_round(rec.trace, x, scan.alignments);
    }

    if (t == 1 || resp.value < rec.best_value) {
      rec.best_value = resp.value;
      rec.best_round = t;
    }
    if (!rec.first_value_success_round && resp.value <= rec.success_cutoff) {
      rec.success_value = true;
      rec.first_value_success_round = t;
    }
    if (!rec.first_cert_success_round &&
        detail::witness_from_alignments(inst, scan.alignments) == 0) {
      rec.success_cert = true;
      rec.first_cert_success_round = t;
    }

    algo.observe(t, resp);
  }

  const int instrumented = std::min(budget, inst.k);
  if (instrumented >= 1) {
    const CheckVerdict verdict =
        check_active_index_containment(rec.trace, ledger, instrumented);
    rec.index_containment = verdict.pass;
    rec.index_violation_round = verdict.counterexample_round;
  }

  if (opt.keep_ledger) rec.ledger = std::move(ledger);
  return rec;
}

TrialRecord run_named_algorithm(const HardInstance& inst,
                                const std::string& name, int budget,
                                std::uint64_t algo_seed, RunOptions* options) {
  AlgorithmContext ctx;
  ctx.d = inst.d;
  ctx.L = inst.L;
  ctx.B = inst.B;
  ctx.budget = budget;
  ctx.seed = algo_seed;
  std::unique_ptr<Algorithm> algo = make_algorithm(name, ctx);
  return run_algorithm(inst, *algo, budget, options);
}

}  // namespace hardmax
