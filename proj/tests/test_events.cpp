// Copyright 2026 The hardmax Authors
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

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hardmax/events.hpp"
#include "hardmax/instance.hpp"
#include "hardmax/oracle.hpp"
#include "hardmax/optimizers.hpp"
#include "hardmax/rng.hpp"
#include "hardmax/vecspace.hpp"
#include "test_support.hpp"

using hardmax::EventTrace;
using hardmax::HardInstance;
using hardmax::ProjectionTracker;
using hardmax::QueryLedger;
using hardmax::RoundRecord;
using hardmax::Vec;
using hardmax_test::standard_instance;

TEST_CASE("guard threshold matches the closed form and is below c/2") {
  const HardInstance k4 = standard_instance(4, 8);
  CHECK(hardmax::guard_threshold(k4) == 0.009932413912368194);
  const HardInstance k1 = standard_instance(1, 2);
  CHECK(hardmax::guard_threshold(k1) == 0.17677669529663687);

  for (int k = 1; k <= 64; ++k) {
    const HardInstance inst = hardmax::build_instance(
        k, static_cast<std::size_t>(2 * k), 1.0, 1.0, 1);
    const double theta = hardmax::guard_threshold(inst);
    const double expected =
        inst.c / (2.0 * (std::sqrt(2.0) + std::sqrt(static_cast<double>(k - 1))));
    CHECK(theta == expected);
    CHECK(theta < inst.c / 2.0);
  }
}

TEST_CASE("make_trace seeds the thresholds") {
  const HardInstance inst = standard_instance(4, 8, 2.0, 0.5);
  const EventTrace trace = hardmax::make_trace(inst);
  CHECK(trace.k == 4);
  CHECK(trace.concealment_threshold == inst.c / 2.0);
  CHECK(trace.guard_threshold == hardmax::guard_threshold(inst));
  CHECK(trace.rounds.empty());
  CHECK(trace.concealed_all());
  CHECK(trace.guards_all());
}

TEST_CASE("tracker records an axis-aligned scenario exactly") {
  // Construction directions are e_1..e_4 in R^8, so every projection in
  // this scenario is exact in floating point.
  const HardInstance inst = standard_instance(4, 8);
  EventTrace trace = hardmax::make_trace(inst);
  ProjectionTracker tracker(inst);

  // Round 1: the origin. Nothing aligns, nothing leaks.
  const RoundRecord& r1 = tracker.observe_round(trace, Vec(8, 0.0));
  CHECK(r1.t == 1);
  CHECK(r1.alignments == std::vector<double>{0.0, 0.0, 0.0, 0.0});
  CHECK(r1.future_alignment == 0.0);
  CHECK(r1.concealed);
  CHECK(r1.guard_margin == 0.0);
  CHECK(r1.guard_ok);
  CHECK(tracker.basis().size() == 1);  // v_1 alone; the zero query drops
  CHECK(tracker.dropped() == 1);

  // Round 2: query the revealed direction. Fully inside the span, so the
  // guard margin is zero; only indices >= 2 count for concealment.
  Vec x2(8, 0.0);
  x2[0] = 1.0;
  const RoundRecord& r2 = tracker.observe_round(trace, x2);
  CHECK(r2.alignments[0] == 1.0);
  CHECK(r2.future_alignment == 0.0);
  CHECK(r2.concealed);
  CHECK(r2.guard_margin == 0.0);
  CHECK(r2.guard_ok);
  CHECK(tracker.basis().size() == 2);
  CHECK(tracker.dropped() == 2);

  // Round 3: a direction orthogonal to everything. New span direction,
  // but it has no overlap with any construction vector.
  Vec x3(8, 0.0);
  x3[4] = 1.0;
  const RoundRecord& r3 = tracker.observe_round(trace, x3);
  CHECK(r3.future_alignment == 0.0);
  CHECK(r3.concealed);
  CHECK(r3.guard_margin == 0.0);
  CHECK(r3.guard_ok);
  CHECK(tracker.basis().size() == 4);  // e1, e2, e5, e3
  CHECK(tracker.dropped() == 2);

  // Round 4: query an unrevealed construction direction head-on. The
  // guard and concealment must both fire.
  Vec x4(8, 0.0);
  x4[3] = 1.0;
  const RoundRecord& r4 = tracker.observe_round(trace, x4);
  CHECK(r4.future_alignment == 1.0);
  CHECK_FALSE(r4.concealed);
  CHECK(r4.guard_margin == 1.0);
  CHECK_FALSE(r4.guard_ok);
  CHECK(tracker.rounds_observed() == 4);
  CHECK(tracker.basis().size() == 5);  // v_4 arrived via the query residual
  CHECK(tracker.dropped() == 3);

  CHECK_FALSE(trace.concealed_all());
  CHECK_FALSE(trace.guards_all());
  CHECK(trace.rounds.size() == 4);
}

TEST_CASE("tracker scales alignments by the radius") {
  const HardInstance inst = standard_instance(4, 8, 1.0, 0.5);
  EventTrace trace = hardmax::make_trace(inst);
  ProjectionTracker tracker(inst);
  Vec x(8, 0.0);
  x[3] = 0.5;  // B * v_4
  const RoundRecord& r = tracker.observe_round(trace, x);
  CHECK(r.alignments[3] == 1.0);  // unit-scale alignment, not 0.5
  CHECK(r.future_alignment == 1.0);
  CHECK_FALSE(r.concealed);
}

TEST_CASE("tracker validates round order, count, and dimensions") {
  const HardInstance inst = standard_instance(2, 4);
  EventTrace trace = hardmax::make_trace(inst);
  ProjectionTracker tracker(inst);
  CHECK_THROWS_AS(tracker.observe_round(trace, Vec(3, 0.0)), std::invalid_argument);

  tracker.observe_round(trace, Vec(4, 0.0));
  EventTrace other = hardmax::make_trace(inst);
  CHECK_THROWS_AS(tracker.observe_round(other, Vec(4, 0.0)), std::logic_error);

  tracker.observe_round(trace, Vec(4, 0.0));
  CHECK_THROWS_AS(tracker.observe_round(trace, Vec(4, 0.0)), std::logic_error);
}

TEST_CASE("precomputed alignments take the same path as raw queries") {
  const HardInstance inst = hardmax::build_instance(4, 200, 1.0, 0.8, 91);
  hardmax::Rng rng(92);
  std::vector<Vec> queries;
  for (int t = 0; t < 4; ++t) queries.push_back(hardmax::sample_ball(200, 0.8, rng));

  EventTrace raw_trace = hardmax::make_trace(inst);
  ProjectionTracker raw_tracker(inst);
  EventTrace fed_trace = hardmax::make_trace(inst);
  ProjectionTracker fed_tracker(inst);
  for (const Vec& x : queries) {
    const hardmax::PieceScan scan = hardmax::scan_pieces(inst, x);
    const RoundRecord& a = raw_tracker.observe_round(raw_trace, x);
    const RoundRecord& b = fed_tracker.observe_round(fed_trace, x, scan.alignments);
    CHECK(a.alignments == b.alignments);
    CHECK(a.future_alignment == b.future_alignment);
    CHECK(a.guard_margin == b.guard_margin);
    CHECK(a.concealed == b.concealed);
  }
}

TEST_CASE("prefix checker passes honest traces and is vacuous when round 1 leaks") {
  const HardInstance inst = standard_instance(4, 8);

  EventTrace honest = hardmax::make_trace(inst);
  ProjectionTracker tracker(inst);
  tracker.observe_round(honest, Vec(8, 0.0));
  const hardmax::CheckVerdict ok = hardmax::check_guards_imply_concealment(honest);
  CHECK(ok.pass);
  CHECK_FALSE(ok.not_applicable);

  EventTrace empty = hardmax::make_trace(inst);
  const hardmax::CheckVerdict none = hardmax::check_guards_imply_concealment(empty);
  CHECK(none.pass);
  CHECK(none.not_applicable);

  // Guard broken at round 1: no prefix premise ever holds.
  EventTrace leak = hardmax::make_trace(inst);
  ProjectionTracker leak_tracker(inst);
  Vec x(8, 0.0);
  x[2] = 1.0;  // head-on into v_3
  leak_tracker.observe_round(leak, x);
  const hardmax::CheckVerdict vac = hardmax::check_guards_imply_concealment(leak);
  CHECK(vac.pass);
  CHECK(vac.not_applicable);
}

TEST_CASE("prefix checker flags a forged trace at the right round") {
  const HardInstance inst = standard_instance(4, 8);

  auto forged_round = [&](int t, bool guard_ok, bool concealed) {
    RoundRecord rec;
    rec.t = t;
    rec.alignments.assign(4, 0.0);
    rec.future_alignment = concealed ? 0.0 : inst.c;
    rec.concealed = concealed;
    rec.guard_margin = guard_ok ? 0.0 : 1.0;
    rec.guard_ok = guard_ok;
    return rec;
  };

  // Guards hold through round 2 but round 2 is not concealed.
  EventTrace t1 = hardmax::make_trace(inst);
  t1.rounds.push_back(forged_round(1, true, true));
  t1.rounds.push_back(forged_round(2, true, false));
  const hardmax::CheckVerdict v1 = hardmax::check_guards_imply_concealment(t1);
  CHECK_FALSE(v1.pass);
  CHECK(v1.counterexample_round == 2);

  // Round 1 leaks while its guard held; a later guard failure must not
  // hide that, because the premise is a prefix, not all rounds.
  EventTrace t2 = hardmax::make_trace(inst);
  t2.rounds.push_back(forged_round(1, true, false));
  t2.rounds.push_back(forged_round(2, false, true));
  const hardmax::CheckVerdict v2 = hardmax::check_guards_imply_concealment(t2);
  CHECK_FALSE(v2.pass);
  CHECK(v2.counterexample_round == 1);

  // Guard failure at round 2 cuts the premise: a leak at round 3 is not
  // a counterexample.
  EventTrace t3 = hardmax::make_trace(inst);
  t3.rounds.push_back(forged_round(1, true, true));
  t3.rounds.push_back(forged_round(2, false, true));
  t3.rounds.push_back(forged_round(3, true, false));
  const hardmax::CheckVerdict v3 = hardmax::check_guards_imply_concealment(t3);
  CHECK(v3.pass);
  CHECK_FALSE(v3.not_applicable);
}

TEST_CASE("containment checker accepts honest runs and flags shifted answers") {
  const HardInstance inst = standard_instance(4, 8);

  EventTrace trace = hardmax::make_trace(inst);
  ProjectionTracker tracker(inst);
  QueryLedger ledger;
  const Vec x(8, 0.0);
  hardmax::resisting_query(inst, ledger, x);
  tracker.observe_round(trace, x);
  const hardmax::CheckVerdict ok = hardmax::check_active_index_containment(trace, ledger, 1);
  CHECK(ok.pass);
  CHECK_FALSE(ok.not_applicable);

  // Forge the ledger answer to a later piece; round 1 is concealed, so
  // the checker must fire at round 1.
  QueryLedger forged;
  hardmax::OracleResponse resp = hardmax::resisting_response(inst, x);
  resp.active_index = 3;
  resp.subgradient = inst.directions[2];
  forged.append(x, resp);
  const hardmax::CheckVerdict bad = hardmax::check_active_index_containment(trace, forged, 1);
  CHECK_FALSE(bad.pass);
  CHECK(bad.counterexample_round == 1);

  CHECK_THROWS_AS(hardmax::check_active_index_containment(trace, ledger, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(hardmax::check_active_index_containment(trace, ledger, 2),
                  std::invalid_argument);
}

TEST_CASE("containment checker reports a vacuous premise") {
  const HardInstance inst = standard_instance(4, 8);
  EventTrace trace = hardmax::make_trace(inst);
  ProjectionTracker tracker(inst);
  QueryLedger ledger;
  Vec x(8, 0.0);
  x[3] = 1.0;  // unconcealed round: head-on into v_4
  hardmax::resisting_query(inst, ledger, x);
  tracker.observe_round(trace, x);
  const hardmax::CheckVerdict verdict =
      hardmax::check_active_index_containment(trace, ledger, 1);
  CHECK(verdict.pass);
  CHECK(verdict.not_applicable);
}

TEST_CASE("span bound report starts empty and flags a revealed direction") {
  const HardInstance inst = hardmax::build_instance(4, 64, 1.0, 1.0, 123);
  ProjectionTracker tracker(inst);
  const hardmax::SpanBoundReport before = hardmax::revealed_span_bound(tracker, inst);
  CHECK(before.t == 1);
  CHECK(before.bound == 0.0);
  CHECK(before.squared_norms == std::vector<double>{0.0, 0.0, 0.0, 0.0});
  CHECK_FALSE(before.any_flag);

  // Query straight along v_2: its residual lands in the tracker basis,
  // so the projection of the still-future v_2 is ~1, far above the bound.
  EventTrace trace = hardmax::make_trace(inst);
  Vec x = inst.directions[1];
  tracker.observe_round(trace, x);
  const hardmax::SpanBoundReport after = hardmax::revealed_span_bound(tracker, inst);
  CHECK(after.t == 2);
  CHECK(after.squared_norms.size() == 3);  // j = 2, 3, 4
  CHECK(after.squared_norms[0] > 0.99);
  CHECK(after.any_flag);
}

TEST_CASE("span bound holds along a guarded honest run") {
  // The projection bound is only promised while guards hold, which needs
  // the dimension large enough that residual alignments sit below the
  // guard threshold.
  const HardInstance inst = hardmax::build_instance(4, 100000, 1.0, 1.0, 321);
  hardmax::AlgorithmContext ctx;
  ctx.d = inst.d;
  ctx.budget = 4;
  ctx.seed = 654;
  const auto algo = hardmax::make_algorithm("subgrad-const", ctx);
  hardmax::RunOptions options;
  options.span_diagnostics = true;
  const hardmax::TrialRecord rec = hardmax::run_algorithm(inst, *algo, 4, &options);
  REQUIRE(rec.trace.guards_all());  // seed chosen so the guard event holds
  CHECK(options.span_reports.size() == 4);
  for (const hardmax::SpanBoundReport& report : options.span_reports) {
    CHECK_FALSE(report.any_flag);
  }
}

TEST_CASE("round-one guard rate at moderate dimension matches the cap oracle") {
  // At k=4 the guard threshold is ~0.993 standard deviations of a random
  // unit alignment when d = 10^4, so the all-four guard event at round
  // one holds with probability ~0.2125 (Gaussian product estimate). This
  // pins the threshold scaling: a B-scaled or doubled threshold moves
  // the rate far outside the window.
  const int trials = 400;
  int held = 0;
  for (int i = 0; i < trials; ++i) {
    const HardInstance inst = hardmax::build_instance(
        4, 10000, 1.0, 1.0, hardmax::derive_seed(7100, static_cast<std::uint64_t>(i), "instance"));
    hardmax::Rng rng(hardmax::derive_seed(7100, static_cast<std::uint64_t>(i), "algorithm"));
    const Vec x = hardmax::sample_unit_sphere(10000, rng);
    EventTrace trace = hardmax::make_trace(inst);
    ProjectionTracker tracker(inst);
    const RoundRecord& rec = tracker.observe_round(trace, x);
    if (rec.guard_ok) ++held;
  }
  const double rate = static_cast<double>(held) / trials;
  CHECK(rate > 0.2125 - 0.08);
  CHECK(rate < 0.2125 + 0.08);
}

TEST_CASE("round-one guard nearly always holds at high dimension") {
  const int trials = 100;
  int held = 0;
  for (int i = 0; i < trials; ++i) {
    const HardInstance inst = hardmax::build_instance(
        4, 300000, 1.0, 1.0, hardmax::derive_seed(7200, static_cast<std::uint64_t>(i), "instance"));
    hardmax::Rng rng(hardmax::derive_seed(7200, static_cast<std::uint64_t>(i), "algorithm"));
    const Vec x = hardmax::sample_unit_sphere(300000, rng);
    EventTrace trace = hardmax::make_trace(inst);
    ProjectionTracker tracker(inst);
    if (tracker.observe_round(trace, x).guard_ok) ++held;
  }
  CHECK(held >= 99);
}

TEST_CASE("trace CSV pairs rounds with ledger answers") {
  const HardInstance inst = standard_instance(4, 8);
  EventTrace trace = hardmax::make_trace(inst);
  ProjectionTracker tracker(inst);
  QueryLedger ledger;
  const Vec zero(8, 0.0);
  hardmax::resisting_query(inst, ledger, zero);
  tracker.observe_round(trace, zero);
  Vec x(8, 0.0);
  x[1] = 1.0;  // head-on into the unrevealed v_2: guard and concealment fail
  hardmax::resisting_query(inst, ledger, x);
  tracker.observe_round(trace, x);

  std::ostringstream os;
  hardmax::write_trace_csv(trace, ledger, os);
  const std::string text = os.str();
  CHECK(text ==
        "t,guard_margin,guard_threshold,guard_ok,future_alignment,"
        "concealment_threshold,concealed,active_index\n"
        "1,0,0.009932413912368194,1,0,0.03125,1,1\n"
        "2,1,0.009932413912368194,0,1,0.03125,0,2\n");

  QueryLedger short_ledger;
  CHECK_THROWS_AS(hardmax::write_trace_csv(trace, short_ledger, os),
                  std::invalid_argument);
}
