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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardmax/instance.hpp"
#include "hardmax/oracle.hpp"
#include "hardmax/vecspace.hpp"

namespace hardmax {

/// Guard threshold c/(2(sqrt(2)+sqrt(k-1))) on the inner products between
/// the unit new-direction of a query and the hidden unit directions. Both
/// vectors are unit, so no factor of B or L appears. Always < c/2.
double guard_threshold(const HardInstance& inst);

/// Everything measured about round t of a run, evaluated BEFORE the oracle
/// answer for round t is handed to the algorithm. All quantities are
/// unit-scaled: inner products use x_t/B against the unit directions.
struct RoundRecord {
  int t = 0;
  /// |<x_t/B, v_j>| for every j = 1..k (index j-1).
  std::vector<double> alignments;
  /// max of alignments over the not-yet-earned indices j >= t.
  double future_alignment = 0.0;
  /// Concealment at this round: future_alignment < c/2.
  bool concealed = false;
  /// max over j >= t of |<r, v_j>| where r is the UNIT vector along the
  /// component of x_t orthogonal to everything revealed in rounds < t;
  /// zero when x_t has no new component.
  double guard_margin = 0.0;
  /// Guard event: guard_margin < guard threshold.
  bool guard_ok = false;
};

/// Instrumentation trace for the first k rounds of a run.
struct EventTrace {
  int k = 0;
  double concealment_threshold = 0.0;  // c/2, unit scale
  double guard_threshold = 0.0;        // c/(2(sqrt(2)+sqrt(k-1)))
  std::vector<RoundRecord> rounds;

  bool concealed_all() const;
  bool guards_all() const;
};

/// Incremental orthonormal basis of the revealed information span. After
/// observing round t it holds (at most) the Gram-Schmidt directions of
/// x_1, v_1, x_2, v_2, ..., x_t, v_t in that interleaved order, with
/// in-span candidates dropped.
class ProjectionTracker {
 public:
  explicit ProjectionTracker(const HardInstance& inst);

  int rounds_observed() const noexcept { return rounds_observed_; }
  std::size_t dropped() const noexcept { return dropped_; }
  const OrthonormalBasis& basis() const noexcept { return basis_; }

  /// Records round t = rounds_observed()+1 into the trace and returns the
  /// record. Measures x_t against the span of rounds < t, then folds the
  /// x_t residual and the v_t residual into the basis. v_t enters even
  /// when the oracle's answer did not expose it, which makes recorded
  /// guard margins conservative for later rounds. When the caller already
  /// has the piece scan for x_t, passing its alignments (signed
  /// <x_t, v_j>/B, all j) avoids recomputing k inner products.
  ///
  /// Only rounds t <= inst.k are instrumented; throws std::logic_error on
  /// a round past k or a trace that is not this tracker's own, and
  /// std::invalid_argument on an x_t of the wrong dimension.
  const RoundRecord& observe_round(EventTrace& trace, const Vec& x_t,
                                   std::span<const double> alignments = {});

 private:
  const HardInstance* inst_;
  OrthonormalBasis basis_;
  int rounds_observed_ = 0;
  std::size_t dropped_ = 0;
};

/// Fresh trace with thresholds derived from the instance.
EventTrace make_trace(const HardInstance& inst);

/// Same, but with an overridden guard threshold. Exists so self-tests can
/// verify that a corrupted threshold is detectable downstream.
EventTrace make_trace_with_threshold(const HardInstance& inst,
                                     double guard_threshold_override);

/// Outcome of one implication check over a trace.
struct CheckVerdict {
  bool pass = false;
  /// TRUE when the premise never held, so the implication is vacuous on
  /// this trace. `pass` is still TRUE in that case.
  bool not_applicable = false;
  /// Round at which the implication failed, when it did.
  std::optional<int> counterexample_round;
  std::string detail;
};

/// Guards at every recorded round imply concealment at every recorded
/// round. A trace with all guard_ok but some round not concealed is a
/// counterexample (it would falsify this implementation).
CheckVerdict check_guards_imply_concealment(const EventTrace& trace);

/// At every round s <= t where concealment held, the oracle's answer must
/// have active_index <= s: pieces past the round index are all strictly
/// dominated when their alignments sit below c/2.
CheckVerdict check_active_index_containment(const EventTrace& trace,
                                            const QueryLedger& ledger, int t);

/// How much of each not-yet-earned direction already lies in the revealed
/// span: squared projection norms ||P v_j||^2 for j = t..k against the
/// inductive bound c^2 (t-1) / (2 (sqrt(2)+sqrt(k-1))^2), where t is the
/// tracker's next round and P projects onto its current basis. The bound
/// is only guaranteed when guards held at all rounds < t; a flag under
/// that premise indicates an implementation bug.
struct SpanBoundReport {
  int t = 0;
  double bound = 0.0;
  std::vector<double> squared_norms;  // entry i is j = t + i
  bool any_flag = false;
};

SpanBoundReport revealed_span_bound(const ProjectionTracker& tracker,
                                    const HardInstance& inst);

/// Per-round rows: t, guard_margin, guard_threshold, guard_ok,
/// future_alignment, concealment_threshold, concealed, active_index.
/// The ledger supplies active_index; it must cover the traced rounds.
void write_trace_csv(const EventTrace& trace, const QueryLedger& ledger,
                     std::ostream& os);

}  // namespace hardmax
