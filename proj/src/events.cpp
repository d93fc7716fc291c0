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

#include "hardmax/events.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "text_format.hpp"

namespace hardmax {

double guard_threshold(const HardInstance& inst) {
  const double denom =
      2.0 * (std::sqrt(2.0) + std::sqrt(static_cast<double>(inst.k - 1)));
  return inst.c / denom;
}

bool EventTrace::concealed_all() const {
  return std::all_of(rounds.begin(), rounds.end(),
                     [](const RoundRecord& r) { return r.concealed; });
}

bool EventTrace::guards_all() const {
  return std::all_of(rounds.begin(), rounds.end(),
                     [](const RoundRecord& r) { return r.guard_ok; });
}

EventTrace make_trace(const HardInstance& inst) {
  EventTrace trace;
  trace.k = inst.k;
  trace.concealment_threshold = inst.c / 2.0;
  trace.guard_threshold = guard_threshold(inst);
  return trace;
}

EventTrace make_trace_with_threshold(const HardInstance& inst,
                                     double guard_threshold_override) {
  EventTrace trace = make_trace(inst);
  trace.guard_threshold = guard_threshold_override;
  return trace;
}

ProjectionTracker::ProjectionTracker(const HardInstance& inst)
    : inst_(&inst), basis_(inst.d) {}

const RoundRecord& ProjectionTracker::observe_round(
    EventTrace& trace, const Vec& x_t, std::span<const double> alignments) {
  const int t = rounds_observed_ + 1;
  if (t > inst_->k)
    throw std::logic_error("observe_round: only rounds 1..k are instrumented");
  if (trace.rounds.size() != static_cast<std::size_t>(rounds_observed_))
    throw std::logic_error("observe_round: trace and tracker are out of step");
  if (x_t.size() != inst_->d)
    throw std::invalid_argument("observe_round: query dimension != d");
  const std::size_t k = static_cast<std::size_t>(inst_->k);
  if (!alignments.empty() && alignments.size() != k)
    throw std::invalid_argument("observe_round: alignments size != k");

  RoundRecord rec;
  rec.t = t;
  rec.alignments.resize(k);
  if (alignments.empty()) {
    for (std::size_t j = 0; j < k; ++j) {
      rec.alignments[j] = std::abs(dot(x_t, inst_->directions[j])) / inst_->B;
    }
  } else {
    for (std::size_t j = 0; j < k; ++j) {
      rec.alignments[j] = std::abs(alignments[j]);
    }
  }
  rec.future_alignment = 0.0;
  for (std::size_t j = static_cast<std::size_t>(t - 1); j < k; ++j) {
    rec.future_alignment = std::max(rec.future_alignment, rec.alignments[j]);
  }
  rec.concealed = rec.future_alignment < trace.concealment_threshold;

  // Guard margin against the span of rounds < t, measured before this
  // round's directions enter the basis.
  std::optional<Vec> r = basis_.residual(x_t);
  if (r) {
    for (std::size_t j = static_cast<std::size_t>(t - 1); j < k; ++j) {
      rec.guard_margin =
          std::max(rec.guard_margin, std::abs(dot(*r, inst_->directions[j])));
    }
    basis_.append(std::move(*r));
  } else {
    ++dropped_;
  }
  rec.guard_ok = rec.guard_margin < trace.guard_threshold;

  if (!basis_.append_residual(inst_->directions[static_cast<std::size_t>(t - 1)]))
    ++dropped_;

  rounds_observed_ = t;
  trace.rounds.push_back(std::move(rec));
  return trace.rounds.back();
}

CheckVerdict check_guards_imply_concealment(const EventTrace& trace) {
  CheckVerdict verdict;
  verdict.pass = true;
  // Prefix form: guards holding through round t force concealment at round t.
  // This is strictly stronger than the all-rounds implication, which it implies.
  bool premise_fired = false;
  for (const RoundRecord& rec : trace.rounds) {
    if (!rec.guard_ok) break;
    premise_fired = true;
    if (!rec.concealed) {
      verdict.pass = false;
      verdict.counterexample_round = rec.t;
      verdict.detail = "guards held through round " + std::to_string(rec.t) +
                       " but that round is not concealed (alignment " +
                       detail::decimal(rec.future_alignment) + " >= " +
                       detail::decimal(trace.concealment_threshold) + ")";
      return verdict;
    }
  }
  if (!premise_fired) {
    verdict.not_applicable = true;
    verdict.detail = trace.rounds.empty()
                         ? "no rounds recorded"
                         : "guard failed at round 1; implication is vacuous";
  }
  return verdict;
}

CheckVerdict check_active_index_containment(const EventTrace& trace,
                                            const QueryLedger& ledger, int t) {
  if (t < 1 || static_cast<std::size_t>(t) > trace.rounds.size() ||
      static_cast<std::size_t>(t) > ledger.count())
    throw std::invalid_argument("check_active_index_containment: t out of range");
  CheckVerdict verdict;
  bool premise_seen = false;
  for (int s = 1; s <= t; ++s) {
    const RoundRecord& rec = trace.rounds[static_cast<std::size_t>(s - 1)];
    if (!rec.concealed) continue;
    premise_seen = true;
    const int active = ledger.response(static_cast<std::size_t>(s - 1)).active_index;
    if (active > s) {
      verdict.pass = false;
      verdict.counterexample_round = s;
      verdict.detail = "round " + std::to_string(s) +
                       " was concealed but the oracle answered with piece " +
                       std::to_string(active);
      return verdict;
    }
  }
  verdict.pass = true;
  verdict.not_applicable = !premise_seen;
  if (verdict.not_applicable) verdict.detail = "no concealed round in 1.." + std::to_string(t);
  return verdict;
}

SpanBoundReport revealed_span_bound(const ProjectionTracker& tracker,
                                    const HardInstance& inst) {
  SpanBoundReport report;
  const int t = tracker.rounds_observed() + 1;
  report.t = t;
  const double root = std::sqrt(2.0) + std::sqrt(static_cast<double>(inst.k - 1));
  report.bound = inst.c * inst.c * static_cast<double>(t - 1) / (2.0 * root * root);

  const OrthonormalBasis& basis = tracker.basis();
  for (int j = t; j <= inst.k; ++j) {
    const Vec& v = inst.directions[static_cast<std::size_t>(j - 1)];
    double sq = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double a = dot(basis[i], v);
      sq += a * a;
    }
    report.squared_norms.push_back(sq);
    if (sq > report.bound + 1e-12) report.any_flag = true;
  }
  return report;
}

void write_trace_csv(const EventTrace& trace, const QueryLedger& ledger,
                     std::ostream& os) {
  if (ledger.count() < trace.rounds.size())
    throw std::invalid_argument("write_trace_csv: ledger shorter than trace");
  os << "t,guard_margin,guard_threshold,guard_ok,future_alignment,"
        "concealment_threshold,concealed,active_index\n";
  for (const RoundRecord& rec : trace.rounds) {
    os << rec.t << ',' << detail::decimal(rec.guard_margin) << ','
       << detail::decimal(trace.guard_threshold) << ',' << (rec.guard_ok ? 1 : 0)
       << ',' << detail::decimal(rec.future_alignment) << ','
       << detail::decimal(trace.concealment_threshold) << ','
       << (rec.concealed ? 1 : 0) << ','
       << ledger.response(static_cast<std::size_t>(rec.t - 1)).active_index
       << '\n';
  }
}

}  // namespace hardmax
