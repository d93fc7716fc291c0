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
#include <vector>

#include "hardmax/instance.hpp"
#include "hardmax/rng.hpp"
#include "hardmax/vecspace.hpp"

namespace hardmax {

/// One first-order oracle answer: the function value and the subgradient
/// L * v_ell for the active (minimal maximizing) piece index ell.
struct OracleResponse {
  double value = 0.0;
  Vec subgradient;
  int active_index = 0;  // 1-based piece index in [1, k]
};

/// Full query history of one run. Queries are appended only after passing
/// the oracle's feasibility check; rejected queries leave it unchanged.
class QueryLedger {
 public:
  std::size_t count() const noexcept { return queries_.size(); }
  bool empty() const noexcept { return queries_.empty(); }

  /// 0-based access; entry i is round i+1.
  const Vec& query(std::size_t i) const { return queries_.at(i); }
  const OracleResponse& response(std::size_t i) const { return responses_.at(i); }
  const OracleResponse& last_response() const { return responses_.back(); }

  void append(Vec query, OracleResponse response);

 private:
  std::vector<Vec> queries_;
  std::vector<OracleResponse> responses_;
};

/// The resisting oracle's answer at x, without touching any ledger.
///
/// Among the valid subgradients Conv{ v_j : j maximizes <x,v_j>/B - j*c }
/// it always returns the single vector L * v_ell for the SMALLEST maximizing
/// index ell -- the least informative valid answer. Ties are resolved by
/// exact floating-point equality of piece values.
OracleResponse resisting_response(const HardInstance& inst, const Vec& x);

/// resisting_response plus append to the ledger. When scan_out is non-null
/// the per-piece scan (alignments, active index) is copied there so callers
/// can reuse it without re-evaluating. Throws InfeasibleQueryError for
/// ||x|| > B(1 + 1e-9); the ledger is not modified in that case.
OracleResponse resisting_query(const HardInstance& inst, QueryLedger& ledger,
                               const Vec& x, PieceScan* scan_out = nullptr);

/// Executable form of the subgradient inequality: samples `probes` feasible
/// points y and checks f(y) >= f(x) + <g, y - x> - 1e-9 * L * B for each.
/// TRUE means no violation was found.
bool subgradient_validity_check(const HardInstance& inst, const Vec& x,
                                const OracleResponse& response, int probes,
                                Rng& rng);

/// Per-query records as CSV: t, active_index, value, query_norm
/// (plus the full query vector, space-separated, when include_queries).
void write_ledger_csv(const QueryLedger& ledger, std::ostream& os,
                      bool include_queries = false);

}  // namespace hardmax
