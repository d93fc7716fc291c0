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

#include "hardmax/oracle.hpp"

#include <ostream>
#include <stdexcept>
#include <utility>

#include "text_format.hpp"

namespace hardmax {

void QueryLedger::append(Vec query, OracleResponse response) {
  queries_.push_back(std::move(query));
  responses_.push_back(std::move(response));
}

namespace {

OracleResponse response_from_scan(const HardInstance& inst,
                                  const PieceScan& scan) {
  OracleResponse resp;
  resp.value = inst.L * inst.B * scan.unit_value;
  resp.active_index = scan.active_index;
  resp.subgradient = inst.directions[static_cast<std::size_t>(scan.active_index - 1)];
  scale(resp.subgradient, inst.L);
  return resp;
}

}  // namespace

OracleResponse resisting_response(const HardInstance& inst, const Vec& x) {
  return response_from_scan(inst, scan_pieces(inst, x));
}

OracleResponse resisting_query(const HardInstance& inst, QueryLedger& ledger,
                               const Vec& x, PieceScan* scan_out) {
  // scan_pieces throws on infeasible or malformed queries before anything
  // is appended, so a rejected query leaves the ledger untouched.
  PieceScan scan = scan_pieces(inst, x);
  OracleResponse resp = response_from_scan(inst, scan);
  ledger.append(x, resp);
  if (scan_out != nullptr) *scan_out = std::move(scan);
  return resp;
}

bool subgradient_validity_check(const HardInstance& inst, const Vec& x,
                                const OracleResponse& response, int probes,
                                Rng& rng) {
  if (probes < 1) throw std::invalid_argument("subgradient_validity_check: probes must be >= 1");
  const double slack = 1e-9 * inst.L * inst.B;
  const double g_dot_x = dot(response.subgradient, x);
  for (int i = 0; i < probes; ++i) {
    const Vec y = sample_ball(inst.d, inst.B, rng);
    const double lhs = evaluate(inst, y);
    const double rhs = response.value + dot(response.subgradient, y) - g_dot_x;
    if (lhs < rhs - slack) return false;
  }
  return true;
}

void write_ledger_csv(const QueryLedger& ledger, std::ostream& os,
                      bool include_queries) {
  os << "t,active_index,value,query_norm";
  if (include_queries) os << ",query";
  os << '\n';
  for (std::size_t i = 0; i < ledger.count(); ++i) {
    const Vec& q = ledger.query(i);
    const OracleResponse& r = ledger.response(i);
    os << (i + 1) << ',' << r.active_index << ',' << detail::decimal(r.value)
       << ',' << detail::decimal(norm(q));
    if (include_queries) {
      os << ',';
      for (std::size_t j = 0; j < q.size(); ++j) {
        if (j > 0) os << ' ';
        os << detail::decimal(q[j]);
      }
    }
    os << '\n';
  }
}

}  // namespace hardmax
