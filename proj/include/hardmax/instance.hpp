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
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "hardmax/vecspace.hpp"

namespace hardmax {

/// Queries must satisfy ||x|| <= B * (1 + kFeasibilityTol); optimizers that
/// project onto the ball land on the boundary with roundoff.
inline constexpr double kFeasibilityTol = 1e-9;

/// The adversarial objective
///
///   f(x) = L * B * max_{1<=j<=k} ( <x, v_j> / B  -  j * c )
///
/// over the ball ||x|| <= B, where v_1..v_k are hidden orthonormal directions
/// in R^d, eps_unit = 1/(2*sqrt(k)) and c = eps_unit / k. The function is
/// convex and L-Lipschitz; its advertised accuracy target is
/// eps() = L * B * eps_unit. Minimizing to within eps() requires negative
/// alignment with every hidden direction at once, which is what makes the
/// family hard for first-order methods.
struct HardInstance {
  int k = 0;
  std::size_t d = 0;
  double eps_unit = 0.0;  // 1 / (2 sqrt(k))
  double c = 0.0;         // eps_unit / k
  double L = 1.0;
  double B = 1.0;
  std::uint64_t seed = 0;       // seed the directions were drawn from (0: explicit)
  OrthonormalBasis directions;  // v_1..v_k, unit vectors in R^d

  HardInstance() : directions(1) {}

  /// Advertised accuracy target eps = L * B * eps_unit.
  double eps() const noexcept { return L * B * eps_unit; }
};

/// Thrown when a query leaves the feasible ball. Carries the offending norm.
class InfeasibleQueryError : public std::domain_error {
 public:
  InfeasibleQueryError(double query_norm, double bound);
  double query_norm() const noexcept { return query_norm_; }
  double bound() const noexcept { return bound_; }

 private:
  double query_norm_;
  double bound_;
};

/// Draws the k hidden directions Haar-uniformly in R^d (requires d >= 2k so
/// the concentration analysis has room) and fixes the constants.
HardInstance build_instance(int k, std::size_t d, double L, double B,
                            std::uint64_t seed);

/// Same instance family with explicitly supplied directions (tests,
/// deserialization). The basis must hold k unit vectors in R^d.
HardInstance make_instance(int k, std::size_t d, double L, double B,
                           OrthonormalBasis directions, std::uint64_t seed = 0);

/// One evaluation sweep over the k linear pieces at a feasible point x.
/// alignments[j-1] = <x, v_j> / B; unit_value = max_j (alignments[j-1] - j*c);
/// active_index = the minimal maximizing j under exact float comparison.
struct PieceScan {
  double unit_value = 0.0;
  int active_index = 0;
  std::vector<double> alignments;
};

/// Validates feasibility (throws InfeasibleQueryError) and scans all pieces.
PieceScan scan_pieces(const HardInstance& inst, const Vec& x);

/// f(x) = L * B * unit_value. Single code path shared with the oracle.
double evaluate(const HardInstance& inst, const Vec& x);

/// The computable handle on the unknown optimum: the reference point
/// x_hat = -(B/sqrt(k)) * sum_j v_j with f(x_hat) = -L*B*(2*eps_unit + c),
/// which brackets min f between optimum_lower = -3*L*B*eps_unit and
/// optimum_upper = f(x_hat).
struct ReferenceSolution {
  Vec x_hat;
  double f_x_hat = 0.0;
  double optimum_lower = 0.0;
  double optimum_upper = 0.0;
};

ReferenceSolution reference_solution(const HardInstance& inst);

/// Result of the non-suboptimality certificate: when some alignment exceeds
/// -c/2 the point is provably more than eps above the optimum.
struct Certificate {
  bool witness_found = false;
  int witness_index = 0;  // smallest witnessing j when found
};

/// Certifies that x is NOT eps-suboptimal: returns a witness j with
/// <x, v_j>/B > -c/2 strictly, if one exists. A FALSE result means no
/// certificate; it does not by itself prove x is eps-suboptimal. eps must be
/// the instance's advertised target (the chain of inequalities is specific
/// to it).
Certificate certify_not_suboptimal(const HardInstance& inst, const Vec& x,
                                   double eps);

/// Instance files: a JSON metadata document (format_version, k, d, L, B,
/// seed, eps_unit, c) plus the directions matrix. When k*d <= 10^5 the
/// matrix is embedded as arrays in the document; otherwise it is written
/// row-major as 64-bit little-endian floats to a ".v.bin" sidecar next to
/// the JSON file.
void save_instance(const HardInstance& inst, const std::filesystem::path& json_path);
HardInstance load_instance(const std::filesystem::path& json_path);

namespace detail {
/// Shared formula behind certify_not_suboptimal: smallest j whose alignment
/// strictly exceeds -c/2, or 0 when none.
int witness_from_alignments(const HardInstance& inst,
                            std::span<const double> alignments);
}  // namespace detail

}  // namespace hardmax
