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
#include <optional>
#include <span>
#include <vector>

#include "hardmax/rng.hpp"

namespace hardmax {

/// Dense real vector. Components are finite doubles; dimension is the size.
using Vec = std::vector<double>;

inline constexpr double kDefaultOrthoTol = 1e-10;
inline constexpr double kDefaultDropTol = 1e-10;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double alpha);
bool all_finite(std::span<const double> a);

/// An ordered set of mutually orthonormal vectors of a fixed dimension.
/// Grows by appending; never exceeds the ambient dimension.
class OrthonormalBasis {
 public:
  explicit OrthonormalBasis(std::size_t dim, double ortho_tol = kDefaultOrthoTol);

  /// The first m standard basis vectors of R^dim.
  static OrthonormalBasis standard(std::size_t dim, std::size_t m);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  bool empty() const noexcept { return vectors_.empty(); }
  double ortho_tol() const noexcept { return ortho_tol_; }
  const Vec& operator[](std::size_t i) const { return vectors_[i]; }
  const std::vector<Vec>& vectors() const noexcept { return vectors_; }

  /// Appends a vector the caller asserts is unit-norm and orthogonal to the
  /// existing set. Dimension is validated; orthonormality is the caller's
  /// contract (checked by gram_error() in tests and on deserialization).
  void append(Vec v);

  /// Normalized Gram-Schmidt residual of v against this basis, using one
  /// re-orthogonalization pass (classical GS applied twice). Returns nullopt
  /// when the residual norm is <= drop_tol, i.e. v lies in the span.
  std::optional<Vec> residual(const Vec& v, double drop_tol = kDefaultDropTol) const;

  /// residual() followed by append(); returns false when the residual was
  /// dropped and the basis is unchanged.
  bool append_residual(const Vec& v, double drop_tol = kDefaultDropTol);

  /// Orthogonal projection of x onto the span of the basis. For an empty
  /// basis this is the zero vector.
  Vec project(const Vec& x) const;
  /// x - project(x).
  Vec project_perp(const Vec& x) const;

  /// max_{i,j} |<b_i, b_j> - delta_ij|; zero for an empty basis.
  double gram_error() const;

 private:
  std::size_t dim_;
  double ortho_tol_;
  std::vector<Vec> vectors_;
};

/// m orthonormal vectors in R^d distributed by the rotation-invariant (Haar)
/// measure: i.i.d. standard-normal vectors orthonormalized by Gram-Schmidt
/// with one re-orthogonalization pass.
OrthonormalBasis sample_haar_orthonormal(std::size_t d, std::size_t m, Rng& rng);

/// Uniform point on the unit sphere in R^d.
Vec sample_unit_sphere(std::size_t d, Rng& rng);

/// Uniform point in the closed ball of the given radius in R^d.
Vec sample_ball(std::size_t d, double radius, Rng& rng);

}  // namespace hardmax
