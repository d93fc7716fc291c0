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

#include "hardmax/vecspace.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace hardmax {

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(std::span<double> x, double alpha) {
  for (double& xi : x) xi *= alpha;
}

bool all_finite(std::span<const double> a) {
  for (double ai : a) {
    if (!std::isfinite(ai)) return false;
  }
  return true;
}

OrthonormalBasis::OrthonormalBasis(std::size_t dim, double ortho_tol)
    : dim_(dim), ortho_tol_(ortho_tol) {
  if (dim == 0) throw std::invalid_argument("OrthonormalBasis: dim must be positive");
}

OrthonormalBasis OrthonormalBasis::standard(std::size_t dim, std::size_t m) {
  if (m > dim) throw std::invalid_argument("OrthonormalBasis::standard: m > dim");
  OrthonormalBasis basis(dim);
  for (std::size_t i = 0; i < m; ++i) {
    Vec e(dim, 0.0);
    e[i] = 1.0;
    basis.vectors_.push_back(std::move(e));
  }
  return basis;
}

void OrthonormalBasis::append(Vec v) {
  if (v.size() != dim_) throw std::invalid_argument("OrthonormalBasis::append: wrong dimension");
  if (vectors_.size() == dim_) throw std::logic_error("OrthonormalBasis::append: basis already full");
  vectors_.push_back(std::move(v));
}

std::optional<Vec> OrthonormalBasis::residual(const Vec& v, double drop_tol) const {
  if (v.size() != dim_) throw std::invalid_argument("OrthonormalBasis::residual: wrong dimension");
  Vec r = v;
  // Classical Gram-Schmidt applied twice: the second pass removes the
  // projection error the first pass leaves behind when components are
  // nearly parallel to the span.
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vec& b : vectors_) {
      axpy(-dot(r, b), b, r);
    }
  }
  const double r_norm = norm(r);
  if (r_norm <= drop_tol) return std::nullopt;
  scale(r, 1.0 / r_norm);
  return r;
}

bool OrthonormalBasis::append_residual(const Vec& v, double drop_tol) {
  std::optional<Vec> r = residual(v, drop_tol);
  if (!r) return false;
  append(std::move(*r));
  return true;
}

Vec OrthonormalBasis::project(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("OrthonormalBasis::project: wrong dimension");
  Vec p(dim_, 0.0);
  for (const Vec& b : vectors_) {
    axpy(dot(x, b), b, p);
  }
  return p;
}

Vec OrthonormalBasis::project_perp(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("OrthonormalBasis::project_perp: wrong dimension");
  Vec r = x;
  for (const Vec& b : vectors_) {
    axpy(-dot(r, b), b, r);
  }
  return r;
}

double OrthonormalBasis::gram_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    for (std::size_t j = i; j < vectors_.size(); ++j) {
      const double target = (i == j) ? 1.0 : 0.0;
      const double err = std::abs(dot(vectors_[i], vectors_[j]) - target);
      if (err > worst) worst = err;
    }
  }
  return worst;
}

OrthonormalBasis sample_haar_orthonormal(std::size_t d, std::size_t m, Rng& rng) {
  if (m > d) throw std::invalid_argument("sample_haar_orthonormal: m > d");
  OrthonormalBasis basis(d);
  while (basis.size() < m) {
    Vec g(d);
    for (double& gi : g) gi = rng.normal();
    // A Gaussian vector lies in a given m-dimensional span with
    // probability zero; a dropped residual only happens on a measure-zero
    // event or pathological RNG output, so retrying is safe.
    basis.append_residual(g);
  }
  return basis;
}

Vec sample_unit_sphere(std::size_t d, Rng& rng) {
  if (d == 0) throw std::invalid_argument("sample_unit_sphere: d must be positive");
  Vec g(d);
  double n = 0.0;
  do {
    for (double& gi : g) gi = rng.normal();
    n = norm(g);
  } while (n == 0.0);
  scale(g, 1.0 / n);
  return g;
}

Vec sample_ball(std::size_t d, double radius, Rng& rng) {
  if (radius < 0.0) throw std::invalid_argument("sample_ball: negative radius");
  Vec x = sample_unit_sphere(d, rng);
  // r = radius * U^{1/d} gives the uniform radial law in d dimensions.
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  scale(x, r);
  return x;
}

}  // namespace hardmax
