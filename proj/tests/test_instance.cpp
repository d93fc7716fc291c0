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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "hardmax/instance.hpp"
#include "hardmax/rng.hpp"
#include "hardmax/vecspace.hpp"
#include "test_support.hpp"

using hardmax::HardInstance;
using hardmax::Vec;
using hardmax_test::standard_instance;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("build_instance pins the derived constants") {
  const HardInstance inst = hardmax::build_instance(4, 64, 1.0, 1.0, 11);
  CHECK(inst.k == 4);
  CHECK(inst.d == 64);
  CHECK(inst.eps_unit == 0.25);
  CHECK(inst.c == 0.0625);
  CHECK(inst.eps() == 0.25);
  CHECK(inst.directions.size() == 4);
  CHECK(inst.directions.gram_error() <= 1e-10);

  const HardInstance scaled = hardmax::build_instance(4, 64, 3.0, 0.5, 11);
  CHECK(scaled.eps() == doctest::Approx(3.0 * 0.5 * 0.25).epsilon(1e-15));
}

TEST_CASE("build_instance is deterministic in the seed") {
  const HardInstance a = hardmax::build_instance(3, 32, 1.0, 1.0, 505);
  const HardInstance b = hardmax::build_instance(3, 32, 1.0, 1.0, 505);
  const HardInstance c = hardmax::build_instance(3, 32, 1.0, 1.0, 506);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(a.directions[j] == b.directions[j]);
  }
  CHECK(a.directions[0] != c.directions[0]);
}

TEST_CASE("build_instance rejects bad shapes and scales") {
  CHECK_THROWS_AS(hardmax::build_instance(0, 8, 1.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(hardmax::build_instance(4, 7, 1.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(hardmax::build_instance(4, 8, 0.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(hardmax::build_instance(4, 8, 1.0, -1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(
      hardmax::build_instance(4, 8, std::numeric_limits<double>::infinity(), 1.0, 0),
      std::invalid_argument);
}

TEST_CASE("evaluate matches hand-computed values on an axis-aligned instance") {
  const HardInstance inst = standard_instance(4, 8);

  // Origin: every alignment is zero, the first piece -c is largest.
  CHECK(hardmax::evaluate(inst, Vec(8, 0.0)) == -0.0625);

  // Second construction direction at full radius: 1 - 2c.
  Vec x(8, 0.0);
  x[1] = 1.0;
  CHECK(hardmax::evaluate(inst, x) == 0.875);

  // Reference point -(1/sqrt(k)) * sum v_j = (-0.5, ..., -0.5, 0, ...).
  Vec xh(8, 0.0);
  for (int j = 0; j < 4; ++j) xh[static_cast<std::size_t>(j)] = -0.5;
  CHECK(hardmax::evaluate(inst, xh) == -0.5625);
}

TEST_CASE("evaluate scales as L*B times the unit objective") {
  const HardInstance inst = standard_instance(4, 8, 3.0, 0.5);
  Vec x(8, 0.0);
  x[1] = 0.5;  // B * v_2
  CHECK(hardmax::evaluate(inst, x) == doctest::Approx(3.0 * 0.5 * 0.875).epsilon(1e-15));
}

TEST_CASE("evaluate agrees with an independent evaluation on random points") {
  const HardInstance inst = hardmax::build_instance(4, 128, 2.0, 0.7, 21);
  hardmax::Rng rng(22);
  for (int i = 0; i < 500; ++i) {
    const Vec x = hardmax::sample_ball(128, 0.7, rng);
    const double lib = hardmax::evaluate(inst, x);
    const double ref = hardmax_test::direct_value(inst, x);
    CHECK(lib == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("scan_pieces keeps the minimal index on ties") {
  const HardInstance inst = standard_instance(4, 8);
  // x = c * v_2 makes pieces 1 and 2 exactly equal: -c and c - 2c.
  Vec x(8, 0.0);
  x[1] = 0.0625;
  const hardmax::PieceScan scan = hardmax::scan_pieces(inst, x);
  CHECK(scan.active_index == 1);
  CHECK(scan.unit_value == -0.0625);
  CHECK(scan.alignments.size() == 4);
  CHECK(scan.alignments[1] == 0.0625);
}

TEST_CASE("queries outside the radius or non-finite are rejected") {
  const HardInstance inst = standard_instance(2, 4, 1.0, 2.0);
  Vec x(4, 0.0);
  x[0] = 2.0 * (1.0 + 2e-9);
  CHECK_THROWS_AS(hardmax::evaluate(inst, x), hardmax::InfeasibleQueryError);
  x[0] = 2.0 * (1.0 + 0.5e-9);  // inside the feasibility slack
  CHECK_NOTHROW(hardmax::evaluate(inst, x));
  x[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(hardmax::evaluate(inst, x), hardmax::InfeasibleQueryError);
  CHECK_THROWS_AS(hardmax::evaluate(inst, Vec(3, 0.0)), std::invalid_argument);

  try {
    Vec far(4, 0.0);
    far[0] = 3.0;
    hardmax::evaluate(inst, far);
    CHECK(false);
  } catch (const hardmax::InfeasibleQueryError& e) {
    CHECK(e.query_norm() == 3.0);
    CHECK(e.bound() > 2.0);
    CHECK(e.bound() < 2.0001);
  }
}

TEST_CASE("reference point hits the closed-form value across k") {
  for (int k = 1; k <= 64; ++k) {
    const std::size_t d = static_cast<std::size_t>(2 * k);
    const HardInstance inst = hardmax::build_instance(k, d, 1.0, 1.0,
                                                      static_cast<std::uint64_t>(k));
    const hardmax::ReferenceSolution ref = hardmax::reference_solution(inst);
    const double expected = -(2.0 * inst.eps_unit + inst.c);
    CHECK(std::abs(ref.f_x_hat - expected) <= 1e-12 * std::abs(expected));
    CHECK(std::abs(hardmax::norm(ref.x_hat) - 1.0) <= 1e-12);
    CHECK(ref.optimum_lower == -3.0 * inst.eps_unit);
    // At k=1 the bracket is degenerate and the measured reference value
    // can undershoot the analytic lower end by the ~1-ulp norm error of
    // the sampled direction.
    CHECK(ref.optimum_lower <= ref.f_x_hat + 4e-16);
    CHECK(ref.optimum_upper == ref.f_x_hat);
  }
}

TEST_CASE("reference value scales with L and B") {
  const HardInstance inst = hardmax::build_instance(4, 32, 2.5, 0.4, 77);
  const hardmax::ReferenceSolution ref = hardmax::reference_solution(inst);
  const double expected = -2.5 * 0.4 * 0.5625;
  CHECK(std::abs(ref.f_x_hat - expected) <= 1e-12 * std::abs(expected));
  CHECK(std::abs(hardmax::norm(ref.x_hat) - 0.4) <= 1e-12 * 0.4);
}

TEST_CASE("optimum bracket contains the true ball optimum") {
  // Independent bisection for the exact minimum over the unit ball.
  CHECK(hardmax_test::unit_ball_optimum(1) == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(hardmax_test::unit_ball_optimum(4) ==
        doctest::Approx(-0.6513431099298395).epsilon(1e-12));

  for (int k : {1, 2, 4, 16}) {
    const HardInstance inst = hardmax::build_instance(
        k, static_cast<std::size_t>(2 * k), 1.0, 1.0, 3);
    const hardmax::ReferenceSolution ref = hardmax::reference_solution(inst);
    const double star = hardmax_test::unit_ball_optimum(k);
    CHECK(ref.optimum_lower <= star + 1e-12);
    CHECK(star <= ref.optimum_upper + 1e-12);
  }
}

TEST_CASE("no feasible point beats the lower end of the bracket") {
  const HardInstance inst = hardmax::build_instance(4, 128, 1.0, 1.0, 9);
  const hardmax::ReferenceSolution ref = hardmax::reference_solution(inst);
  hardmax::Rng rng(10);
  for (int i = 0; i < 2000; ++i) {
    const Vec x = hardmax::sample_ball(128, 1.0, rng);
    CHECK(hardmax::evaluate(inst, x) >= ref.optimum_lower);
  }
}

TEST_CASE("witness certificate is sound") {
  const HardInstance inst = standard_instance(4, 8);
  const double eps = inst.eps();
  const hardmax::ReferenceSolution ref = hardmax::reference_solution(inst);

  // The reference point itself has no witness: every alignment is -0.5.
  const hardmax::Certificate at_ref = hardmax::certify_not_suboptimal(inst, ref.x_hat, eps);
  CHECK_FALSE(at_ref.witness_found);

  // The origin is witnessed by the first direction (0 > -c/2).
  const hardmax::Certificate at_zero =
      hardmax::certify_not_suboptimal(inst, Vec(8, 0.0), eps);
  CHECK(at_zero.witness_found);
  CHECK(at_zero.witness_index == 1);

  // -v_1 clears direction 1 but direction 2 still witnesses.
  Vec x(8, 0.0);
  x[0] = -1.0;
  const hardmax::Certificate at_neg = hardmax::certify_not_suboptimal(inst, x, eps);
  CHECK(at_neg.witness_found);
  CHECK(at_neg.witness_index == 2);

  // Mismatched tolerance is rejected: the certificate is only valid at
  // the instance's own advertised accuracy.
  CHECK_THROWS_AS(hardmax::certify_not_suboptimal(inst, x, eps * 1.01),
                  std::invalid_argument);
}

TEST_CASE("witnessed points really are above the suboptimality cutoff") {
  const HardInstance inst = hardmax::build_instance(4, 64, 1.5, 0.8, 31);
  const double eps = inst.eps();
  const hardmax::ReferenceSolution ref = hardmax::reference_solution(inst);
  hardmax::Rng rng(32);
  int witnessed = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec x = hardmax::sample_ball(64, 0.8, rng);
    const hardmax::Certificate cert = hardmax::certify_not_suboptimal(inst, x, eps);
    if (cert.witness_found) {
      ++witnessed;
      // Witness guarantee: x cannot be eps-suboptimal even against the
      // unknown true optimum, which is at most f(x_hat).
      CHECK(hardmax::evaluate(inst, x) > ref.f_x_hat + eps);
    }
  }
  CHECK(witnessed > 900);  // at this dimension nearly every point is witnessed
}

TEST_CASE("save and load round-trip inline instances") {
  const std::filesystem::path path = temp_file("hardmax_test_inline.json");
  const HardInstance inst = hardmax::build_instance(2, 16, 1.25, 0.75, 4242);
  hardmax::save_instance(inst, path);

  const HardInstance loaded = hardmax::load_instance(path);
  CHECK(loaded.k == inst.k);
  CHECK(loaded.d == inst.d);
  CHECK(loaded.L == inst.L);
  CHECK(loaded.B == inst.B);
  CHECK(loaded.seed == inst.seed);
  CHECK(loaded.eps_unit == inst.eps_unit);
  CHECK(loaded.c == inst.c);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(loaded.directions[j] == inst.directions[j]);
  }

  // Inline form keeps everything in the one JSON file.
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  CHECK(text.find("directions") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("save and load round-trip sidecar instances") {
  const std::filesystem::path path = temp_file("hardmax_test_sidecar.json");
  const std::filesystem::path sidecar = temp_file("hardmax_test_sidecar.v.bin");
  // k*d = 120000 exceeds the inline limit, forcing the binary sidecar.
  const HardInstance inst = hardmax::build_instance(2, 60000, 1.0, 1.0, 9001);
  hardmax::save_instance(inst, path);
  CHECK(std::filesystem::exists(sidecar));

  const HardInstance loaded = hardmax::load_instance(path);
  CHECK(loaded.directions[0] == inst.directions[0]);
  CHECK(loaded.directions[1] == inst.directions[1]);

  // A truncated sidecar must not load quietly.
  std::filesystem::resize_file(sidecar, 128);
  CHECK_THROWS(hardmax::load_instance(path));
  std::filesystem::remove(path);
  std::filesystem::remove(sidecar);
}

TEST_CASE("load rejects tampered metadata") {
  const std::filesystem::path path = temp_file("hardmax_test_tamper.json");
  const HardInstance inst = hardmax::build_instance(2, 8, 1.0, 1.0, 5);
  hardmax::save_instance(inst, path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  const std::string needle = "\"k\": 2";
  const auto pos = text.find(needle);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, needle.size(), "\"k\": 3");
  std::ofstream out(path, std::ios::trunc);
  out << text;
  out.close();
  CHECK_THROWS(hardmax::load_instance(path));
  std::filesystem::remove(path);
}
