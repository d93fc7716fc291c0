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

#include "hardmax/instance.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "hardmax/rng.hpp"

namespace hardmax {
namespace {

// Directions matrices above this element count go to a binary sidecar
// instead of inline JSON arrays.
constexpr std::size_t kInlineDirectionLimit = 100000;
constexpr int kFormatVersion = 1;
constexpr double kLoadGramTol = 1e-8;

void validate_shape(int k, std::size_t d, double L, double B) {
  if (k < 1) throw std::invalid_argument("instance: k must be >= 1");
  if (d < 2 * static_cast<std::size_t>(k))
    throw std::invalid_argument("instance: d must be >= 2k");
  if (!(L > 0.0) || !std::isfinite(L))
    throw std::invalid_argument("instance: L must be positive and finite");
  if (!(B > 0.0) || !std::isfinite(B))
    throw std::invalid_argument("instance: B must be positive and finite");
}

void fill_constants(HardInstance& inst) {
  inst.eps_unit = 1.0 / (2.0 * std::sqrt(static_cast<double>(inst.k)));
  inst.c = inst.eps_unit / static_cast<double>(inst.k);
}

std::filesystem::path sidecar_path(const std::filesystem::path& json_path) {
  std::filesystem::path p = json_path;
  p.replace_extension(".v.bin");
  return p;
}

void write_le_doubles(std::ostream& os, const Vec& v) {
  std::string buf(v.size() * 8, '\0');
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v[i]);
    for (int b = 0; b < 8; ++b) {
      buf[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

Vec read_le_doubles(std::istream& is, std::size_t count) {
  std::string buf(count * 8, '\0');
  is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(is.gcount()) != buf.size())
    throw std::runtime_error("load_instance: directions file truncated");
  Vec v(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i * 8 + b]))
              << (8 * b);
    }
    v[i] = std::bit_cast<double>(bits);
  }
  return v;
}

}  // namespace

InfeasibleQueryError::InfeasibleQueryError(double query_norm, double bound)
    : std::domain_error("query norm " + std::to_string(query_norm) +
                        " exceeds feasible bound " + std::to_string(bound)),
      query_norm_(query_norm),
      bound_(bound) {}

HardInstance build_instance(int k, std::size_t d, double L, double B,
                            std::uint64_t seed) {
  validate_shape(k, d, L, B);
  HardInstance inst;
  inst.k = k;
  inst.d = d;
  inst.L = L;
  inst.B = B;
  inst.seed = seed;
  fill_constants(inst);
  Rng rng(seed);
  inst.directions = sample_haar_orthonormal(d, static_cast<std::size_t>(k), rng);
  return inst;
}

HardInstance make_instance(int k, std::size_t d, double L, double B,
                           OrthonormalBasis directions, std::uint64_t seed) {
  validate_shape(k, d, L, B);
  if (directions.dim() != d)
    throw std::invalid_argument("make_instance: directions dimension != d");
  if (directions.size() != static_cast<std::size_t>(k))
    throw std::invalid_argument("make_instance: directions count != k");
  if (directions.gram_error() > kLoadGramTol)
    throw std::invalid_argument("make_instance: directions are not orthonormal");
  HardInstance inst;
  inst.k = k;
  inst.d = d;
  inst.L = L;
  inst.B = B;
  inst.seed = seed;
  fill_constants(inst);
  inst.directions = std::move(directions);
  return inst;
}

PieceScan scan_pieces(const HardInstance& inst, const Vec& x) {
  if (x.size() != inst.d)
    throw std::invalid_argument("scan_pieces: query dimension != d");
  const double bound = inst.B * (1.0 + kFeasibilityTol);
  const double x_norm = norm(x);
  // The negated comparison also rejects NaN norms.
  if (!(x_norm <= bound)) throw InfeasibleQueryError(x_norm, bound);

  PieceScan scan;
  scan.alignments.resize(static_cast<std::size_t>(inst.k));
  for (int j = 1; j <= inst.k; ++j) {
    const double a = dot(x, inst.directions[static_cast<std::size_t>(j - 1)]) / inst.B;
    scan.alignments[static_cast<std::size_t>(j - 1)] = a;
    const double piece = a - static_cast<double>(j) * inst.c;
    // Strict comparison keeps the minimal index on exact ties.
    if (j == 1 || piece > scan.unit_value) {
      scan.unit_value = piece;
      scan.active_index = j;
    }
  }
  return scan;
}

double evaluate(const HardInstance& inst, const Vec& x) {
  return inst.L * inst.B * scan_pieces(inst, x).unit_value;
}

ReferenceSolution reference_solution(const HardInstance& inst) {
  ReferenceSolution ref;
  ref.x_hat.assign(inst.d, 0.0);
  const double coeff = -inst.B / std::sqrt(static_cast<double>(inst.k));
  for (int j = 0; j < inst.k; ++j) {
    axpy(coeff, inst.directions[static_cast<std::size_t>(j)], ref.x_hat);
  }
  ref.f_x_hat = evaluate(inst, ref.x_hat);
  // Every feasible x has max_j <x,v_j>/B >= -1/sqrt(k), so
  // f(x) >= L*B*(-1/sqrt(k) - k*c) = -3*L*B*eps_unit.
  ref.optimum_lower = -3.0 * inst.L * inst.B * inst.eps_unit;
  ref.optimum_upper = ref.f_x_hat;
  return ref;
}

namespace detail {
int witness_from_alignments(const HardInstance& inst,
                            std::span<const double> alignments) {
  for (int j = 1; j <= inst.k; ++j) {
    if (alignments[static_cast<std::size_t>(j - 1)] > -inst.c / 2.0) return j;
  }
  return 0;
}
}  // namespace detail

Certificate certify_not_suboptimal(const HardInstance& inst, const Vec& x,
                                   double eps) {
  // The witness chain f(x) > -L*B*(eps_unit + c/2) > f_min + eps is
  // specific to the advertised target; other accuracies are a caller bug.
  const double advertised = inst.eps();
  if (!(std::abs(eps - advertised) <= 1e-12 * advertised))
    throw std::invalid_argument("certify_not_suboptimal: eps differs from the advertised target");
  const PieceScan scan = scan_pieces(inst, x);
  Certificate cert;
  cert.witness_index = detail::witness_from_alignments(inst, scan.alignments);
  cert.witness_found = cert.witness_index != 0;
  return cert;
}

void save_instance(const HardInstance& inst, const std::filesystem::path& json_path) {
  nlohmann::ordered_json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = "hardmax_instance";
  doc["k"] = inst.k;
  doc["d"] = inst.d;
  doc["L"] = inst.L;
  doc["B"] = inst.B;
  doc["seed"] = inst.seed;
  doc["eps_unit"] = inst.eps_unit;
  doc["c"] = inst.c;

  const std::size_t elements = static_cast<std::size_t>(inst.k) * inst.d;
  if (elements <= kInlineDirectionLimit) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < inst.directions.size(); ++i) {
      rows.push_back(inst.directions[i]);
    }
    doc["directions"] = std::move(rows);
  } else {
    const std::filesystem::path bin = sidecar_path(json_path);
    doc["directions_file"] = bin.filename().string();
    std::ofstream os(bin, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("save_instance: cannot open " + bin.string());
    for (std::size_t i = 0; i < inst.directions.size(); ++i) {
      write_le_doubles(os, inst.directions[i]);
    }
    if (!os) throw std::runtime_error("save_instance: write failed for " + bin.string());
  }

  std::ofstream os(json_path, std::ios::trunc);
  if (!os) throw std::runtime_error("save_instance: cannot open " + json_path.string());
  os << doc.dump(2) << '\n';
  if (!os) throw std::runtime_error("save_instance: write failed for " + json_path.string());
}

HardInstance load_instance(const std::filesystem::path& json_path) {
  std::ifstream is(json_path);
  if (!is) throw std::runtime_error("load_instance: cannot open " + json_path.string());
  nlohmann::json doc;
  try {
    is >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_instance: bad JSON in " + json_path.string() +
                             ": " + e.what());
  }
  if (doc.value("kind", "") != "hardmax_instance" ||
      doc.value("format_version", 0) != kFormatVersion)
    throw std::runtime_error("load_instance: unrecognized format in " + json_path.string());

  const int k = doc.at("k").get<int>();
  const std::size_t d = doc.at("d").get<std::size_t>();
  const double L = doc.at("L").get<double>();
  const double B = doc.at("B").get<double>();
  const std::uint64_t seed = doc.at("seed").get<std::uint64_t>();

  OrthonormalBasis directions(d);
  if (doc.contains("directions")) {
    for (const auto& row : doc.at("directions")) {
      directions.append(row.get<Vec>());
    }
  } else {
    const std::filesystem::path bin =
        json_path.parent_path() / doc.at("directions_file").get<std::string>();
    std::ifstream bs(bin, std::ios::binary);
    if (!bs) throw std::runtime_error("load_instance: cannot open " + bin.string());
    for (int j = 0; j < k; ++j) {
      directions.append(read_le_doubles(bs, d));
    }
  }

  HardInstance inst = make_instance(k, d, L, B, std::move(directions), seed);
  const double eps_unit = doc.at("eps_unit").get<double>();
  const double c = doc.at("c").get<double>();
  if (std::abs(eps_unit - inst.eps_unit) > 1e-12 || std::abs(c - inst.c) > 1e-12)
    throw std::runtime_error("load_instance: stored constants disagree with k in " +
                             json_path.string());
  return inst;
}

}  // namespace hardmax
