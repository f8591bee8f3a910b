// Copyright 2026 The xxgadget Authors
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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xxgadget/diagnostics.hpp"
#include "xxgadget/effective.hpp"
#include "xxgadget/pauli.hpp"

namespace xxgadget {

/*******************************************************************************
 * Gadget register layouts
 *
 *   three-body : qubits (1, 2, 12) -> register (1, 2, 3); logical (b1, b2)
 *                sits on physical (b1, b2, b1 ^ b2)
 *   one-hot    : four qubits; logical 00, 01, 10, 11 sit on 0001, 0010,
 *                0100, 1000
 *   chain      : two qubits; logical 0, 1 sit on 00, 11
 *
 * In every case the low-energy basis in ascending index order is the logical
 * basis in ascending order, so effective matrices compare entrywise.
 ******************************************************************************/

struct ThreeBodySpec {
  double d1 = 0.0, d2 = 0.0, d12 = 0.0;
  double cp = 1.0;
  double h1 = 0.0, h2 = 0.0, j12 = 0.0;
};

struct OneHotSpec {
  std::array<double, 4> d{};
  double cp = 1.0;
  double h1 = 0.0, h2 = 0.0, j12 = 0.0;
};

struct ChainSpec {
  double d1 = 0.0, d2 = 0.0;
  double cp = 1.0;
};

enum class LogicalZKind { Identity, Z1, Z2, Z1Z2 };

namespace detail {

inline void check_penalty(double cp, std::initializer_list<double> drives,
                          const char* gadget) {
  if (!(cp > 0.0) || !std::isfinite(cp))
    throw std::invalid_argument(std::string(gadget) + ": C_p must be positive");
  double dmax = 0.0;
  for (double d : drives) {
    if (!std::isfinite(d)) throw std::invalid_argument(std::string(gadget) + ": drive is not finite");
    dmax = std::max(dmax, std::abs(d));
  }
  if (cp < 10.0 * dmax)
    warn(std::string(gadget) + ": C_p = " + format_real(cp) +
         " is below 10 max|d_i|; the effective picture is unreliable");
}

}  // namespace detail

inline constexpr std::array<BasisIndex, 4> kThreeBodyLogicalBasis{0b000, 0b011, 0b101, 0b110};
inline constexpr std::array<BasisIndex, 4> kOneHotLogicalBasis{0b0001, 0b0010, 0b0100, 0b1000};
inline constexpr std::array<BasisIndex, 2> kChainLogicalBasis{0b00, 0b11};

// ---------------------------------------------------------------- three-body

inline Observable three_body_physical(const ThreeBodySpec& s) {
  detail::check_penalty(s.cp, {s.d1, s.d2, s.d12}, "three-body gadget");
  Observable h(3);
  h.add(PauliTerm(-s.cp, {{1, PauliAxis::Z}, {2, PauliAxis::Z}, {3, PauliAxis::Z}}));
  h.add(x_term(-s.d1, 1));
  h.add(x_term(-s.d2, 2));
  h.add(x_term(-s.d12, 3));
  if (s.h1 != 0.0) h.add(z_term(s.h1 / s.cp, 1));
  if (s.h2 != 0.0) h.add(z_term(s.h2 / s.cp, 2));
  if (s.j12 != 0.0) h.add(z_term(s.j12 / s.cp, 3));
  return h;
}

inline Observable three_body_effective_closed(const ThreeBodySpec& s) {
  if (!(s.cp > 0.0)) throw std::invalid_argument("three-body gadget: C_p must be positive");
  const double k = 1.0 / s.cp;
  Observable h(2);
  h.add(x_term(-k * s.d1 * s.d12, 1));
  h.add(x_term(-k * s.d2 * s.d12, 2));
  h.add(xx_term(-k * s.d1 * s.d2, 1, 2));
  h.add(z_term(k * s.h1, 1));
  h.add(z_term(k * s.h2, 2));
  h.add(zz_term(k * s.j12, 1, 2));
  return h;
}

/** Even parity over all three qubits. */
inline SubspacePartition three_body_partition() {
  return partition_parity(3, {1, 2, 3}, true);
}

// ------------------------------------------------------------------- one-hot

/**
 * cp (sum_i Z_i - 2)^2 on four qubits, expanded with Z^2 = I into
 * 2 cp sum_{i<j} Z_i Z_j - 4 cp sum_i Z_i + 8 cp.
 */
inline Observable one_hot_penalty(double cp, unsigned n_qubits,
                                  std::array<unsigned, 4> q = {1, 2, 3, 4}) {
  Observable h(n_qubits);
  for (unsigned i = 0; i < 4; ++i)
    for (unsigned j = i + 1; j < 4; ++j) h.add(zz_term(2.0 * cp, q[i], q[j]));
  for (unsigned i = 0; i < 4; ++i) h.add(z_term(-4.0 * cp, q[i]));
  h.add(identity_term(8.0 * cp));
  return h;
}

/** Twice the logical Z operators as sign patterns over the four gadget qubits. */
inline std::array<double, 4> logical_z_signs(LogicalZKind kind) {
  switch (kind) {
    case LogicalZKind::Identity: return {1, 1, 1, 1};
    case LogicalZKind::Z1: return {1, 1, -1, -1};
    case LogicalZKind::Z2: return {1, -1, 1, -1};
    case LogicalZKind::Z1Z2: return {-1, 1, 1, -1};
  }
  throw std::invalid_argument("unknown logical Z kind");
}

/** weight * (1/2) sum_i sign_i Z_{q_i}. */
inline Observable logical_z_physical(LogicalZKind kind, double weight = 1.0,
                                     unsigned n_qubits = 4,
                                     std::array<unsigned, 4> q = {1, 2, 3, 4}) {
  const auto sg = logical_z_signs(kind);
  Observable h(n_qubits);
  for (unsigned i = 0; i < 4; ++i) h.add(z_term(0.5 * weight * sg[i], q[i]));
  return h;
}

inline Observable one_hot_physical(const OneHotSpec& s) {
  detail::check_penalty(s.cp, {s.d[0], s.d[1], s.d[2], s.d[3]}, "one-hot gadget");
  if (s.j12 != 0.0)
    warn("one-hot gadget: J12 uses the (-Z1 + Z2 + Z3 - Z4) pattern of the logical encoding table");
  Observable h = one_hot_penalty(s.cp, 4);
  for (unsigned i = 0; i < 4; ++i) h.add(x_term(-s.d[i], i + 1));
  // (1/4cp) h (sign . Z) = (1/2cp) h Z~.
  const double k = 1.0 / (2.0 * s.cp);
  if (s.h1 != 0.0) h += logical_z_physical(LogicalZKind::Z1, k * s.h1);
  if (s.h2 != 0.0) h += logical_z_physical(LogicalZKind::Z2, k * s.h2);
  if (s.j12 != 0.0) h += logical_z_physical(LogicalZKind::Z1Z2, k * s.j12);
  return h;
}

inline Observable one_hot_effective_closed(const OneHotSpec& s) {
  if (!(s.cp > 0.0)) throw std::invalid_argument("one-hot gadget: C_p must be positive");
  const auto& d = s.d;
  const double k = 1.0 / (4.0 * s.cp);
  Observable h(2);
  h.add(x_term(-k * (d[0] * d[2] + d[1] * d[3]), 1));
  h.add(x_term(-k * (d[0] * d[1] + d[2] * d[3]), 2));
  h.add(xx_term(-k * (d[1] * d[2] + d[0] * d[3]), 1, 2));
  h.add(PauliTerm(k * (d[0] * d[2] - d[1] * d[3]), {{1, PauliAxis::X}, {2, PauliAxis::Z}}));
  h.add(PauliTerm(k * (d[0] * d[1] - d[2] * d[3]), {{1, PauliAxis::Z}, {2, PauliAxis::X}}));
  h.add(PauliTerm(k * (d[0] * d[3] - d[1] * d[2]), {{1, PauliAxis::Y}, {2, PauliAxis::Y}}));
  h.add(z_term(2.0 * k * s.h1, 1));
  h.add(z_term(2.0 * k * s.h2, 2));
  h.add(zz_term(2.0 * k * s.j12, 1, 2));
  return h;
}

/** Hamming-weight-1 partition; with `truncate`, B keeps only weights 0 and 2. */
inline SubspacePartition one_hot_partition(bool truncate = true) {
  auto p = partition_hamming(4, 1);
  if (!truncate) return p;
  return truncate_b(p, [](BasisIndex i) {
    const auto w = hamming_weight(i);
    return w == 0 || w == 2;
  });
}

/** Logical index 2 b1 + b2 of a one-hot state, or empty if infeasible. */
inline std::optional<unsigned> decode_one_hot(BasisIndex index) {
  if (index > 0b1111) throw std::out_of_range("one-hot decode expects a 4-qubit index");
  for (unsigned l = 0; l < 4; ++l)
    if (kOneHotLogicalBasis[l] == index) return l;
  return std::nullopt;
}

inline BasisIndex encode_one_hot(unsigned logical) {
  if (logical > 3) throw std::out_of_range("logical index must be in 0..3");
  return kOneHotLogicalBasis[logical];
}

// --------------------------------------------------------------------- chain

inline Observable chain_physical(const ChainSpec& s) {
  if (!(s.cp > 0.0) || !std::isfinite(s.cp))
    throw std::invalid_argument("chain: C_p must be positive");
  Observable h(2);
  h.add(x_term(-s.d1, 1));
  h.add(x_term(-s.d2, 2));
  h.add(zz_term(-2.0 * s.cp, 1, 2));
  return h;
}

inline Observable chain_effective_closed(const ChainSpec& s) {
  if (!(s.cp > 0.0)) throw std::invalid_argument("chain: C_p must be positive");
  return Observable(1, {x_term(-s.d1 * s.d2 / (2.0 * s.cp), 1)});
}

inline Observable chain_logical_z(unsigned n_qubits = 2, unsigned a = 1, unsigned b = 2,
                                  double weight = 1.0) {
  Observable h(n_qubits);
  h.add(z_term(0.5 * weight, a));
  h.add(z_term(0.5 * weight, b));
  return h;
}

inline SubspacePartition chain_partition() { return partition_parity(2, {1, 2}, true); }

}  // namespace xxgadget
