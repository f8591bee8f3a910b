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

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xxgadget/effective.hpp"
#include "xxgadget/gadgets.hpp"
#include "xxgadget/pauli.hpp"
#include "xxgadget/sparse.hpp"

namespace xxgadget {

enum class ScheduleKind { Constant, OneMinusS, SqrtOneMinusS, S, SOver2Cp, OneMinusSOver2Cp };

inline const char* to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::Constant: return "constant";
    case ScheduleKind::OneMinusS: return "1-s";
    case ScheduleKind::SqrtOneMinusS: return "sqrt(1-s)";
    case ScheduleKind::S: return "s";
    case ScheduleKind::SOver2Cp: return "s/2cp";
    case ScheduleKind::OneMinusSOver2Cp: return "(1-s)/2cp";
  }
  return "?";
}

/** Weight of a schedule group at normalised time s. */
inline double schedule_weight(ScheduleKind k, double s, double cp) {
  switch (k) {
    case ScheduleKind::Constant: return 1.0;
    case ScheduleKind::OneMinusS: return 1.0 - s;
    case ScheduleKind::SqrtOneMinusS: return std::sqrt(std::max(0.0, 1.0 - s));
    case ScheduleKind::S: return s;
    case ScheduleKind::SOver2Cp: return s / (2.0 * cp);
    case ScheduleKind::OneMinusSOver2Cp: return (1.0 - s) / (2.0 * cp);
  }
  throw std::invalid_argument("unknown schedule kind");
}

/** H(s) = sum_g w_g(s) H_g. `cp` feeds the 2C_p schedule kinds. */
struct ScheduledObservable {
  unsigned n_qubits = 1;
  double cp = 1.0;
  std::vector<std::pair<ScheduleKind, Observable>> groups;

  ScheduledObservable& add(ScheduleKind kind, Observable obs) {
    if (obs.n_qubits() != n_qubits)
      throw std::invalid_argument("schedule group is on a different register");
    groups.emplace_back(kind, std::move(obs));
    return *this;
  }

  std::vector<double> weights(double s) const {
    std::vector<double> w;
    w.reserve(groups.size());
    for (const auto& g : groups) w.push_back(schedule_weight(g.first, s, cp));
    return w;
  }
};

inline void check_s(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::out_of_range("s must lie in [0, 1]");
}

inline Observable evaluate_at(const ScheduledObservable& sched, double s) {
  check_s(s);
  Observable out(sched.n_qubits);
  for (const auto& [kind, obs] : sched.groups) {
    const double w = schedule_weight(kind, s, sched.cp);
    if (w != 0.0) out += w * obs;
  }
  return out;
}

/** Group matrices assembled once; H(s) is a weighted value sum on one pattern. */
class CompiledSchedule {
 public:
  CompiledSchedule() = default;

  explicit CompiledSchedule(const ScheduledObservable& sched) : sched_(sched) {
    std::vector<SparseOperator> mats;
    mats.reserve(sched.groups.size());
    for (const auto& g : sched.groups) mats.push_back(assemble(g.second));
    family_ = OperatorFamily(mats);
  }

  SparseOperator at(double s) const {
    check_s(s);
    const auto w = sched_.weights(s);
    return family_.combine(w);
  }

  /** Linear combination with explicit group weights. */
  SparseOperator combine(std::span<const double> w) const { return family_.combine(w); }

  const ScheduledObservable& schedule() const { return sched_; }
  std::size_t dim() const { return family_.dim(); }
  unsigned n_qubits() const { return sched_.n_qubits; }

 private:
  ScheduledObservable sched_;
  OperatorFamily family_;
};

// ------------------------------------------------------------- toy instance

enum class Variant { TF, XX, OneHot, OneHotHom };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::TF: return "tf";
    case Variant::XX: return "xx";
    case Variant::OneHot: return "onehot";
    case Variant::OneHotHom: return "onehot-hom";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "tf" || s == "TF") return Variant::TF;
  if (s == "xx" || s == "XX") return Variant::XX;
  if (s == "onehot" || s == "one-hot" || s == "oh" || s == "OH") return Variant::OneHot;
  if (s == "onehot-hom" || s == "one-hot-hom" || s == "hom") return Variant::OneHotHom;
  throw std::invalid_argument("unknown variant '" + std::string(s) + "'");
}

/** Weighted independent set on two groups: G0 = 1..n0, G1 = n0+1..2n0+1. */
struct ToyInstance {
  unsigned n0 = 2;
  double jzz = 5.33;
  double delta_w = 0.1;
  double cp = 100.0;
  Variant variant = Variant::TF;

  unsigned n1() const { return n0 + 1; }
  unsigned logical_qubits() const { return 2 * n0 + 1; }

  void validate() const {
    if (n0 < 2) throw std::invalid_argument("n0 must be at least 2");
    if (!std::isfinite(jzz) || !std::isfinite(delta_w))
      throw std::invalid_argument("jzz and delta_w must be finite");
    if (!(cp > 0.0) || !std::isfinite(cp)) throw std::invalid_argument("cp must be positive");
  }

  double g0_field() const { return n1() * jzz - 2.0 * (1.0 + delta_w) / n0; }
  double g1_field() const { return n0 * jzz - 2.0 / n1(); }
};

/** Role of one physical qubit. */
struct QubitRole {
  enum class Kind { Problem, Gadget, ChainMember };
  Kind kind = Kind::Problem;
  /** Problem qubit label for Problem/ChainMember, gadget slot 1..4 for Gadget. */
  unsigned index = 0;
  /** 1 or 2 for chain members. */
  unsigned member = 0;
};

struct QubitLayout {
  std::vector<QubitRole> roles;  // roles[q - 1] describes physical qubit q

  unsigned n_qubits() const { return static_cast<unsigned>(roles.size()); }
};

/** Number of physical qubits used by a variant. */
inline unsigned qubit_count(Variant v, unsigned n0) {
  switch (v) {
    case Variant::TF:
    case Variant::XX: return 2 * n0 + 1;
    case Variant::OneHot: return 2 * n0 + 3;
    case Variant::OneHotHom: return 4 * n0 + 2;
  }
  return 0;
}

inline QubitLayout make_layout(Variant v, unsigned n0) {
  QubitLayout l;
  const unsigned n_logical = 2 * n0 + 1;
  switch (v) {
    case Variant::TF:
    case Variant::XX:
      for (unsigned i = 1; i <= n_logical; ++i) l.roles.push_back({QubitRole::Kind::Problem, i, 0});
      break;
    case Variant::OneHot:
      for (unsigned k = 1; k <= 4; ++k) l.roles.push_back({QubitRole::Kind::Gadget, k, 0});
      for (unsigned i = 3; i <= n_logical; ++i) l.roles.push_back({QubitRole::Kind::Problem, i, 0});
      break;
    case Variant::OneHotHom:
      for (unsigned k = 1; k <= 4; ++k) l.roles.push_back({QubitRole::Kind::Gadget, k, 0});
      for (unsigned i = 3; i <= n_logical; ++i) {
        l.roles.push_back({QubitRole::Kind::ChainMember, i, 1});
        l.roles.push_back({QubitRole::Kind::ChainMember, i, 2});
      }
      break;
  }
  return l;
}

/** Physical qubit of problem qubit i >= 3 in the one-hot layout. */
inline unsigned one_hot_qubit(unsigned i) { return i + 2; }
/** Physical qubits (i,1), (i,2) of problem qubit i >= 3 in the homogeneous layout. */
inline std::pair<unsigned, unsigned> chain_qubits(unsigned i) {
  return {2 * i - 1, 2 * i};
}

/** Logical problem Hamiltonian on 2n0+1 qubits. */
inline Observable build_problem(const ToyInstance& inst) {
  inst.validate();
  const unsigned n = inst.logical_qubits();
  Observable h(n);
  for (unsigned i = 1; i <= inst.n0; ++i) h.add(z_term(inst.g0_field(), i));
  for (unsigned j = inst.n0 + 1; j <= n; ++j) h.add(z_term(inst.g1_field(), j));
  for (unsigned i = 1; i <= inst.n0; ++i)
    for (unsigned j = inst.n0 + 1; j <= n; ++j) h.add(zz_term(inst.jzz, i, j));
  return h;
}

inline Observable transverse_driver(unsigned n_qubits, unsigned first = 1,
                                    std::optional<unsigned> last = std::nullopt) {
  Observable h(n_qubits);
  for (unsigned q = first; q <= last.value_or(n_qubits); ++q) h.add(x_term(-1.0, q));
  return h;
}

/** Problem Hamiltonian with qubits 1 and 2 carried by the one-hot gadget. */
inline Observable one_hot_problem(const ToyInstance& inst) {
  const unsigned n = qubit_count(Variant::OneHot, inst.n0);
  const unsigned nl = inst.logical_qubits();
  Observable h(n);
  const double c0 = inst.g0_field(), c1 = inst.g1_field();
  for (unsigned i = 3; i <= inst.n0; ++i) h.add(z_term(c0, one_hot_qubit(i)));
  for (unsigned j = inst.n0 + 1; j <= nl; ++j) h.add(z_term(c1, one_hot_qubit(j)));
  for (unsigned i = 3; i <= inst.n0; ++i)
    for (unsigned j = inst.n0 + 1; j <= nl; ++j)
      h.add(zz_term(inst.jzz, one_hot_qubit(i), one_hot_qubit(j)));
  // Z~1 + Z~2 = Z1h - Z4h.
  h.add(z_term(c0, 1));
  h.add(z_term(-c0, 4));
  for (unsigned j = inst.n0 + 1; j <= nl; ++j) {
    h.add(zz_term(inst.jzz, one_hot_qubit(j), 1));
    h.add(zz_term(-inst.jzz, one_hot_qubit(j), 4));
  }
  return h;
}

/** One-hot problem Hamiltonian with plain qubits replaced by chain pairs. */
inline Observable one_hot_hom_problem(const ToyInstance& inst) {
  const unsigned n = qubit_count(Variant::OneHotHom, inst.n0);
  const unsigned nl = inst.logical_qubits();
  Observable h(n);
  const double c0 = inst.g0_field(), c1 = inst.g1_field();
  auto add_field = [&](unsigned i, double c) {
    const auto [a, b] = chain_qubits(i);
    h += chain_logical_z(n, a, b, c);
  };
  for (unsigned i = 3; i <= inst.n0; ++i) add_field(i, c0);
  for (unsigned j = inst.n0 + 1; j <= nl; ++j) add_field(j, c1);
  for (unsigned i = 3; i <= inst.n0; ++i)
    for (unsigned j = inst.n0 + 1; j <= nl; ++j) {
      const auto [a1, a2] = chain_qubits(i);
      const auto [b1, b2] = chain_qubits(j);
      for (unsigned a : {a1, a2})
        for (unsigned b : {b1, b2}) h.add(zz_term(inst.jzz / 4.0, a, b));
    }
  h.add(z_term(c0, 1));
  h.add(z_term(-c0, 4));
  for (unsigned j = inst.n0 + 1; j <= nl; ++j) {
    const auto [b1, b2] = chain_qubits(j);
    for (unsigned b : {b1, b2}) {
      h.add(zz_term(inst.jzz / 2.0, b, 1));
      h.add(zz_term(-inst.jzz / 2.0, b, 4));
    }
  }
  return h;
}

struct AnnealModel {
  ScheduledObservable schedule;
  QubitLayout layout;
  Variant variant = Variant::TF;
  unsigned n0 = 2;
};

inline AnnealModel build_anneal(const ToyInstance& inst) {
  inst.validate();
  AnnealModel m;
  m.variant = inst.variant;
  m.n0 = inst.n0;
  m.layout = make_layout(inst.variant, inst.n0);
  const unsigned n = m.layout.n_qubits();
  m.schedule.n_qubits = n;
  m.schedule.cp = inst.cp;
  switch (inst.variant) {
    case Variant::TF:
      m.schedule.add(ScheduleKind::OneMinusS, transverse_driver(n));
      m.schedule.add(ScheduleKind::S, build_problem(inst));
      break;
    case Variant::XX: {
      Observable drv = transverse_driver(n);
      drv.add(xx_term(-1.0, 1, 2));
      m.schedule.add(ScheduleKind::OneMinusS, std::move(drv));
      m.schedule.add(ScheduleKind::S, build_problem(inst));
      break;
    }
    case Variant::OneHot:
      m.schedule.add(ScheduleKind::Constant, one_hot_penalty(inst.cp, n));
      m.schedule.add(ScheduleKind::OneMinusSOver2Cp, transverse_driver(n, 5));
      m.schedule.add(ScheduleKind::SqrtOneMinusS, transverse_driver(n, 1, 4));
      m.schedule.add(ScheduleKind::SOver2Cp, one_hot_problem(inst));
      break;
    case Variant::OneHotHom: {
      Observable pen = one_hot_penalty(inst.cp, n);
      for (unsigned i = 3; i <= inst.logical_qubits(); ++i) {
        const auto [a, b] = chain_qubits(i);
        pen.add(zz_term(-2.0 * inst.cp, a, b));
      }
      m.schedule.add(ScheduleKind::Constant, std::move(pen));
      m.schedule.add(ScheduleKind::SqrtOneMinusS, transverse_driver(n));
      m.schedule.add(ScheduleKind::SOver2Cp, one_hot_hom_problem(inst));
      break;
    }
  }
  return m;
}

/**
 * Logical basis index (on 2n0+1 qubits) of a physical basis state, or empty
 * when the state violates a gadget constraint.
 */
inline std::optional<BasisIndex> logical_index(const QubitLayout& layout, unsigned n0,
                                               BasisIndex phys) {
  const unsigned n = layout.n_qubits();
  const unsigned nl = 2 * n0 + 1;
  BasisIndex gadget = 0;
  bool has_gadget = false;
  BasisIndex out = 0;
  for (unsigned q = 1; q <= n; ++q) {
    const auto& r = layout.roles[q - 1];
    const bool bit = qubit_bit(phys, q, n);
    switch (r.kind) {
      case QubitRole::Kind::Problem:
        if (bit) out |= qubit_mask(r.index, nl);
        break;
      case QubitRole::Kind::Gadget:
        has_gadget = true;
        if (bit) gadget |= qubit_mask(r.index, 4);
        break;
      case QubitRole::Kind::ChainMember:
        if (r.member == 1) {
          if (bit != qubit_bit(phys, q + 1, n)) return std::nullopt;
          if (bit) out |= qubit_mask(r.index, nl);
        }
        break;
    }
  }
  if (has_gadget) {
    const auto l = decode_one_hot(gadget);
    if (!l) return std::nullopt;
    if (*l & 2u) out |= qubit_mask(1, nl);
    if (*l & 1u) out |= qubit_mask(2, nl);
  }
  return out;
}

/** A = constraint-satisfying physical states, in ascending index order. */
inline SubspacePartition feasible_partition(const QubitLayout& layout, unsigned n0) {
  return partition_by(layout.n_qubits(), [&](BasisIndex i) {
    return logical_index(layout, n0, i).has_value();
  });
}

}  // namespace xxgadget
