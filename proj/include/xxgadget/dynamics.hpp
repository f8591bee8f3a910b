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
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xxgadget/chebyshev.hpp"
#include "xxgadget/effective.hpp"
#include "xxgadget/eigensolver.hpp"
#include "xxgadget/krylov.hpp"
#include "xxgadget/toy_problem.hpp"

namespace xxgadget {

/** Map from normalised physical time x = t / T to the schedule parameter s. */
enum class SweepProfile { Linear, Smooth };

inline double profile_value(SweepProfile p, double x) {
  x = std::clamp(x, 0.0, 1.0);
  switch (p) {
    case SweepProfile::Linear: return x;
    case SweepProfile::Smooth: return x * x * (3.0 - 2.0 * x);
  }
  return x;
}

/** How each exponential in a step is applied. */
enum class Propagator { Chebyshev, Krylov };

struct EvolutionSpec {
  const CompiledSchedule* schedule = nullptr;
  /** t_a; the run covers t in [0, time_scaling * anneal_time]. */
  double anneal_time = 1.0;
  double time_scaling = 1.0;
  /** Global error target; each step keeps its local error below tolerance * dt / T. */
  double tolerance = 1e-8;
  SweepProfile profile = SweepProfile::Linear;
  Propagator propagator = Propagator::Chebyshev;
  /**
   * When positive, step sizes at or above this are rounded down to a multiple
   * of it. Useful when the constant part of H has levels on a lattice, so that
   * its phase over each exponential of a step is trivial. The error estimate
   * still decides acceptance.
   */
  double step_quantum = 0.0;
  /** Feasible subspace: restricts the final ground space and defines leakage. */
  std::optional<SubspacePartition> feasible;
  bool compute_pgs = true;
  /** Abort when | ||psi|| - 1 | exceeds this. */
  double norm_abort = 1e-6;
  /** Called after every accepted step with (t, psi). */
  std::function<void(double, const StateVector&)> observer;
};

struct EvolutionResult {
  StateVector final_state;
  double p_gs = std::numeric_limits<double>::quiet_NaN();
  double norm_drift = 0.0;
  double leakage = 0.0;
  double peak_leakage = 0.0;
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t matvecs = 0;
};

/** Probability outside the A set, i.e. on the listed B indices. */
inline double leakage(const StateVector& psi, const SubspacePartition& p) {
  double out = 0.0;
  for (auto i : p.b) out += std::norm(psi[static_cast<Eigen::Index>(i)]);
  return out;
}

inline double default_degeneracy_tol(double e0) { return 1e-8 * std::abs(e0) + 1e-10; }

/**
 * Squared norm of the projection of psi onto the ground space of h, i.e. all
 * eigenvectors within degeneracy_tol of E0. With `restrict_to`, the ground
 * space of h restricted to the A set is used instead.
 */
inline double ground_state_probability(const StateVector& psi, const SparseOperator& h,
                                       std::optional<double> degeneracy_tol = std::nullopt,
                                       const SubspacePartition* restrict_to = nullptr,
                                       const EigenOptions& eig = {}) {
  if (static_cast<std::size_t>(psi.size()) != h.dim)
    throw std::invalid_argument("state dimension does not match the operator");
  SparseOperator sub;
  StateVector phi;
  if (restrict_to != nullptr) {
    sub = detail::restrict_sparse(h, restrict_to->a, 0.0);
    phi.resize(static_cast<Eigen::Index>(restrict_to->a.size()));
    for (std::size_t j = 0; j < restrict_to->a.size(); ++j)
      phi[static_cast<Eigen::Index>(j)] = psi[static_cast<Eigen::Index>(restrict_to->a[j])];
  } else {
    sub = h;
    phi = psi;
  }
  if (sub.is_diagonal()) {
    const Eigen::VectorXcd d = sub.diagonal();
    const double e0 = d.real().minCoeff();
    const double tol = degeneracy_tol.value_or(default_degeneracy_tol(e0));
    double p = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (d[i].real() - e0 <= tol) p += std::norm(phi[i]);
    return p;
  }
  EigenOptions o = eig;
  o.want_vectors = true;
  std::size_t k = std::min<std::size_t>(4, sub.dim);
  for (;;) {
    const auto r = lowest_eigs(sub, k, o);
    const double e0 = r.values[0];
    const double tol = degeneracy_tol.value_or(default_degeneracy_tol(e0));
    const bool all_degenerate = r.values[r.values.size() - 1] - e0 <= tol;
    if (all_degenerate && k < sub.dim) {
      k = std::min<std::size_t>(2 * k, sub.dim);
      continue;
    }
    double p = 0.0;
    for (Eigen::Index j = 0; j < r.values.size(); ++j)
      if (r.values[j] - e0 <= tol) p += std::norm(r.vectors.col(j).dot(phi));
    return p;
  }
}

namespace detail {

struct Cf4 {
  static constexpr double kSqrt3 = 1.7320508075688772;
  static constexpr double c1 = 0.5 - kSqrt3 / 6.0;
  static constexpr double c2 = 0.5 + kSqrt3 / 6.0;
  static constexpr double a1 = 0.25 - kSqrt3 / 6.0;
  static constexpr double a2 = 0.25 + kSqrt3 / 6.0;
};

inline constexpr double kChebyshevTolerance = 1e-15;

class Cf4Stepper {
 public:
  Cf4Stepper(const EvolutionSpec& spec, double total)
      : spec_(spec), total_(total) {}

  /** One commutator-free fourth-order step from t to t + dt. */
  StateVector step(const StateVector& psi, double t, double dt, double kry_tol) {
    const auto& sched = spec_.schedule->schedule();
    const auto w1 = sched.weights(s_at(t + Cf4::c1 * dt));
    const auto w2 = sched.weights(s_at(t + Cf4::c2 * dt));
    std::vector<double> wa(w1.size()), wb(w1.size());
    for (std::size_t g = 0; g < w1.size(); ++g) {
      wa[g] = Cf4::a2 * w1[g] + Cf4::a1 * w2[g];
      wb[g] = Cf4::a1 * w1[g] + Cf4::a2 * w2[g];
    }
    return expm(spec_.schedule->combine(wb), expm(spec_.schedule->combine(wa), psi, dt, kry_tol),
                dt, kry_tol);
  }

  StateVector expm(const SparseOperator& h, const StateVector& psi, double dt, double tol) {
    if (spec_.propagator == Propagator::Krylov) {
      KrylovOptions ko;
      ko.tolerance = tol;
      KrylovStats ks;
      StateVector out = krylov_expm(h, psi, dt, ko, &ks);
      matvecs_ += ks.matvecs;
      return out;
    }
    // The series is cheap to extend, so it is always cut near rounding level;
    // a looser cut would show up as norm drift over many steps.
    ChebyshevStats cs;
    StateVector out;
    if (const auto real = real_view(h))
      out = chebyshev_expm(*real, psi, dt, kChebyshevTolerance, &cs);
    else
      out = chebyshev_expm(h, psi, dt, kChebyshevTolerance, &cs);
    matvecs_ += cs.matvecs;
    return out;
  }

  double s_at(double t) const { return profile_value(spec_.profile, t / total_); }
  std::size_t matvecs() const { return matvecs_; }

 private:
  const EvolutionSpec& spec_;
  double total_;
  std::size_t matvecs_ = 0;
};

}  // namespace detail

/**
 * Step quantum for a constant, diagonal part of H whose levels lie on a
 * lattice of spacing w: 8 pi / w. Every exponential of a fourth-order step
 * carries half of the constant weight, and the two half steps of the error
 * estimate halve it again, so their phase is then a multiple of 2 pi. Returns
 * 0 when the part is not diagonal, has a single level or no common spacing.
 */
inline double step_quantum_for(const Observable& constant_part) {
  for (const auto& t : constant_part.terms())
    for (const auto& f : t.factors)
      if (f.second != PauliAxis::Z) return 0.0;
  const Eigen::VectorXd d = assemble(constant_part).diagonal().real();
  std::vector<double> levels(d.data(), d.data() + d.size());
  std::sort(levels.begin(), levels.end());
  const double span = levels.back() - levels.front();
  if (span <= 0.0) return 0.0;
  const double eps = 1e-9 * span;
  std::vector<double> distinct{levels.front()};
  for (double v : levels)
    if (v - distinct.back() > eps) distinct.push_back(v);
  double w = span;
  for (std::size_t i = 1; i < distinct.size(); ++i) w = std::min(w, distinct[i] - distinct[i - 1]);
  for (double v : distinct) {
    const double k = (v - distinct.front()) / w;
    if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) return 0.0;
  }
  return 8.0 * std::numbers::pi / w;
}

/** step_quantum_for over the Constant groups of a schedule. */
inline double step_quantum_for(const ScheduledObservable& sched) {
  Observable c(sched.n_qubits);
  bool any = false;
  for (const auto& [kind, obs] : sched.groups)
    if (kind == ScheduleKind::Constant) {
      c = c + obs;
      any = true;
    }
  return any ? step_quantum_for(c) : 0.0;
}

/**
 * Integrates i d psi/dt = H(s(t)) psi over t in [0, time_scaling * anneal_time]
 * with s(t) = profile(t / (time_scaling * anneal_time)). Commutator-free
 * fourth-order exponential integrator with Chebyshev (or Krylov) exponentials;
 * the step size
 * is chosen by step doubling. The state is never renormalised.
 */
inline EvolutionResult evolve(const EvolutionSpec& spec, const StateVector& initial) {
  if (spec.schedule == nullptr) throw std::invalid_argument("evolution needs a schedule");
  if (!(spec.anneal_time > 0.0) || !(spec.time_scaling > 0.0))
    throw std::invalid_argument("anneal time and time scaling must be positive");
  if (!(spec.tolerance > 0.0 && spec.tolerance <= 1e-4))
    throw std::invalid_argument("integrator tolerance must lie in (0, 1e-4]");
  if (static_cast<std::size_t>(initial.size()) != spec.schedule->dim())
    throw std::invalid_argument("initial state dimension does not match the schedule");
  if (std::abs(initial.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("initial state must be normalised");

  const double total = spec.time_scaling * spec.anneal_time;
  detail::Cf4Stepper stepper(spec, total);
  EvolutionResult res;
  StateVector psi = initial;
  double t = 0.0;
  double dt = total / 16.0;
  const double q = spec.step_quantum;
  // Below this the difference of the two solutions is rounding noise.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon();
  int short_steps = 0;
  while (t < total) {
    dt = std::min(dt, total - t);
    if (q > 0.0 && dt >= q && dt < total - t) dt = std::floor(dt / q) * q;
    if (dt <= 1e-14 * total) throw std::runtime_error("integrator step size underflow");
    // The floor admits the last steps before a schedule end point where a
    // weight like sqrt(1 - s) has unbounded slope; there the local error only
    // falls as dt^(3/2).
    const double target = spec.tolerance * std::max(dt / total, 1e-6);
    const double kry = std::max(1e-16, 1e-3 * target);
    const StateVector full = stepper.step(psi, t, dt, kry);
    const StateVector half = stepper.step(stepper.step(psi, t, 0.5 * dt, kry), t + 0.5 * dt,
                                          0.5 * dt, kry);
    const double err = (full - half).norm();
    const double bound = std::max(target, noise);
    const bool accepted = err <= bound;
    double factor = err == 0.0 ? 2.0 : std::clamp(0.9 * std::pow(bound / err, 0.25), 0.2, 2.0);
    if (accepted) factor = std::max(factor, 1.0);
    if (accepted) {
      psi = half;
      t = (total - t - dt <= 1e-15 * total) ? total : t + dt;
      ++res.steps;
      const double drift = std::abs(psi.norm() - 1.0);
      res.norm_drift = std::max(res.norm_drift, drift);
      if (drift > spec.norm_abort)
        throw std::runtime_error("norm drift " + std::to_string(drift) + " at t = " +
                                 std::to_string(t) + " exceeds the abort threshold");
      if (spec.feasible) res.peak_leakage = std::max(res.peak_leakage, leakage(psi, *spec.feasible));
      if (spec.observer) spec.observer(t, psi);
    } else {
      ++res.rejected;
    }
    dt *= factor;
    // Steps just short of the quantum can be far less accurate than the
    // quantum itself, so growth by doubling may never get back to it.
    if (q > 0.0 && dt < q && accepted && ++short_steps >= 8) {
      dt = q;
      short_steps = 0;
    }
  }
  res.final_state = psi;
  res.matvecs = stepper.matvecs();
  if (spec.feasible) res.leakage = leakage(psi, *spec.feasible);
  if (spec.compute_pgs) {
    const SubspacePartition* restrict_to = spec.feasible ? &*spec.feasible : nullptr;
    res.p_gs = ground_state_probability(psi, spec.schedule->at(profile_value(spec.profile, 1.0)),
                                        std::nullopt, restrict_to);
  }
  return res;
}

/** Ground state of H(0) of a schedule, as the start of an anneal. */
inline StateVector initial_ground_state(const CompiledSchedule& sched,
                                        const SubspacePartition* restrict_to = nullptr) {
  const SparseOperator h0 = sched.at(0.0);
  EigenOptions o;
  o.want_vectors = true;
  if (restrict_to == nullptr) {
    const auto r = lowest_eigs(h0, 2, o);
    if (r.values[1] - r.values[0] < 1e-9)
      throw std::domain_error("the initial Hamiltonian has a degenerate ground state");
    StateVector psi = r.vectors.col(0);
    return psi / psi.norm();
  }
  const auto sub = detail::restrict_sparse(h0, restrict_to->a, 0.0);
  const auto r = lowest_eigs(sub, 2, o);
  if (r.values[1] - r.values[0] < 1e-9)
    throw std::domain_error("the initial Hamiltonian has a degenerate ground state");
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(sched.dim()));
  for (std::size_t j = 0; j < restrict_to->a.size(); ++j)
    psi[static_cast<Eigen::Index>(restrict_to->a[j])] = r.vectors(static_cast<Eigen::Index>(j), 0);
  return psi / psi.norm();
}

// ------------------------------------------------------- state preparation

struct PrepSpec {
  unsigned n_qubits = 1;
  /** Target configuration as a basis index (qubit 1 = most significant bit). */
  BasisIndex z = 0;
  double prep_time = 1.0;
  /** Constraint terms, held constant during the preparation. */
  Observable constraint{1};
  SweepProfile profile = SweepProfile::Linear;
  double tolerance = 1e-8;
  /** Passed to EvolutionSpec::step_quantum; by default taken from the constraint. */
  std::optional<double> step_quantum;
};

/** sum_i (2 z_i - 1) Z_i, whose ground state is |z>. */
inline Observable initial_field(unsigned n_qubits, BasisIndex z) {
  Observable h(n_qubits);
  for (unsigned q = 1; q <= n_qubits; ++q)
    h.add(z_term(qubit_bit(z, q, n_qubits) ? 1.0 : -1.0, q));
  return h;
}

/** (1 - u) H_init + u (-sum X) + constraint. */
inline ScheduledObservable prep_schedule(const PrepSpec& p) {
  ScheduledObservable s;
  s.n_qubits = p.n_qubits;
  s.add(ScheduleKind::OneMinusS, initial_field(p.n_qubits, p.z));
  s.add(ScheduleKind::S, transverse_driver(p.n_qubits));
  s.add(ScheduleKind::Constant, p.constraint);
  return s;
}

/** -sum X + constraint: the state the preparation aims for. */
inline Observable constrained_driver(const Observable& constraint) {
  return transverse_driver(constraint.n_qubits()) + constraint;
}

/** |z> must minimise the (diagonal part of the) constraint. */
inline void validate_prep(const PrepSpec& p) {
  if (p.constraint.n_qubits() != p.n_qubits)
    throw std::invalid_argument("constraint register does not match the preparation");
  if (p.z >= (BasisIndex{1} << p.n_qubits)) throw std::out_of_range("z outside the register");
  if (!(p.prep_time >= 0.0)) throw std::invalid_argument("prep time must be non-negative");
  const auto c = assemble(p.constraint);
  const Eigen::VectorXcd d = c.diagonal();
  const double emin = d.real().minCoeff();
  const double ez = d[static_cast<Eigen::Index>(p.z)].real();
  if (ez - emin > 1e-9 * std::max(1.0, std::abs(emin)))
    throw std::invalid_argument("configuration " + bitstring(p.z, p.n_qubits) +
                                " violates the constraint");
}

inline StateVector prepare_initial(const PrepSpec& p, EvolutionResult* diagnostics = nullptr) {
  validate_prep(p);
  const std::size_t dim = std::size_t{1} << p.n_qubits;
  StateVector z = basis_state(dim, p.z);
  if (p.prep_time == 0.0) return z;
  const CompiledSchedule sched(prep_schedule(p));
  EvolutionSpec spec;
  spec.schedule = &sched;
  spec.anneal_time = p.prep_time;
  spec.tolerance = p.tolerance;
  spec.profile = p.profile;
  spec.step_quantum = p.step_quantum.value_or(step_quantum_for(p.constraint));
  spec.compute_pgs = false;
  auto r = evolve(spec, z);
  if (diagnostics != nullptr) *diagnostics = r;
  return r.final_state;
}

// ------------------------------------------------------------------- CSV

struct PgsRecord {
  double ta = 0.0;
  Variant variant = Variant::TF;
  unsigned n0 = 0;
  double cp = 0.0;
  double pgs = 0.0;
  double leakage = 0.0;
  double norm_drift = 0.0;
};

inline void write_pgs_csv(std::ostream& os, const std::vector<PgsRecord>& rs) {
  os << "ta,variant,n0,cp,pgs,leakage,norm_drift\n";
  for (const auto& r : rs)
    os << format_real(r.ta) << ',' << to_string(r.variant) << ',' << r.n0 << ','
       << format_real(r.cp) << ',' << format_real(r.pgs) << ',' << format_real(r.leakage) << ','
       << format_real(r.norm_drift) << '\n';
}

/**
 * Anneal of a toy instance from the ground state of H(0). One-hot variants
 * run for 2 C_p t_a and are scored on the feasible subspace.
 */
inline EvolutionResult anneal_toy(const ToyInstance& inst, double ta, double tolerance = 1e-8,
                                  SweepProfile profile = SweepProfile::Linear) {
  const auto model = build_anneal(inst);
  const CompiledSchedule sched(model.schedule);
  EvolutionSpec spec;
  spec.schedule = &sched;
  spec.anneal_time = ta;
  spec.tolerance = tolerance;
  spec.profile = profile;
  const bool gadget = inst.variant == Variant::OneHot || inst.variant == Variant::OneHotHom;
  spec.time_scaling = gadget ? 2.0 * inst.cp : 1.0;
  if (gadget) {
    spec.feasible = feasible_partition(model.layout, inst.n0);
    spec.step_quantum = step_quantum_for(model.schedule);
  }
  return evolve(spec, initial_ground_state(sched));
}

}  // namespace xxgadget
