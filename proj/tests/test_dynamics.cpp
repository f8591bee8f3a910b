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


#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "xxgadget/dynamics.hpp"
#include "xxgadget/gadgets.hpp"

using namespace xxgadget;
using Catch::Approx;

namespace {

// P_gs of the XX instance at n0 = 3, t_a = 5, from an independent
// dense-matrix integration (scipy expm on a fine grid).
constexpr double kXxPgsTa5 = 0.28871573;

oracle::M random_hermitian_obs(std::mt19937_64& rng, unsigned n, Observable* out) {
  Observable o(n);
  for (unsigned q = 1; q <= n; ++q) {
    o.add(x_term(oracle::uniform(rng, -1, 1), q));
    o.add(z_term(oracle::uniform(rng, -2, 2), q));
    if (q > 1) {
      o.add(zz_term(oracle::uniform(rng, -1, 1), q - 1, q));
      o.add(PauliTerm(oracle::uniform(rng, -1, 1), {{q - 1, PauliAxis::X}, {q, PauliAxis::Y}}));
    }
  }
  *out = o;
  return oracle::dense(o);
}

StateVector random_state(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> g;
  StateVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(g(rng), g(rng));
  return v / v.norm();
}

/** Classical RK4 on i psi' = H(s(t)) psi with a dense H, fine fixed step. */
StateVector rk4_oracle(const ScheduledObservable& sched, const StateVector& psi0, double total,
                       int steps) {
  std::vector<oracle::M> mats;
  for (const auto& g : sched.groups) mats.push_back(oracle::dense(g.second));
  auto h_at = [&](double t) {
    const auto w = sched.weights(std::min(1.0, t / total));
    oracle::M h = oracle::M::Zero(mats[0].rows(), mats[0].cols());
    for (std::size_t g = 0; g < mats.size(); ++g) h += w[g] * mats[g];
    return h;
  };
  const double dt = total / steps;
  const oracle::C mi(0, -1);
  StateVector psi = psi0;
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const oracle::M h0 = h_at(t), h1 = h_at(t + dt / 2), h2 = h_at(t + dt);
    const StateVector k1 = mi * (h0 * psi);
    const StateVector k2 = mi * (h1 * (psi + dt / 2 * k1));
    const StateVector k3 = mi * (h1 * (psi + dt / 2 * k2));
    const StateVector k4 = mi * (h2 * (psi + dt * k3));
    psi += dt / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return psi;
}

}  // namespace

TEST_CASE("bessel sequence matches the standard library") {
  for (double z : {0.1, 1.0, 7.5, 40.0, 300.0}) {
    const auto j = detail::bessel_j_sequence(z, 80);
    for (unsigned k = 0; k <= 80; ++k)
      CHECK(std::abs(j[k] - std::cyl_bessel_j(double(k), z)) < 1e-13);
  }
}

TEST_CASE("gershgorin bounds enclose the spectrum") {
  std::mt19937_64 rng(11);
  Observable o;
  const auto m = random_hermitian_obs(rng, 4, &o);
  const auto [lo, hi] = gershgorin_bounds(assemble(o));
  const auto ev = oracle::eigvals(m);
  CHECK(lo <= ev[0] + 1e-12);
  CHECK(hi >= ev[ev.size() - 1] - 1e-12);
}

TEST_CASE("chebyshev and krylov exponentials match dense exponentials") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    Observable o;
    const auto m = random_hermitian_obs(rng, 5, &o);
    const auto h = assemble(o);
    const StateVector psi = random_state(rng, 32);
    for (double tau : {0.01, 0.7, 25.0, -3.0}) {
      const auto ref = oracle::evolve_exact(m, psi, tau);
      CHECK((chebyshev_expm(h, psi, tau, 1e-14) - ref).norm() < 1e-11);
      CHECK((krylov_expm(h, psi, tau) - ref).norm() < 1e-10);
    }
  }
  // Real-matrix path.
  Observable r(4);
  for (unsigned q = 1; q <= 4; ++q) {
    r.add(x_term(-0.7 * q, q));
    r.add(z_term(0.3 * q, q));
  }
  r.add(zz_term(50.0, 1, 2));
  const auto hr = assemble(r);
  const auto real = real_view(hr);
  REQUIRE(real.has_value());
  const StateVector psi = random_state(rng, 16);
  const auto ref = oracle::evolve_exact(oracle::dense(r), psi, 1.3);
  CHECK((chebyshev_expm(*real, psi, 1.3, 1e-14) - ref).norm() < 1e-11);
  CHECK((chebyshev_expm(hr, psi, 1.3, 1e-14) - ref).norm() < 1e-11);
  CHECK(std::abs(chebyshev_expm(*real, psi, 1.3, 1e-15).norm() - 1.0) < 1e-13);
}

TEST_CASE("profiles") {
  CHECK(profile_value(SweepProfile::Linear, 0.25) == 0.25);
  CHECK(profile_value(SweepProfile::Smooth, 0.0) == 0.0);
  CHECK(profile_value(SweepProfile::Smooth, 0.5) == 0.5);
  CHECK(profile_value(SweepProfile::Smooth, 1.0) == 1.0);
  CHECK(profile_value(SweepProfile::Smooth, 1e-3) < 1e-5);
  CHECK(profile_value(SweepProfile::Smooth, 2.0) == 1.0);
}

TEST_CASE("rabi flop under a constant -X") {
  ScheduledObservable s;
  s.n_qubits = 1;
  s.add(ScheduleKind::Constant, Observable(1, {x_term(-1.0, 1)}));
  const CompiledSchedule c(s);
  EvolutionSpec spec;
  spec.schedule = &c;
  spec.anneal_time = std::numbers::pi / 2;
  spec.compute_pgs = false;
  const auto r = evolve(spec, basis_state(2, 0));
  // exp(i pi/2 X)|0> = i|1>.
  CHECK(std::abs(r.final_state[0]) < 1e-9);
  CHECK(std::abs(r.final_state[1] - Complex(0, 1)) < 1e-9);
  CHECK(r.norm_drift < 1e-12);
}

TEST_CASE("time-dependent evolution matches a fine RK4 integration") {
  std::mt19937_64 rng(23);
  ScheduledObservable s;
  s.n_qubits = 3;
  Observable a, b, c, d;
  random_hermitian_obs(rng, 3, &a);
  random_hermitian_obs(rng, 3, &b);
  random_hermitian_obs(rng, 3, &c);
  random_hermitian_obs(rng, 3, &d);
  s.add(ScheduleKind::Constant, a);
  s.add(ScheduleKind::OneMinusS, b);
  s.add(ScheduleKind::S, c);
  s.add(ScheduleKind::SqrtOneMinusS, d);
  const CompiledSchedule cs(s);
  const StateVector psi0 = random_state(rng, 8);
  EvolutionSpec spec;
  spec.schedule = &cs;
  spec.anneal_time = 3.0;
  spec.tolerance = 1e-10;
  spec.compute_pgs = false;
  const auto r = evolve(spec, psi0);
  const auto ref = rk4_oracle(s, psi0, 3.0, 60000);
  CHECK((r.final_state - ref).norm() < 1e-7);

  spec.propagator = Propagator::Krylov;
  CHECK((evolve(spec, psi0).final_state - ref).norm() < 1e-7);

  // The same run with a doubled time scaling equals a doubled anneal time.
  spec.propagator = Propagator::Chebyshev;
  spec.anneal_time = 1.5;
  spec.time_scaling = 2.0;
  CHECK((evolve(spec, psi0).final_state - ref).norm() < 1e-7);
}

TEST_CASE("evolve validates its input") {
  ScheduledObservable s;
  s.n_qubits = 1;
  s.add(ScheduleKind::Constant, Observable(1, {x_term(-1.0, 1)}));
  const CompiledSchedule c(s);
  EvolutionSpec spec;
  const StateVector psi = basis_state(2, 0);
  CHECK_THROWS_AS(evolve(spec, psi), std::invalid_argument);
  spec.schedule = &c;
  spec.tolerance = 1e-3;
  CHECK_THROWS_AS(evolve(spec, psi), std::invalid_argument);
  spec.tolerance = 1e-8;
  spec.anneal_time = 0.0;
  CHECK_THROWS_AS(evolve(spec, psi), std::invalid_argument);
  spec.anneal_time = 1.0;
  CHECK_THROWS_AS(evolve(spec, basis_state(4, 0)), std::invalid_argument);
  CHECK_THROWS_AS(evolve(spec, StateVector(2.0 * psi)), std::invalid_argument);
}

TEST_CASE("ground state probability") {
  // Non-degenerate: exact ground state and an orthogonal state.
  const Observable h(1, {x_term(-1.0, 1)});
  StateVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  StateVector minus(2);
  minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  CHECK(ground_state_probability(plus, assemble(h)) == Approx(1.0).margin(1e-12));
  CHECK(ground_state_probability(minus, assemble(h)) == Approx(0.0).margin(1e-12));

  // Degenerate, non-diagonal: -X1 on two qubits has ground space |+>|any>.
  const auto h2 = assemble(Observable(2, {x_term(-1.0, 1)}));
  CHECK(ground_state_probability(basis_state(4, 0), h2) == Approx(0.5).margin(1e-12));

  // Degenerate, diagonal: Z1 has ground space |1>|any>.
  const auto z1 = assemble(Observable(2, {z_term(1.0, 1)}));
  StateVector both = StateVector::Zero(4);
  both[2] = both[3] = 1.0 / std::sqrt(2.0);
  CHECK(ground_state_probability(both, z1) == Approx(1.0).margin(1e-12));
  StateVector half = StateVector::Zero(4);
  half[0] = half[2] = 1.0 / std::sqrt(2.0);
  CHECK(ground_state_probability(half, z1) == Approx(0.5).margin(1e-12));

  // Restricted to one excitation, Z1 + Z2 is flat, so any state there scores 1.
  const auto zz = assemble(Observable(2, {z_term(1.0, 1), z_term(1.0, 2)}));
  const auto p = partition_hamming(2, 1);
  CHECK(ground_state_probability(basis_state(4, 1), zz) == Approx(0.0).margin(1e-12));
  CHECK(ground_state_probability(basis_state(4, 1), zz, std::nullopt, &p) ==
        Approx(1.0).margin(1e-12));
}

TEST_CASE("leakage") {
  const auto p = partition_hamming(4, 1);
  CHECK(leakage(basis_state(16, 0b0100), p) == 0.0);
  const StateVector u = StateVector::Constant(16, 0.25);
  CHECK(leakage(u, p) == Approx(0.75).epsilon(1e-14));
}

TEST_CASE("step quantum from the level lattice") {
  CHECK(step_quantum_for(one_hot_penalty(100.0, 4)) ==
        Approx(2 * std::numbers::pi / 100.0).epsilon(1e-12));
  CHECK(step_quantum_for(Observable(2, {zz_term(-200.0, 1, 2)})) ==
        Approx(2 * std::numbers::pi / 100.0).epsilon(1e-12));
  CHECK(step_quantum_for(Observable(2, {z_term(1.0, 1), z_term(std::sqrt(2.0), 2)})) == 0.0);
  CHECK(step_quantum_for(Observable(1, {x_term(1.0, 1)})) == 0.0);
  CHECK(step_quantum_for(Observable(1)) == 0.0);

  ToyInstance inst;
  inst.variant = Variant::OneHot;
  CHECK(step_quantum_for(build_anneal(inst).schedule) ==
        Approx(2 * std::numbers::pi / inst.cp).epsilon(1e-12));
  inst.variant = Variant::XX;
  CHECK(step_quantum_for(build_anneal(inst).schedule) == 0.0);
}

TEST_CASE("sudden limit leaves the initial state") {
  ToyInstance inst;
  inst.variant = Variant::TF;
  const auto r = anneal_toy(inst, 1e-4, 1e-8);
  // |+>^5 against the unique classical ground state.
  CHECK(r.p_gs == Approx(1.0 / 32.0).margin(1e-4));
}

TEST_CASE("slow anneal approaches the ground state") {
  ToyInstance inst;
  inst.variant = Variant::XX;
  const auto r = anneal_toy(inst, 300.0, 1e-8);
  CHECK(r.p_gs > 0.97);
  CHECK(r.norm_drift < 1e-8);
}

TEST_CASE("XX anneal fixture and tolerance convergence") {
  ToyInstance inst;
  inst.n0 = 3;
  inst.variant = Variant::XX;
  const auto a = anneal_toy(inst, 5.0, 1e-8);
  const auto b = anneal_toy(inst, 5.0, 5e-9);
  CHECK(std::abs(a.p_gs - b.p_gs) < 1e-6);
  CHECK(a.p_gs == Approx(kXxPgsTa5).margin(1e-6));
  CHECK(a.norm_drift < 1e-8);
}

TEST_CASE("one-hot anneal converges under tolerance halving") {
  ToyInstance inst;
  inst.n0 = 2;
  inst.variant = Variant::OneHot;
  const auto a = anneal_toy(inst, 2.0, 1e-4);
  const auto b = anneal_toy(inst, 2.0, 5e-5);
  CHECK(std::abs(a.p_gs - b.p_gs) < 1e-6);
  CHECK(a.norm_drift < 1e-8);
  CHECK(a.leakage < 1e-2);
  // Same run without the step quantum.
  const auto model = build_anneal(inst);
  const CompiledSchedule sched(model.schedule);
  EvolutionSpec spec;
  spec.schedule = &sched;
  spec.anneal_time = 2.0;
  spec.time_scaling = 2.0 * inst.cp;
  spec.tolerance = 1e-4;
  spec.feasible = feasible_partition(model.layout, inst.n0);
  const auto c = evolve(spec, initial_ground_state(sched));
  CHECK(std::abs(a.p_gs - c.p_gs) < 1e-6);
}

TEST_CASE("leakage falls with C_p") {
  double last = 1.0;
  for (double cp : {50.0, 100.0, 200.0}) {
    ToyInstance inst;
    inst.n0 = 2;
    inst.cp = cp;
    inst.variant = Variant::OneHot;
    const auto r = anneal_toy(inst, 1.0, 1e-4);
    CHECK(r.peak_leakage < last);
    last = r.peak_leakage;
  }
}

TEST_CASE("gadget evolution follows the effective Hamiltonian on the 2 C_p clock") {
  OneHotSpec g;
  g.d = {1.0, 0.8, 1.2, 0.9};
  const double tau = 3.0;
  double last = 1.0;
  for (double cp : {100.0, 400.0}) {
    g.cp = cp;
    ScheduledObservable s;
    s.n_qubits = 4;
    s.add(ScheduleKind::Constant, one_hot_physical(g));
    const CompiledSchedule c(s);
    EvolutionSpec spec;
    spec.schedule = &c;
    spec.anneal_time = tau;
    spec.time_scaling = 2.0 * cp;
    spec.tolerance = 1e-6;
    spec.compute_pgs = false;
    spec.step_quantum = step_quantum_for(s);
    const auto r = evolve(spec, basis_state(16, kOneHotLogicalBasis[0]));

    // 2 C_p H_eff does not depend on C_p.
    const oracle::M heff = 2.0 * cp * oracle::dense(one_hot_effective_closed(g));
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(4);
    e0[0] = 1.0;
    const auto want = oracle::evolve_exact(heff, e0, tau);
    Eigen::VectorXcd got(4);
    for (int l = 0; l < 4; ++l) got[l] = r.final_state[static_cast<Eigen::Index>(kOneHotLogicalBasis[l])];
    const double infidelity = 1.0 - std::norm(want.dot(got));
    CHECK(infidelity < last);
    last = infidelity;
  }
  CHECK(last < 1e-3);
}

TEST_CASE("initial-state preparation") {
  PrepSpec p;
  p.n_qubits = 4;
  p.z = 0b0001;
  p.constraint = one_hot_penalty(100.0, 4);
  p.prep_time = 0.0;
  CHECK((prepare_initial(p) - basis_state(16, 1)).norm() == 0.0);

  PrepSpec bad = p;
  bad.z = 0b0000;
  CHECK_THROWS_AS(prepare_initial(bad), std::invalid_argument);
  bad.z = 0b0011;
  CHECK_THROWS_AS(prepare_initial(bad), std::invalid_argument);
  bad.z = 16;
  CHECK_THROWS_AS(prepare_initial(bad), std::out_of_range);

  // Initial field: |z> is its unique ground state.
  const Eigen::VectorXd hi = assemble(initial_field(4, 0b0001)).diagonal().real();
  Eigen::Index arg;
  hi.minCoeff(&arg);
  CHECK(arg == 1);

  // A smooth sweep long against the constrained driver's gap prepares its
  // ground state.
  EigenOptions o;
  o.want_vectors = true;
  const auto g = lowest_eigs(assemble(constrained_driver(p.constraint)), 1, o);
  p.prep_time = 20000.0;
  p.profile = SweepProfile::Smooth;
  p.tolerance = 1e-6;
  EvolutionResult diag;
  const auto psi = prepare_initial(p, &diag);
  CHECK(std::norm(g.vectors.col(0).dot(psi)) > 0.999);
  CHECK(diag.norm_drift < 1e-8);
  CHECK(leakage(psi, partition_hamming(4, 1)) < 1e-3);
}

TEST_CASE("observer sees increasing times up to the end") {
  ToyInstance inst;
  inst.variant = Variant::XX;
  const auto model = build_anneal(inst);
  const CompiledSchedule sched(model.schedule);
  EvolutionSpec spec;
  spec.schedule = &sched;
  spec.anneal_time = 2.0;
  double last = 0.0;
  bool monotone = true;
  spec.observer = [&](double t, const StateVector&) {
    monotone = monotone && t > last;
    last = t;
  };
  const auto r = evolve(spec, initial_ground_state(sched));
  CHECK(monotone);
  CHECK(last == 2.0);
  CHECK(r.steps > 0);
}

TEST_CASE("pgs csv") {
  std::ostringstream os;
  write_pgs_csv(os, {{5.0, Variant::XX, 3, 100.0, 0.25, 0.0, 1e-12}});
  CHECK(os.str().rfind("ta,variant,n0,cp,pgs,leakage,norm_drift\n5,xx,3,100,0.25,0,", 0) == 0);
}
