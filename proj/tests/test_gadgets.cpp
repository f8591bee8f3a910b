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

#include <random>

#include "oracle.hpp"
#include "xxgadget/effective.hpp"
#include "xxgadget/gadgets.hpp"

using namespace xxgadget;
using Catch::Approx;

namespace {

double coefficient(const Observable& o, std::initializer_list<std::pair<unsigned, PauliAxis>> f) {
  PauliTerm probe(0.0, f);
  double c = 0.0;
  for (const auto& t : o.terms())
    if (t.factors == probe.factors) c += t.coefficient;
  return c;
}

DenseMatrix closed_dense(const Observable& o) { return strip_identity(assemble(o).to_dense()); }

double deviation(const SparseOperator& h, const SubspacePartition& p, double e,
                 const Observable& closed) {
  auto r = schur_effective(h, p, e);
  return oracle::max_abs(strip_identity(r.matrix) - closed_dense(closed));
}

struct Quiet {
  ScopedWarningHandler h{[](const std::string&) {}};
};

}  // namespace

TEST_CASE("three-body physical Hamiltonian") {
  auto h = three_body_physical({1, 1, 1, 100});
  CHECK(h.size() == 4);
  CHECK(coefficient(h, {{1, PauliAxis::Z}, {2, PauliAxis::Z}, {3, PauliAxis::Z}}) == -100.0);
  CHECK(coefficient(h, {{1, PauliAxis::X}}) == -1.0);
  CHECK(coefficient(h, {{3, PauliAxis::X}}) == -1.0);
  auto j = three_body_physical({0, 0, 0, 100, 0, 0, 2});
  CHECK(coefficient(j, {{3, PauliAxis::Z}}) == Approx(0.02));
  CHECK_THROWS_AS(three_body_physical({1, 1, 1, 0}), std::invalid_argument);
  auto pen = assemble(three_body_physical({0, 0, 0, 100}));
  auto r = schur_effective(pen, three_body_partition(), -100.0);
  CHECK(oracle::max_abs(strip_identity(r.matrix)) == 0.0);
}

TEST_CASE("three-body closed form") {
  auto h = three_body_effective_closed({1, 1, 1, 100});
  CHECK(coefficient(h, {{1, PauliAxis::X}}) == Approx(-0.01));
  CHECK(coefficient(h, {{2, PauliAxis::X}}) == Approx(-0.01));
  CHECK(coefficient(h, {{1, PauliAxis::X}, {2, PauliAxis::X}}) == Approx(-0.01));
  auto d2zero = three_body_effective_closed({0.4, 0, 0.5, 100});
  CHECK(coefficient(d2zero, {{1, PauliAxis::X}}) == Approx(-0.002));
  CHECK(coefficient(d2zero, {{2, PauliAxis::X}}) == 0.0);
  CHECK(coefficient(d2zero, {{1, PauliAxis::X}, {2, PauliAxis::X}}) == 0.0);
}

TEST_CASE("three-body: closed form equals the Schur complement for pure drives", "[property]") {
  Quiet q;
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    ThreeBodySpec s{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1),
                    oracle::uniform(rng, -1, 1), oracle::uniform(rng, 10, 1000)};
    auto h = assemble(three_body_physical(s));
    CHECK(deviation(h, three_body_partition(), -s.cp, three_body_effective_closed(s)) < 1e-12);
  }
}

TEST_CASE("three-body: with logical fields the mismatch is third order in 1/C_p") {
  Quiet q;
  ThreeBodySpec s{0.6, -0.8, 0.9, 10, 0.7, -0.5, 0.3};
  double prev = 0.0;
  for (double cp : {10.0, 20.0, 40.0, 80.0}) {
    s.cp = cp;
    const double dev =
        deviation(assemble(three_body_physical(s)), three_body_partition(), -cp,
                  three_body_effective_closed(s));
    CHECK(dev > 0.0);
    if (prev > 0.0) CHECK(prev / dev == Approx(8.0).epsilon(0.15));
    prev = dev;
  }
}

TEST_CASE("one-hot physical Hamiltonian") {
  Quiet q;
  auto pen = one_hot_penalty(1.0, 4);
  Observable squared(4);
  // Unexpanded (sum Z - 2)^2 as a diagonal, compared with the expansion.
  auto d = assemble(pen).diagonal();
  for (BasisIndex i = 0; i < 16; ++i) {
    const double sz = 4.0 - 2.0 * hamming_weight(i);
    CHECK(d[static_cast<Eigen::Index>(i)].real() == Approx((sz - 2) * (sz - 2)).margin(1e-14));
  }
  auto h = one_hot_physical({{1, 1, 1, 1}, 100});
  for (unsigned k = 1; k <= 4; ++k) CHECK(coefficient(h, {{k, PauliAxis::X}}) == -1.0);
  CHECK(h.max_arity() == 2);
  auto f = one_hot_physical({{0, 0, 0, 0}, 100, 1.0});
  CHECK(coefficient(f, {{1, PauliAxis::Z}}) == Approx(-400.0 + 0.0025));
  CHECK(coefficient(f, {{3, PauliAxis::Z}}) == Approx(-400.0 - 0.0025));
  CHECK_THROWS_AS(one_hot_physical({{1, 1, 1, 1}, -1}), std::invalid_argument);
}

TEST_CASE("one-hot closed form, equal drives") {
  auto h = one_hot_effective_closed({{1, 1, 1, 1}, 100});
  CHECK(coefficient(h, {{1, PauliAxis::X}}) == Approx(-0.005));
  CHECK(coefficient(h, {{2, PauliAxis::X}}) == Approx(-0.005));
  CHECK(coefficient(h, {{1, PauliAxis::X}, {2, PauliAxis::X}}) == Approx(-0.005));
  CHECK(coefficient(h, {{1, PauliAxis::X}, {2, PauliAxis::Z}}) == 0.0);
  CHECK(coefficient(h, {{1, PauliAxis::Z}, {2, PauliAxis::X}}) == 0.0);
  CHECK(coefficient(h, {{1, PauliAxis::Y}, {2, PauliAxis::Y}}) == 0.0);
  auto phys = assemble(one_hot_physical({{1, 1, 1, 1}, 100}));
  CHECK(deviation(phys, one_hot_partition(), 0.0, h) < 1e-12);
}

TEST_CASE("one-hot: six-term closed form equals the truncated Schur complement", "[property]") {
  Quiet q;
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    OneHotSpec s{{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1),
                  oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)},
                 oracle::uniform(rng, 10, 1000)};
    auto h = assemble(one_hot_physical(s));
    CHECK(deviation(h, one_hot_partition(), 0.0, one_hot_effective_closed(s)) < 1e-12);
  }
}

TEST_CASE("chain: closed form equals the Schur complement", "[property]") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    ChainSpec s{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1),
                oracle::uniform(rng, 10, 1000)};
    auto h = assemble(chain_physical(s));
    CHECK(deviation(h, chain_partition(), -2 * s.cp, chain_effective_closed(s)) < 1e-12);
  }
  auto c = chain_physical({1, 1, 100});
  CHECK(c.size() == 3);
  CHECK(coefficient(c, {{1, PauliAxis::Z}, {2, PauliAxis::Z}}) == -200.0);
  auto zero = chain_effective_closed({0.5, 0.0, 100});
  CHECK(coefficient(zero, {{1, PauliAxis::X}}) == 0.0);
}

TEST_CASE("sign property: same-sign drives give a non-positive XX coefficient", "[property]") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const double sign = trial % 2 ? 1.0 : -1.0;
    auto d = [&] { return sign * oracle::uniform(rng, 0, 1); };
    const double cp = oracle::uniform(rng, 10, 1000);
    auto tb = three_body_effective_closed({d(), d(), d(), cp});
    auto oh = one_hot_effective_closed({{d(), d(), d(), d()}, cp});
    CHECK(coefficient(tb, {{1, PauliAxis::X}, {2, PauliAxis::X}}) <= 0.0);
    CHECK(coefficient(oh, {{1, PauliAxis::X}, {2, PauliAxis::X}}) <= 0.0);
  }
}

TEST_CASE("diagonal pass-through with zero drives", "[property]") {
  Quiet q;
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 200; ++trial) {
    const double cp = oracle::uniform(rng, 10, 1000);
    const double h1 = oracle::uniform(rng, -1, 1), h2 = oracle::uniform(rng, -1, 1),
                 j = oracle::uniform(rng, -1, 1);
    Observable logical(2, {z_term(h1, 1), z_term(h2, 2), zz_term(j, 1, 2)});
    auto tb = schur_effective(assemble(three_body_physical({0, 0, 0, cp, h1, h2, j})),
                              three_body_partition(), -cp);
    CHECK(oracle::max_abs(strip_identity(tb.matrix) - closed_dense((1.0 / cp) * logical)) < 1e-12);
    auto oh = schur_effective(assemble(one_hot_physical({{0, 0, 0, 0}, cp, h1, h2, j})),
                              one_hot_partition(), 0.0);
    CHECK(oracle::max_abs(strip_identity(oh.matrix) - closed_dense((0.5 / cp) * logical)) < 1e-12);
  }
}

TEST_CASE("one-hot physical Hamiltonian is two-body", "[property]") {
  Quiet q;
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 200; ++trial) {
    OneHotSpec s{{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1),
                  oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)},
                 oracle::uniform(rng, 1, 1000), oracle::uniform(rng, -1, 1),
                 oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)};
    auto h = one_hot_physical(s);
    for (const auto& t : h.terms()) CHECK(t.arity() <= 2);
  }
}

TEST_CASE("logical Z encodings reproduce the truth table") {
  // Rows: logical 00, 01, 10, 11. Columns: I, Z1, Z2, Z1Z2.
  const int table[4][4] = {{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
  const LogicalZKind kinds[] = {LogicalZKind::Identity, LogicalZKind::Z1, LogicalZKind::Z2,
                                LogicalZKind::Z1Z2};
  for (int k = 0; k < 4; ++k) {
    auto m = assemble(logical_z_physical(kinds[k]));
    for (unsigned l = 0; l < 4; ++l) {
      const auto i = encode_one_hot(l);
      CHECK(m.coeff(i, i).real() == table[l][k]);
    }
  }
  auto z1 = assemble(logical_z_physical(LogicalZKind::Z1));
  CHECK(z1.coeff(0b1000, 0b1000).real() == -1.0);
  CHECK(z1.coeff(0b0001, 0b0001).real() == 1.0);
}

TEST_CASE("decode_one_hot") {
  CHECK(decode_one_hot(0b0100) == 2u);
  CHECK(decode_one_hot(0b1000) == 3u);
  CHECK(decode_one_hot(0b0001) == 0u);
  CHECK(!decode_one_hot(0b0000).has_value());
  CHECK(!decode_one_hot(0b0110).has_value());
  CHECK_THROWS_AS(decode_one_hot(16), std::out_of_range);
}

TEST_CASE("chain logical Z") {
  auto z = assemble(chain_logical_z());
  CHECK(z.coeff(0, 0).real() == 1.0);
  CHECK(z.coeff(3, 3).real() == -1.0);
  CHECK(z.coeff(1, 1).real() == 0.0);
}

TEST_CASE("warnings for weak penalties and J12") {
  std::vector<std::string> seen;
  ScopedWarningHandler capture([&](const std::string& m) { seen.push_back(m); });
  three_body_physical({1, 1, 1, 5});
  CHECK(seen.size() == 1);
  one_hot_physical({{1, 1, 1, 1}, 100, 0, 0, 0.5});
  CHECK(seen.size() == 2);
  CHECK(seen.back().find("J12") != std::string::npos);
}
