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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xxgadget/pauli.hpp"
#include "xxgadget/sparse.hpp"

namespace xxgadget {

/**
 * Split of the computational basis into a low-energy set A and a high-energy
 * set B. Both lists are ascending. Unless `truncated` is set, A and B cover the
 * whole basis.
 */
struct SubspacePartition {
  unsigned n_qubits = 0;
  std::vector<BasisIndex> a;
  std::vector<BasisIndex> b;
  bool truncated = false;

  std::size_t dim() const { return std::size_t{1} << n_qubits; }

  bool in_a(BasisIndex index) const {
    return std::binary_search(a.begin(), a.end(), index);
  }
  bool in_b(BasisIndex index) const {
    return std::binary_search(b.begin(), b.end(), index);
  }
};

/** Partition with A = {index : in_a(index)}. */
template <typename Predicate>
SubspacePartition partition_by(unsigned n_qubits, Predicate&& in_a) {
  detail::check_matrix_size(n_qubits);
  SubspacePartition p;
  p.n_qubits = n_qubits;
  const BasisIndex dim = BasisIndex{1} << n_qubits;
  for (BasisIndex i = 0; i < dim; ++i) (in_a(i) ? p.a : p.b).push_back(i);
  return p;
}

/** A = basis states of Hamming weight `weight`. */
inline SubspacePartition partition_hamming(unsigned n_qubits, unsigned weight) {
  if (weight > n_qubits)
    throw std::invalid_argument("Hamming weight exceeds the number of qubits");
  return partition_by(n_qubits, [weight](BasisIndex i) { return hamming_weight(i) == weight; });
}

/** A = basis states with even (or odd) parity on the listed qubits. */
inline SubspacePartition partition_parity(unsigned n_qubits,
                                          std::span<const unsigned> qubits,
                                          bool even) {
  BasisIndex mask = 0;
  for (unsigned q : qubits) {
    if (q == 0 || q > n_qubits) throw std::out_of_range("parity qubit outside register");
    mask |= qubit_mask(q, n_qubits);
  }
  return partition_by(n_qubits, [mask, even](BasisIndex i) {
    return ((hamming_weight(i & mask) % 2) == 0) == even;
  });
}

inline SubspacePartition partition_parity(unsigned n_qubits,
                                          std::initializer_list<unsigned> qubits,
                                          bool even) {
  std::vector<unsigned> q(qubits);
  return partition_parity(n_qubits, std::span<const unsigned>(q), even);
}

/** Restricts B to the indices selected by `keep`; marks the result truncated. */
template <typename Keep>
SubspacePartition truncate_b(const SubspacePartition& p, Keep&& keep) {
  SubspacePartition out = p;
  out.b.clear();
  for (BasisIndex i : p.b)
    if (keep(i)) out.b.push_back(i);
  out.truncated = p.truncated || out.b.size() != p.b.size();
  return out;
}

/** Thrown when H_BB - E I cannot be inverted. */
class SingularBlockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EffectiveResult {
  DenseMatrix matrix;
  double energy = 0.0;
  std::vector<BasisIndex> basis;
  unsigned n_qubits = 0;
};

struct SchurOptions {
  /** Largest |B| handled by a dense factorisation; above it, CG per column. */
  std::size_t dense_limit = 4096;
  /** (H_BB - E) is singular when sigma_min <= singular_rtol * ||H_BB||. */
  double singular_rtol = 1e-10;
  double cg_tolerance = 1e-14;
  int cg_max_iterations = 20000;
};

/** Dense sub-block H[rows, cols]. */
inline DenseMatrix dense_block(const SparseOperator& h,
                               std::span<const BasisIndex> rows,
                               std::span<const BasisIndex> cols) {
  std::vector<std::int64_t> pos(h.dim, -1);
  for (std::size_t j = 0; j < cols.size(); ++j) pos[cols[j]] = static_cast<std::int64_t>(j);
  DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(rows.size()),
                                      static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    for (std::size_t k = h.row_ptr[r]; k < h.row_ptr[r + 1]; ++k) {
      const auto j = pos[h.cols[k]];
      if (j >= 0) out(static_cast<Eigen::Index>(i), j) += h.values[k];
    }
  }
  return out;
}

/** Default substitution energy: the smallest diagonal entry of H_AA. */
inline double min_diagonal(const SparseOperator& h, std::span<const BasisIndex> set) {
  if (set.empty()) throw std::invalid_argument("empty index set");
  double m = std::numeric_limits<double>::infinity();
  for (auto i : set) m = std::min(m, h.coeff(i, i).real());
  return m;
}

inline double max_diagonal(const SparseOperator& h, std::span<const BasisIndex> set) {
  double m = -std::numeric_limits<double>::infinity();
  for (auto i : set) m = std::max(m, h.coeff(i, i).real());
  return m;
}

namespace detail {

/** Restriction of a sparse operator to an index set, kept sparse. */
inline SparseOperator restrict_sparse(const SparseOperator& h,
                                      std::span<const BasisIndex> set,
                                      double shift) {
  std::vector<std::int64_t> pos(h.dim, -1);
  for (std::size_t j = 0; j < set.size(); ++j) pos[set[j]] = static_cast<std::int64_t>(j);
  SparseOperator out;
  out.dim = set.size();
  out.row_ptr.assign(set.size() + 1, 0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto r = set[i];
    bool diag_seen = false;
    for (std::size_t k = h.row_ptr[r]; k < h.row_ptr[r + 1]; ++k) {
      const auto j = pos[h.cols[k]];
      if (j < 0) continue;
      Complex v = h.values[k];
      if (static_cast<std::size_t>(j) == i) {
        v -= shift;
        diag_seen = true;
      }
      out.cols.push_back(static_cast<std::uint32_t>(j));
      out.values.push_back(v);
    }
    if (!diag_seen && shift != 0.0) {
      auto it = std::lower_bound(out.cols.begin() + static_cast<std::ptrdiff_t>(out.row_ptr[i]),
                                 out.cols.end(), static_cast<std::uint32_t>(i));
      auto off = it - out.cols.begin();
      out.cols.insert(it, static_cast<std::uint32_t>(i));
      out.values.insert(out.values.begin() + off, Complex(-shift));
    }
    out.row_ptr[i + 1] = out.cols.size();
  }
  return out;
}

/** Jacobi-preconditioned CG for a Hermitian positive-definite system. */
inline StateVector conjugate_gradient(const SparseOperator& m, const StateVector& rhs,
                                      double tol, int max_iter) {
  const Eigen::VectorXcd dinv = m.diagonal().cwiseInverse();
  StateVector x = StateVector::Zero(rhs.size());
  StateVector r = rhs;
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return x;
  StateVector z = dinv.cwiseProduct(r);
  StateVector p = z;
  Complex rz = r.dot(z);
  for (int it = 0; it < max_iter; ++it) {
    StateVector mp = m * p;
    const Complex pmp = p.dot(mp);
    if (pmp.real() <= 0.0)
      throw SingularBlockError("H_BB - E I is not positive definite; E lies inside the B spectrum");
    const Complex alpha = rz / pmp;
    x += alpha * p;
    r -= alpha * mp;
    if (r.norm() <= tol * rhs_norm) return x;
    z = dinv.cwiseProduct(r);
    const Complex rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw std::runtime_error("conjugate gradient did not converge in the Schur complement solve");
}

}  // namespace detail

/**
 * Effective Hamiltonian on A at energy E:
 *
 *   H_eff(E) = H_AA - H_AB (H_BB - E I)^{-1} H_BA
 *
 * evaluated exactly for the given partition. When `energy` is empty the
 * smallest diagonal entry of H_AA is used. Identity offsets are kept; see
 * strip_identity().
 */
inline EffectiveResult schur_effective(const SparseOperator& h,
                                       const SubspacePartition& p,
                                       std::optional<double> energy = std::nullopt,
                                       const SchurOptions& opts = {}) {
  if (h.dim != p.dim()) throw std::invalid_argument("partition does not match operator dimension");
  if (p.a.empty()) throw std::invalid_argument("partition has an empty A set");
  EffectiveResult out;
  out.n_qubits = p.n_qubits;
  out.basis = p.a;
  out.energy = energy.value_or(min_diagonal(h, p.a));
  out.matrix = dense_block(h, p.a, p.a);
  if (p.b.empty()) return out;

  const DenseMatrix h_ab = dense_block(h, p.a, p.b);
  const DenseMatrix h_ba = dense_block(h, p.b, p.a);
  const auto nb = static_cast<Eigen::Index>(p.b.size());
  DenseMatrix solved;  // (H_BB - E)^{-1} H_BA

  if (p.b.size() <= opts.dense_limit) {
    const DenseMatrix h_bb = dense_block(h, p.b, p.b);
    const DenseMatrix shifted = h_bb - out.energy * DenseMatrix::Identity(nb, nb);
    const double herm_err = (shifted - shifted.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err <= 1e-12 * std::max(1.0, shifted.cwiseAbs().maxCoeff())) {
      Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (shifted + shifted.adjoint()));
      const Eigen::VectorXd& lam = es.eigenvalues();
      const double sigma_min = lam.cwiseAbs().minCoeff();
      const double norm_bb = (lam.array() + out.energy).abs().maxCoeff();
      if (sigma_min <= opts.singular_rtol * std::max(norm_bb, 1e-300))
        throw SingularBlockError("H_BB - E I is singular (sigma_min = " +
                                 std::to_string(sigma_min) + "); E lies in the B spectrum");
      solved = es.eigenvectors() *
               (lam.cwiseInverse().asDiagonal() * (es.eigenvectors().adjoint() * h_ba));
    } else {
      Eigen::JacobiSVD<DenseMatrix> svd(shifted);
      const double sigma_min = svd.singularValues().minCoeff();
      const double norm_bb = Eigen::JacobiSVD<DenseMatrix>(h_bb).singularValues().maxCoeff();
      if (sigma_min <= opts.singular_rtol * std::max(norm_bb, 1e-300))
        throw SingularBlockError("H_BB - E I is singular; E lies in the B spectrum");
      solved = shifted.fullPivLu().solve(h_ba);
    }
  } else {
    const SparseOperator shifted = detail::restrict_sparse(h, p.b, out.energy);
    solved.resize(nb, h_ba.cols());
    for (Eigen::Index c = 0; c < h_ba.cols(); ++c)
      solved.col(c) = detail::conjugate_gradient(shifted, h_ba.col(c), opts.cg_tolerance,
                                                 opts.cg_max_iterations);
  }
  out.matrix -= h_ab * solved;
  return out;
}

/** m - (tr m / dim) I. */
inline DenseMatrix strip_identity(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("strip_identity needs a square matrix");
  if (m.rows() == 0) return m;
  const Complex shift = m.trace() / static_cast<double>(m.rows());
  return m - shift * DenseMatrix::Identity(m.rows(), m.cols());
}

/** Numerical checks of the three partitioning assumptions. */
struct AssumptionReport {
  /** max |offdiag H_BB| / min |diag H_BB|. */
  double diag_dominance = 0.0;
  /** ||H_AB||_2 / (min diag H_BB - max diag H_AA). */
  double coupling_ratio = 0.0;
  /** |E - min diag H_AA|. */
  double e_shift = 0.0;
};

namespace detail {

inline double spectral_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() <= (1 << 22)) return Eigen::JacobiSVD<DenseMatrix>(m).singularValues()(0);
  // Power iteration on M^H M for large blocks.
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(m.cols()).normalized();
  double sigma = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXcd w = m.adjoint() * (m * v);
    const double next = std::sqrt(w.norm());
    v = w.normalized();
    if (std::abs(next - sigma) <= 1e-13 * next) return next;
    sigma = next;
  }
  return sigma;
}

}  // namespace detail

inline AssumptionReport validate_assumptions(const SparseOperator& h,
                                             const SubspacePartition& p,
                                             std::optional<double> energy = std::nullopt) {
  AssumptionReport rep;
  const double e = energy.value_or(min_diagonal(h, p.a));
  rep.e_shift = std::abs(e - min_diagonal(h, p.a));
  if (p.b.empty()) return rep;

  std::vector<std::int64_t> pos(h.dim, -1);
  for (std::size_t j = 0; j < p.b.size(); ++j) pos[p.b[j]] = static_cast<std::int64_t>(j);
  double max_off = 0.0;
  double min_diag = std::numeric_limits<double>::infinity();
  for (auto r : p.b) {
    min_diag = std::min(min_diag, std::abs(h.coeff(r, r)));
    for (std::size_t k = h.row_ptr[r]; k < h.row_ptr[r + 1]; ++k)
      if (h.cols[k] != r && pos[h.cols[k]] >= 0) max_off = std::max(max_off, std::abs(h.values[k]));
  }
  rep.diag_dominance = max_off == 0.0 ? 0.0 : max_off / min_diag;

  const double gap = min_diagonal(h, p.b) - max_diagonal(h, p.a);
  const double coupling = detail::spectral_norm(dense_block(h, p.a, p.b));
  rep.coupling_ratio = coupling == 0.0 ? 0.0
                       : gap > 0.0    ? coupling / gap
                                      : std::numeric_limits<double>::infinity();
  return rep;
}

/** Text dump: one row per A basis state, tagged with its bitstring. */
inline std::string dump(const EffectiveResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "# effective Hamiltonian, E = " << r.energy << ", dim = " << r.basis.size() << "\n";
  os << "# columns:";
  for (auto b : r.basis) os << ' ' << bitstring(b, r.n_qubits);
  os << "\n";
  for (Eigen::Index i = 0; i < r.matrix.rows(); ++i) {
    os << bitstring(r.basis[static_cast<std::size_t>(i)], r.n_qubits);
    for (Eigen::Index j = 0; j < r.matrix.cols(); ++j) {
      const Complex v = r.matrix(i, j);
      os << ' ' << v.real();
      if (v.imag() != 0.0) os << (v.imag() < 0 ? "" : "+") << v.imag() << 'i';
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace xxgadget
