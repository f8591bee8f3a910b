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
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "xxgadget/pauli.hpp"

namespace xxgadget {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;

namespace detail {
template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename Scalar>
inline double abs2(const Scalar& v) {
  if constexpr (is_complex<Scalar>::value) return std::norm(v);
  else return v * v;
}

template <typename Scalar>
inline Scalar conj(const Scalar& v) {
  if constexpr (is_complex<Scalar>::value) return std::conj(v);
  else return v;
}
}  // namespace detail

/**
 * Square matrix in compressed-row layout. Column indices are sorted within
 * each row. Immutable once built; safe to share between threads.
 */
template <typename Scalar>
struct CsrMatrix {
  using scalar_type = Scalar;
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using BlockType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  std::size_t dim = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> cols;
  std::vector<Scalar> values;

  std::size_t nnz() const { return values.size(); }

  static CsrMatrix zero(std::size_t dim) {
    CsrMatrix m;
    m.dim = dim;
    m.row_ptr.assign(dim + 1, 0);
    return m;
  }

  static CsrMatrix identity(std::size_t dim) {
    CsrMatrix m;
    m.dim = dim;
    m.row_ptr.resize(dim + 1);
    m.cols.resize(dim);
    m.values.assign(dim, Scalar(1));
    for (std::size_t r = 0; r < dim; ++r) {
      m.row_ptr[r] = r;
      m.cols[r] = static_cast<std::uint32_t>(r);
    }
    m.row_ptr[dim] = dim;
    return m;
  }

  /** Entry (r, c), zero when not stored. */
  Scalar coeff(std::size_t r, std::size_t c) const {
    auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
    auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
    auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(c));
    if (it == last || *it != c) return Scalar(0);
    return values[static_cast<std::size_t>(it - cols.begin())];
  }

  VectorType diagonal() const {
    VectorType d(static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r) d[static_cast<Eigen::Index>(r)] = coeff(r, r);
    return d;
  }

  bool is_diagonal() const {
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        if (cols[k] != r && values[k] != Scalar(0)) return false;
    return true;
  }

  /** y = A x. Rows are independent, so the result is deterministic. */
  template <typename Derived>
  VectorType operator*(const Eigen::MatrixBase<Derived>& x) const {
    if (static_cast<std::size_t>(x.size()) != dim)
      throw std::invalid_argument("dimension mismatch in sparse matrix-vector product");
    VectorType y(static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r) {
      Scalar acc(0);
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        acc += values[k] * x[static_cast<Eigen::Index>(cols[k])];
      y[static_cast<Eigen::Index>(r)] = acc;
    }
    return y;
  }

  /** Y = A X for a block of column vectors. */
  BlockType multiply_block(const BlockType& x) const {
    if (static_cast<std::size_t>(x.rows()) != dim)
      throw std::invalid_argument("dimension mismatch in sparse block product");
    using RowBlock = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowBlock xr = x;
    RowBlock yr = RowBlock::Zero(x.rows(), x.cols());
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        yr.row(static_cast<Eigen::Index>(r)) +=
            values[k] * xr.row(static_cast<Eigen::Index>(cols[k]));
    return yr;
  }

  BlockType to_dense() const {
    BlockType m = BlockType::Zero(static_cast<Eigen::Index>(dim),
                                  static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cols[k])) += values[k];
    return m;
  }

  /** max |A - A^H| over all entries. */
  double hermiticity_error() const {
    double err = 0.0;
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
        Scalar mirror = coeff(cols[k], r);
        err = std::max(err, std::abs(values[k] - detail::conj(mirror)));
      }
    return err;
  }

  /** Largest absolute row sum; an upper bound on the spectral radius. */
  double max_abs_row_sum() const {
    double best = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
      double s = 0.0;
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += std::abs(values[k]);
      best = std::max(best, s);
    }
    return best;
  }
};

/** Complex Hermitian operator; the one matrix type shared by every module. */
using SparseOperator = CsrMatrix<Complex>;

/** Entrywise sum; patterns are merged. */
template <typename Scalar>
CsrMatrix<Scalar> operator+(const CsrMatrix<Scalar>& a, const CsrMatrix<Scalar>& b) {
  if (a.dim != b.dim) throw std::invalid_argument("dimension mismatch in sparse sum");
  CsrMatrix<Scalar> out;
  out.dim = a.dim;
  out.row_ptr.assign(a.dim + 1, 0);
  out.cols.reserve(a.nnz() + b.nnz());
  out.values.reserve(a.nnz() + b.nnz());
  for (std::size_t r = 0; r < a.dim; ++r) {
    std::size_t i = a.row_ptr[r], ie = a.row_ptr[r + 1];
    std::size_t j = b.row_ptr[r], je = b.row_ptr[r + 1];
    while (i < ie || j < je) {
      if (j == je || (i < ie && a.cols[i] < b.cols[j])) {
        out.cols.push_back(a.cols[i]);
        out.values.push_back(a.values[i++]);
      } else if (i == ie || b.cols[j] < a.cols[i]) {
        out.cols.push_back(b.cols[j]);
        out.values.push_back(b.values[j++]);
      } else {
        out.cols.push_back(a.cols[i]);
        out.values.push_back(a.values[i++] + b.values[j++]);
      }
    }
    out.row_ptr[r + 1] = out.cols.size();
  }
  return out;
}

template <typename Scalar>
CsrMatrix<Scalar> operator*(double factor, CsrMatrix<Scalar> m) {
  for (auto& v : m.values) v *= factor;
  return m;
}

/** max |A - B| over all entries of the union pattern. */
template <typename Scalar>
double max_abs_diff(const CsrMatrix<Scalar>& a, const CsrMatrix<Scalar>& b) {
  auto diff = a + (-1.0 * b);
  double m = 0.0;
  for (const auto& v : diff.values) m = std::max(m, std::abs(v));
  return m;
}

/** The real part when every imaginary part is exactly zero. */
inline std::optional<CsrMatrix<double>> real_view(const SparseOperator& op) {
  CsrMatrix<double> out;
  out.dim = op.dim;
  out.row_ptr = op.row_ptr;
  out.cols = op.cols;
  out.values.resize(op.values.size());
  for (std::size_t k = 0; k < op.values.size(); ++k) {
    if (op.values[k].imag() != 0.0) return std::nullopt;
    out.values[k] = op.values[k].real();
  }
  return out;
}

namespace detail {

/** Pauli string as X^x Z^z with a phase: P = c * i^ny * X^x Z^z. */
struct PauliMasks {
  BasisIndex x = 0;
  BasisIndex z = 0;
  Complex weight;
};

inline PauliMasks masks_of(const PauliTerm& term, unsigned n_qubits) {
  if (term.max_qubit() > n_qubits)
    throw std::out_of_range("Pauli term acts on qubit " +
                            std::to_string(term.max_qubit()) + " of a " +
                            std::to_string(n_qubits) + "-qubit register");
  PauliMasks m;
  unsigned ny = 0;
  for (const auto& [q, axis] : term.factors) {
    const BasisIndex bit = qubit_mask(q, n_qubits);
    if (axis == PauliAxis::X || axis == PauliAxis::Y) m.x |= bit;
    if (axis == PauliAxis::Z || axis == PauliAxis::Y) m.z |= bit;
    if (axis == PauliAxis::Y) ++ny;
  }
  static const Complex kIPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  m.weight = term.coefficient * kIPowers[ny % 4];
  return m;
}

inline void check_matrix_size(unsigned n_qubits) {
  if (n_qubits > kMaxMatrixQubits)
    throw std::length_error("refusing to build a matrix on " +
                            std::to_string(n_qubits) + " qubits");
}

}  // namespace detail

/**
 * Matrix of a single Pauli term on `n_qubits` qubits: exactly one stored
 * entry per row.
 */
inline SparseOperator term_matrix(const PauliTerm& term, unsigned n_qubits) {
  detail::check_matrix_size(n_qubits);
  const auto m = detail::masks_of(term, n_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  SparseOperator out;
  out.dim = dim;
  out.row_ptr.resize(dim + 1);
  out.cols.resize(dim);
  out.values.resize(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const BasisIndex c = r ^ m.x;
    out.row_ptr[r] = r;
    out.cols[r] = static_cast<std::uint32_t>(c);
    out.values[r] = (hamming_weight(c & m.z) & 1u) ? -m.weight : m.weight;
  }
  out.row_ptr[dim] = dim;
  return out;
}

/**
 * Sum of the term matrices of `obs`. Terms sharing a flip pattern land on the
 * same entries and are merged; the stored pattern is one entry per distinct
 * flip pattern per row, kept even where the merged value cancels to zero.
 */
inline SparseOperator assemble(const Observable& obs) {
  const unsigned n = obs.n_qubits();
  detail::check_matrix_size(n);
  std::map<BasisIndex, std::vector<std::pair<BasisIndex, Complex>>> groups;
  for (const auto& t : obs.terms()) {
    const auto m = detail::masks_of(t, n);
    groups[m.x].emplace_back(m.z, m.weight);
  }
  const std::size_t dim = std::size_t{1} << n;
  SparseOperator out;
  out.dim = dim;
  out.row_ptr.assign(dim + 1, 0);
  out.cols.reserve(dim * groups.size());
  out.values.reserve(dim * groups.size());
  std::vector<std::pair<std::uint32_t, Complex>> row;
  for (std::size_t r = 0; r < dim; ++r) {
    row.clear();
    for (const auto& [x, zs] : groups) {
      const BasisIndex c = r ^ x;
      Complex v = 0;
      for (const auto& [z, w] : zs) v += (hamming_weight(c & z) & 1u) ? -w : w;
      row.emplace_back(static_cast<std::uint32_t>(c), v);
    }
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [c, v] : row) {
      out.cols.push_back(c);
      out.values.push_back(v);
    }
    out.row_ptr[r + 1] = out.cols.size();
  }
  return out;
}

/** Matrix-vector product; never renormalises. */
inline StateVector apply(const SparseOperator& op, const StateVector& psi) {
  return op * psi;
}

/**
 * <psi|op|psi>. The imaginary residue is checked and discarded; a residue
 * above `imag_tol` means the operator is not Hermitian.
 */
inline double expectation(const SparseOperator& op, const StateVector& psi,
                          double imag_tol = 1e-10) {
  const Complex v = psi.dot(op * psi);
  if (std::abs(v.imag()) > imag_tol)
    throw std::domain_error("expectation value has imaginary part " +
                            std::to_string(v.imag()) +
                            "; operator is not Hermitian");
  return v.real();
}

/** Normalised computational-basis state. */
inline StateVector basis_state(std::size_t dim, BasisIndex index) {
  if (index >= dim) throw std::out_of_range("basis index outside the register");
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(dim));
  psi[static_cast<Eigen::Index>(index)] = 1.0;
  return psi;
}

/**
 * A fixed set of operators stored on one shared sparsity pattern so that any
 * real linear combination costs one pass over the values.
 */
class OperatorFamily {
 public:
  OperatorFamily() = default;

  explicit OperatorFamily(const std::vector<SparseOperator>& members) {
    if (members.empty()) throw std::invalid_argument("empty operator family");
    dim_ = members.front().dim;
    SparseOperator pattern = SparseOperator::zero(dim_);
    for (const auto& m : members) {
      if (m.dim != dim_) throw std::invalid_argument("family members differ in dimension");
      pattern = pattern + 0.0 * m;
    }
    pattern_ = std::move(pattern);
    for (const auto& m : members) {
      std::vector<Complex> vals(pattern_.nnz(), Complex(0));
      for (std::size_t r = 0; r < dim_; ++r) {
        std::size_t k = pattern_.row_ptr[r];
        for (std::size_t j = m.row_ptr[r]; j < m.row_ptr[r + 1]; ++j) {
          while (pattern_.cols[k] != m.cols[j]) ++k;
          vals[k] += m.values[j];
        }
      }
      values_.push_back(std::move(vals));
    }
  }

  std::size_t size() const { return values_.size(); }
  std::size_t dim() const { return dim_; }

  SparseOperator combine(std::span<const double> weights) const {
    if (weights.size() != values_.size())
      throw std::invalid_argument("one weight per family member is required");
    SparseOperator out = pattern_;
    std::fill(out.values.begin(), out.values.end(), Complex(0));
    for (std::size_t g = 0; g < values_.size(); ++g) {
      if (weights[g] == 0.0) continue;
      const auto& v = values_[g];
      for (std::size_t k = 0; k < v.size(); ++k) out.values[k] += weights[g] * v[k];
    }
    return out;
  }

 private:
  std::size_t dim_ = 0;
  SparseOperator pattern_;
  std::vector<std::vector<Complex>> values_;
};

}  // namespace xxgadget
