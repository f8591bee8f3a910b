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
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "xxgadget/sparse.hpp"

namespace xxgadget {

struct EigenOptions {
  /** Dimensions up to this use a dense Hermitian eigensolver. */
  std::size_t dense_limit = 256;
  /** Converged when ||H x - theta x|| <= tolerance * max(1, |theta|). */
  double tolerance = 1e-9;
  /** Matrix-vector products allowed per attempt; one retry is made. */
  std::size_t max_matvecs = 5000;
  std::uint64_t seed = 0x5eed;
  bool want_vectors = false;
  /** Davidson block size is k + extra_block. */
  std::size_t extra_block = 2;
};

struct EigenResult {
  Eigen::VectorXd values;
  /** dim x k, filled when EigenOptions::want_vectors is set. */
  DenseMatrix vectors;
  Eigen::VectorXd residuals;
  std::size_t matvecs = 0;
  int iterations = 0;
  bool dense = false;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, Eigen::VectorXd residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const Eigen::VectorXd& residuals() const { return residuals_; }

 private:
  Eigen::VectorXd residuals_;
};

namespace detail {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Mat<Scalar> random_block(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat<Scalar> m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      if constexpr (is_complex<Scalar>::value)
        m(i, j) = Scalar(g(rng), g(rng));
      else
        m(i, j) = g(rng);
    }
  return m;
}

/**
 * Orthonormalises the columns of `w` against `v` and each other (classical
 * Gram-Schmidt, applied twice). Columns that collapse are dropped.
 */
template <typename Scalar>
Mat<Scalar> orthonormalize_against(const Mat<Scalar>& v, Mat<Scalar> w) {
  Mat<Scalar> out(w.rows(), 0);
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    auto col = w.col(j).eval();
    const double before = col.norm();
    if (before == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (v.cols() > 0) col -= v * (v.adjoint() * col);
      if (out.cols() > 0) col -= out * (out.adjoint() * col);
    }
    const double after = col.norm();
    if (after <= 1e-10 * before) continue;
    out.conservativeResize(Eigen::NoChange, out.cols() + 1);
    out.col(out.cols() - 1) = col / after;
  }
  return out;
}

template <typename Scalar>
struct DavidsonOutcome {
  Eigen::VectorXd values;
  Mat<Scalar> vectors;
  Eigen::VectorXd residuals;
  std::size_t matvecs = 0;
  int iterations = 0;
  bool converged = false;
};

/**
 * Block Davidson for the k lowest eigenpairs, with a diagonal preconditioner,
 * the Olsen correction and thick restart onto the current Ritz block.
 */
template <typename Scalar>
DavidsonOutcome<Scalar> davidson(const CsrMatrix<Scalar>& a, std::size_t k,
                                 const EigenOptions& o, const Mat<Scalar>* guess,
                                 std::uint64_t seed, std::size_t max_sub) {
  const auto n = static_cast<Eigen::Index>(a.dim);
  const auto b = static_cast<Eigen::Index>(std::min<std::size_t>(k + o.extra_block, a.dim));
  const auto kk = static_cast<Eigen::Index>(k);
  max_sub = std::min<std::size_t>(std::max<std::size_t>(max_sub, 3 * static_cast<std::size_t>(b)), a.dim);
  Eigen::VectorXd diag(n);
  {
    const auto d = a.diagonal();
    for (Eigen::Index i = 0; i < n; ++i) diag[i] = std::real(d[i]);
  }
  std::mt19937_64 rng(seed);
  Mat<Scalar> start = random_block<Scalar>(n, b, rng);
  if (guess != nullptr) {
    const auto g = std::min<Eigen::Index>(guess->cols(), b);
    start.leftCols(g) = guess->leftCols(g) + 1e-6 * start.leftCols(g) / std::sqrt(double(n));
  }
  DavidsonOutcome<Scalar> out;
  Mat<Scalar> v = orthonormalize_against<Scalar>(Mat<Scalar>(n, 0), start);
  Mat<Scalar> av = a.multiply_block(v);
  out.matvecs += static_cast<std::size_t>(v.cols());

  for (;;) {
    ++out.iterations;
    Mat<Scalar> t = v.adjoint() * av;
    t = (0.5 * (t + t.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(t);
    const Eigen::Index nb = std::min<Eigen::Index>(b, t.rows());
    const Eigen::VectorXd theta = es.eigenvalues().head(nb);
    const Mat<Scalar> y = es.eigenvectors().leftCols(nb);
    const Mat<Scalar> x = v * y;
    const Mat<Scalar> ax = av * y;
    const Mat<Scalar> r = ax - x * theta.asDiagonal();
    Eigen::VectorXd res(nb);
    for (Eigen::Index j = 0; j < nb; ++j) res[j] = r.col(j).norm();
    auto done = [&](Eigen::Index j) {
      return res[j] <= o.tolerance * std::max(1.0, std::abs(theta[j]));
    };
    bool all = nb >= kk;
    for (Eigen::Index j = 0; j < std::min(kk, nb); ++j) all = all && done(j);
    if (all || out.matvecs >= o.max_matvecs || v.cols() >= n) {
      out.values = theta.head(std::min(kk, nb));
      out.vectors = x.leftCols(std::min(kk, nb));
      out.residuals = res.head(std::min(kk, nb));
      out.converged = all || (v.cols() >= n && nb >= kk);
      return out;
    }

    Mat<Scalar> w(n, 0);
    for (Eigen::Index j = 0; j < nb; ++j) {
      if (done(j)) continue;
      Eigen::VectorXd inv(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        double d = diag[i] - theta[j];
        if (std::abs(d) < 1e-3) d = d < 0 ? -1e-3 : 1e-3;
        inv[i] = 1.0 / d;
      }
      const auto mr = (inv.array() * r.col(j).array()).matrix().eval();
      const auto mx = (inv.array() * x.col(j).array()).matrix().eval();
      const Scalar eps = x.col(j).dot(mr) / x.col(j).dot(mx);
      w.conservativeResize(Eigen::NoChange, w.cols() + 1);
      w.col(w.cols() - 1) = mr - eps * mx;
    }

    if (static_cast<std::size_t>(v.cols() + w.cols()) > max_sub) {
      const Eigen::Index keep = std::min<Eigen::Index>(2 * b, t.rows());
      const Mat<Scalar> yk = es.eigenvectors().leftCols(keep);
      v = (v * yk).eval();
      av = (av * yk).eval();
    }
    Mat<Scalar> add = orthonormalize_against<Scalar>(v, w);
    if (add.cols() == 0) add = orthonormalize_against<Scalar>(v, random_block<Scalar>(n, 1, rng));
    if (add.cols() == 0) {
      out.values = theta.head(std::min(kk, nb));
      out.vectors = x.leftCols(std::min(kk, nb));
      out.residuals = res.head(std::min(kk, nb));
      return out;
    }
    const Mat<Scalar> aadd = a.multiply_block(add);
    out.matvecs += static_cast<std::size_t>(add.cols());
    const Eigen::Index old = v.cols();
    v.conservativeResize(Eigen::NoChange, old + add.cols());
    av.conservativeResize(Eigen::NoChange, old + add.cols());
    v.rightCols(add.cols()) = add;
    av.rightCols(add.cols()) = aadd;
  }
}

template <typename Scalar>
EigenResult dense_eigs(const CsrMatrix<Scalar>& a, std::size_t k, bool vectors) {
  const Mat<Scalar> m = a.to_dense();
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(
      m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  EigenResult r;
  r.dense = true;
  const auto kk = static_cast<Eigen::Index>(k);
  r.values = es.eigenvalues().head(kk);
  r.residuals = Eigen::VectorXd::Zero(kk);
  if (vectors) r.vectors = es.eigenvectors().leftCols(kk).template cast<Complex>();
  return r;
}

template <typename Scalar>
EigenResult iterative_eigs(const CsrMatrix<Scalar>& a, std::size_t k, const EigenOptions& o,
                           const DenseMatrix* guess) {
  Mat<Scalar> g;
  const Mat<Scalar>* gp = nullptr;
  if (guess != nullptr && guess->rows() == static_cast<Eigen::Index>(a.dim)) {
    if constexpr (is_complex<Scalar>::value)
      g = *guess;
    else
      g = guess->real();
    gp = &g;
  }
  const std::size_t b = k + o.extra_block;
  auto out = davidson<Scalar>(a, k, o, gp, o.seed, std::max<std::size_t>(8 * b, 40));
  std::size_t total = out.matvecs;
  if (!out.converged) {
    out = davidson<Scalar>(a, k, o, nullptr, o.seed + 1, std::max<std::size_t>(16 * b, 80));
    total += out.matvecs;
  }
  if (!out.converged) {
    std::ostringstream os;
    os << "Davidson did not converge after " << total << " matrix-vector products; residuals:";
    for (Eigen::Index j = 0; j < out.residuals.size(); ++j) os << ' ' << out.residuals[j];
    throw NonConvergenceError(os.str(), out.residuals);
  }
  EigenResult r;
  r.values = out.values;
  r.residuals = out.residuals;
  r.matvecs = total;
  r.iterations = out.iterations;
  if (o.want_vectors) r.vectors = out.vectors.template cast<Complex>();
  return r;
}

}  // namespace detail

/**
 * The k smallest eigenvalues of a Hermitian operator, ascending. Operators
 * with an exactly real matrix take a real-arithmetic path. `guess` seeds the
 * iterative solver, e.g. with eigenvectors from a neighbouring s point.
 */
inline EigenResult lowest_eigs(const SparseOperator& op, std::size_t k,
                               const EigenOptions& opts = {},
                               const DenseMatrix* guess = nullptr) {
  if (k == 0 || k > op.dim) throw std::invalid_argument("k must lie in [1, dim]");
  const auto real = real_view(op);
  EigenResult r;
  if (op.dim <= opts.dense_limit)
    r = real ? detail::dense_eigs(*real, k, opts.want_vectors)
             : detail::dense_eigs(op, k, opts.want_vectors);
  else
    r = real ? detail::iterative_eigs(*real, k, opts, guess)
             : detail::iterative_eigs(op, k, opts, guess);
  return r;
}

}  // namespace xxgadget
