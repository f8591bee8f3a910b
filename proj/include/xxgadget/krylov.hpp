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
#include <limits>
#include <stdexcept>
#include <vector>

#include "xxgadget/sparse.hpp"

namespace xxgadget {

struct KrylovOptions {
  /** Largest Krylov dimension before the time step is split. */
  int max_dim = 30;
  /** Absolute error target for one call, in the 2-norm. */
  double tolerance = 1e-12;
};

struct KrylovStats {
  std::size_t matvecs = 0;
  std::size_t substeps = 0;
};

namespace detail {

/** exp(-i tau T) e_1 for a real symmetric tridiagonal T. */
inline Eigen::VectorXcd tridiag_expm_e1(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                                        int m, double tau) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    t(j, j) = alpha[j];
    if (j + 1 < m) t(j, j + 1) = t(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const Eigen::MatrixXd& q = es.eigenvectors();
  Eigen::VectorXcd phase(m);
  for (int j = 0; j < m; ++j) phase[j] = std::exp(Complex(0.0, -tau * es.eigenvalues()[j]));
  return q.cast<Complex>() * phase.cwiseProduct(q.row(0).transpose().cast<Complex>());
}

}  // namespace detail

/**
 * psi <- exp(-i tau H) psi for Hermitian H, by Lanczos with full
 * reorthogonalisation. The step is split when the a posteriori error
 * estimate beta_m |[exp(-i tau T) e_1]_m| exceeds the tolerance; the Krylov
 * basis built for the full step is reused for the shorter one.
 */
inline StateVector krylov_expm(const SparseOperator& h, const StateVector& psi, double tau,
                               const KrylovOptions& opts = {}, KrylovStats* stats = nullptr) {
  if (static_cast<std::size_t>(psi.size()) != h.dim)
    throw std::invalid_argument("state dimension does not match the operator");
  const int mmax = std::max(2, std::min<int>(opts.max_dim, static_cast<int>(h.dim)));
  StateVector v = psi;
  double remaining = tau;
  const double sign = tau < 0 ? -1.0 : 1.0;
  int guard = 0;
  while (std::abs(remaining) > 0.0) {
    if (++guard > 1000000) throw std::runtime_error("Krylov propagation made no progress");
    const double beta0 = v.norm();
    if (beta0 == 0.0) return v;
    Eigen::MatrixXcd basis(v.size(), mmax + 1);
    Eigen::VectorXd alpha(mmax), beta(mmax);
    basis.col(0) = v / beta0;
    int m = 0;
    bool breakdown = false;
    for (int j = 0; j < mmax; ++j) {
      StateVector w = h * basis.col(j);
      if (stats) ++stats->matvecs;
      alpha[j] = basis.col(j).dot(w).real();
      // Full reorthogonalisation, two passes.
      for (int pass = 0; pass < 2; ++pass)
        w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
      beta[j] = w.norm();
      m = j + 1;
      if (beta[j] <= 1e-13 * std::max(1.0, std::abs(alpha[j]))) {
        breakdown = true;
        break;
      }
      basis.col(j + 1) = w / beta[j];
    }
    // Choose the largest step, from the remaining time down by halving, that
    // meets the tolerance on this basis.
    double step = remaining;
    Eigen::VectorXcd coef;
    for (int halvings = 0;; ++halvings) {
      coef = detail::tridiag_expm_e1(alpha, beta, m, step);
      if (breakdown) break;
      const double err = beta0 * beta[m - 1] * std::abs(coef[m - 1]);
      // Below the rounding level of the small exponential a shorter step
      // cannot reduce the estimate further.
      const double floor = 64.0 * std::numeric_limits<double>::epsilon() * beta0 *
                           std::max(1.0, beta[m - 1]);
      if (err <= std::max(opts.tolerance, floor)) break;
      if (halvings > 60) throw std::runtime_error("Krylov step underflow");
      step *= 0.5;
    }
    v = beta0 * (basis.leftCols(m) * coef);
    remaining -= step;
    if (sign * remaining < 0) remaining = 0.0;
    if (stats) ++stats->substeps;
  }
  return v;
}

}  // namespace xxgadget
