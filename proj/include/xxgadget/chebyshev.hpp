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
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "xxgadget/sparse.hpp"

namespace xxgadget {

struct ChebyshevStats {
  std::size_t matvecs = 0;
  std::size_t calls = 0;
};

/** Gershgorin enclosure [lo, hi] of the spectrum of a Hermitian matrix. */
template <typename Scalar>
std::pair<double, double> gershgorin_bounds(const CsrMatrix<Scalar>& a) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (std::size_t r = 0; r < a.dim; ++r) {
    double centre = 0.0, radius = 0.0;
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      if (a.cols[k] == r)
        centre += std::real(a.values[k]);
      else
        radius += std::abs(a.values[k]);
    }
    if (first || centre - radius < lo) lo = centre - radius;
    if (first || centre + radius > hi) hi = centre + radius;
    first = false;
  }
  return {lo, hi};
}

namespace detail {

/**
 * J_0(z) .. J_n(z) for z >= 0 by Miller's backward recurrence, normalised
 * with J_0 + 2 sum J_2k = 1.
 */
inline std::vector<double> bessel_j_sequence(double z, std::size_t n) {
  std::vector<double> j(n + 1, 0.0);
  if (z == 0.0) {
    j[0] = 1.0;
    return j;
  }
  const std::size_t start =
      static_cast<std::size_t>(std::ceil(std::max(static_cast<double>(n), z) + 10.0 * std::cbrt(z))) +
      30;
  double next = 0.0, cur = 1e-300;
  double norm = 0.0;
  for (std::size_t k = start; k > 0; --k) {
    const double prev = 2.0 * static_cast<double>(k) / z * cur - next;
    next = cur;
    cur = prev;
    // cur now holds J_{k-1} up to scale
    if (k - 1 <= n) j[k - 1] = cur;
    if ((k - 1) % 2 == 0) norm += (k - 1 == 0 ? 1.0 : 2.0) * cur;
    if (std::abs(cur) > 1e250) {
      next *= 1e-250;
      cur *= 1e-250;
      norm *= 1e-250;
      for (std::size_t i = k - 1; i <= n; ++i) j[i] *= 1e-250;
    }
  }
  for (auto& v : j) v /= norm;
  return j;
}

/** Row r of H x, with a real or complex H acting on a complex x. */
template <typename Scalar>
inline Complex row_product(const CsrMatrix<Scalar>& h, const StateVector& x, std::size_t r) {
  Complex acc(0.0);
  for (std::size_t q = h.row_ptr[r]; q < h.row_ptr[r + 1]; ++q)
    acc += h.values[q] * x[static_cast<Eigen::Index>(h.cols[q])];
  return acc;
}


/** sum_k c_k T_k((H - centre) / half) psi with c_k = (2 - [k = 0]) unit^k J_k. */
template <typename Scalar>
StateVector chebyshev_sum(const CsrMatrix<Scalar>& h, const StateVector& psi, double centre,
                          double half, const std::vector<double>& bj, std::size_t cut,
                          Complex unit) {
  const auto dim = static_cast<Eigen::Index>(h.dim);
  StateVector prev = psi;
  StateVector cur(dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    cur[r] = (row_product(h, psi, static_cast<std::size_t>(r)) - centre * psi[r]) / half;
  StateVector out = bj[0] * psi;
  Complex phase = unit;
  if (cut > 1) out += 2.0 * bj[1] * phase * cur;
  const double two_over = 2.0 / half;
  for (std::size_t k = 2; k < cut; ++k) {
    phase *= unit;
    const Complex coef = 2.0 * bj[k] * phase;
    // prev <- 2 (H - c) cur / half - prev, fused with the accumulation.
    for (Eigen::Index r = 0; r < dim; ++r) {
      const Complex acc = row_product(h, cur, static_cast<std::size_t>(r));
      const Complex v = two_over * (acc - centre * cur[r]) - prev[r];
      prev[r] = v;
      out[r] += coef * v;
    }
    prev.swap(cur);
  }
  return out;
}

/**
 * Real-matrix version of chebyshev_sum. Real and imaginary parts are kept in
 * separate arrays; since unit^k alternates between real and imaginary, each
 * term adds to only one part of the result.
 */
inline StateVector chebyshev_sum_real(const CsrMatrix<double>& h, const StateVector& psi,
                                      double centre, double half, const std::vector<double>& bj,
                                      std::size_t cut, Complex unit) {
  const std::size_t n = h.dim;
  std::vector<double> pr(n), pi(n), cr(n), ci(n), orr(n), oi(n);
  for (std::size_t r = 0; r < n; ++r) {
    pr[r] = psi[static_cast<Eigen::Index>(r)].real();
    pi[r] = psi[static_cast<Eigen::Index>(r)].imag();
  }
  const std::size_t* rp = h.row_ptr.data();
  const std::uint32_t* cl = h.cols.data();
  const double* va = h.values.data();
  const double inv = 1.0 / half;
  for (std::size_t r = 0; r < n; ++r) {
    double ar = 0.0, ai = 0.0;
    for (std::size_t q = rp[r]; q < rp[r + 1]; ++q) {
      ar += va[q] * pr[cl[q]];
      ai += va[q] * pi[cl[q]];
    }
    cr[r] = (ar - centre * pr[r]) * inv;
    ci[r] = (ai - centre * pi[r]) * inv;
  }
  for (std::size_t r = 0; r < n; ++r) {
    orr[r] = bj[0] * pr[r];
    oi[r] = bj[0] * pi[r];
  }
  Complex phase(1.0, 0.0);
  auto accumulate = [&](std::size_t k, const std::vector<double>& xr, const std::vector<double>& xi) {
    const Complex c = 2.0 * bj[k] * phase;
    // c is real or purely imaginary.
    const double a = c.real(), b = c.imag();
    for (std::size_t r = 0; r < n; ++r) {
      orr[r] += a * xr[r] - b * xi[r];
      oi[r] += a * xi[r] + b * xr[r];
    }
  };
  if (cut > 1) {
    phase *= unit;
    accumulate(1, cr, ci);
  }
  const double two_over = 2.0 * inv;
  for (std::size_t k = 2; k < cut; ++k) {
    phase *= unit;
    for (std::size_t r = 0; r < n; ++r) {
      double ar = 0.0, ai = 0.0;
      for (std::size_t q = rp[r]; q < rp[r + 1]; ++q) {
        ar += va[q] * cr[cl[q]];
        ai += va[q] * ci[cl[q]];
      }
      pr[r] = two_over * (ar - centre * cr[r]) - pr[r];
      pi[r] = two_over * (ai - centre * ci[r]) - pi[r];
    }
    pr.swap(cr);
    pi.swap(ci);
    accumulate(k, cr, ci);
  }
  StateVector out(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) out[static_cast<Eigen::Index>(r)] = Complex(orr[r], oi[r]);
  return out;
}

}  // namespace detail

/**
 * psi <- exp(-i tau H) psi by a Chebyshev expansion on the Gershgorin
 * enclosure of H. The series is cut where the tail of the Bessel
 * coefficients drops below `tolerance`, an absolute 2-norm bound. The cost is
 * about tau (hi - lo) / 2 matrix-vector products and needs no
 * orthogonalisation.
 */
template <typename Scalar>
StateVector chebyshev_expm(const CsrMatrix<Scalar>& h, const StateVector& psi, double tau,
                           double tolerance = 1e-12, ChebyshevStats* stats = nullptr) {
  if (static_cast<std::size_t>(psi.size()) != h.dim)
    throw std::invalid_argument("state dimension does not match the operator");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (stats) ++stats->calls;
  auto [lo, hi] = gershgorin_bounds(h);
  const double centre = 0.5 * (hi + lo);
  double half = 0.5 * (hi - lo);
  const Complex shift = std::exp(Complex(0.0, -tau * centre));
  if (half <= 1e-300 || tau == 0.0) return shift * psi;
  half *= 1.0 + 1e-12;
  const double z = std::abs(tau) * half;
  const double scale = psi.norm();
  if (scale == 0.0) return psi;

  // Truncation: the tail sum of |J_k| past the cut bounds the error.
  std::size_t n = static_cast<std::size_t>(std::ceil(z + 10.0 * std::cbrt(z) + 30.0));
  const auto bj = detail::bessel_j_sequence(z, n);
  std::size_t cut = bj.size();
  double tail = 0.0;
  while (cut > 1) {
    const double next = tail + 2.0 * std::abs(bj[cut - 1]);
    if (next * scale > 0.5 * tolerance || static_cast<double>(cut - 1) < z) break;
    tail = next;
    --cut;
  }

  // (-i)^k, or i^k for negative tau.
  const Complex unit = tau < 0 ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
  StateVector out;
  if constexpr (std::is_same_v<Scalar, double>)
    out = detail::chebyshev_sum_real(h, psi, centre, half, bj, cut, unit);
  else
    out = detail::chebyshev_sum(h, psi, centre, half, bj, cut, unit);
  if (stats) stats->matvecs += cut > 1 ? cut - 1 : 0;
  return shift * out;
}

}  // namespace xxgadget
