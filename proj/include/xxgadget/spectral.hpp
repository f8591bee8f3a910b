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
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xxgadget/eigensolver.hpp"
#include "xxgadget/parallel.hpp"
#include "xxgadget/toy_problem.hpp"

namespace xxgadget {

/** Gaps below this are reported as an exact degeneracy. */
inline constexpr double kDegeneracyGap = 1e-10;

struct GapCurve {
  std::vector<double> s;
  std::vector<double> gaps;
  /** Lowest k eigenvalues per grid point. */
  std::vector<Eigen::VectorXd> energies;
  std::vector<bool> degenerate;
};

inline std::vector<double> uniform_grid(std::size_t points, double lo = 0.0, double hi = 1.0) {
  if (points < 2) throw std::invalid_argument("a grid needs at least two points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = i + 1 == points ? hi : lo + (hi - lo) * static_cast<double>(i) / double(points - 1);
  return g;
}

/**
 * Evaluates the low spectrum of H(s), warm-starting the iterative solver from
 * the previous point. One instance per thread.
 */
class SpectrumTracker {
 public:
  SpectrumTracker(const CompiledSchedule& sched, std::size_t k, EigenOptions opts = {})
      : sched_(&sched), k_(std::max<std::size_t>(k, 2)), opts_(opts) {
    opts_.want_vectors = sched.dim() > opts_.dense_limit;
  }

  Eigen::VectorXd energies(double s) {
    const auto h = sched_->at(s);
    const auto r = lowest_eigs(h, std::min(k_, h.dim), opts_, guess_.size() ? &guess_ : nullptr);
    if (opts_.want_vectors) guess_ = r.vectors;
    ++evaluations_;
    matvecs_ += r.matvecs;
    max_residual_ = std::max(max_residual_, r.residuals.size() ? r.residuals.maxCoeff() : 0.0);
    return r.values;
  }

  double gap(double s) {
    const auto e = energies(s);
    return clamp_gap(e[1] - e[0]);
  }

  static double clamp_gap(double g) { return g < kDegeneracyGap ? 0.0 : g; }

  std::size_t evaluations() const { return evaluations_; }
  std::size_t matvecs() const { return matvecs_; }
  double max_residual() const { return max_residual_; }

 private:
  const CompiledSchedule* sched_;
  std::size_t k_;
  EigenOptions opts_;
  DenseMatrix guess_;
  std::size_t evaluations_ = 0;
  std::size_t matvecs_ = 0;
  double max_residual_ = 0.0;
};

inline GapCurve gap_curve(const CompiledSchedule& sched, const std::vector<double>& grid,
                          std::size_t k = 3, const EigenOptions& opts = {}) {
  for (double s : grid) check_s(s);
  GapCurve c;
  SpectrumTracker tr(sched, k, opts);
  for (double s : grid) {
    const auto e = tr.energies(s);
    const double g = e[1] - e[0];
    c.s.push_back(s);
    c.energies.push_back(e);
    c.degenerate.push_back(g < kDegeneracyGap);
    c.gaps.push_back(SpectrumTracker::clamp_gap(g));
  }
  return c;
}

struct MinGapResult {
  double delta_min = 0.0;
  double s_star = 0.0;
  int refinement_iterations = 0;
  std::size_t evaluations = 0;
  /** Minimum found at s = 0 or s = 1. */
  bool boundary_minimum = false;
  /** The golden-section search ended on its bracket edge and a finer rescan ran. */
  bool rescanned = false;
  double max_residual = 0.0;
};

namespace detail {

struct Golden {
  double s = 0.0, value = 0.0;
  int iterations = 0;
  bool at_edge = false;
};

template <typename F>
Golden golden_section(F&& f, double lo, double hi, double window) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  Golden g;
  while (b - a > window) {
    ++g.iterations;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  if (fc <= fd) {
    g.s = c;
    g.value = fc;
  } else {
    g.s = d;
    g.value = fd;
  }
  // Compare with the bracket ends: a minimum pinned to an end means the
  // bracket did not contain an interior minimum.
  const double flo = f(lo), fhi = f(hi);
  if (flo < g.value) {
    g = {lo, flo, g.iterations, true};
  } else if (fhi < g.value) {
    g = {hi, fhi, g.iterations, true};
  } else {
    g.at_edge = std::min(g.s - lo, hi - g.s) <= window;
  }
  return g;
}

template <typename F>
std::size_t argmin_on(const std::vector<double>& grid, F&& f, std::vector<double>& values) {
  values.resize(grid.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = f(grid[i]);
    if (values[i] < values[best]) best = i;
  }
  return best;
}

}  // namespace detail

/**
 * Coarse scan followed by golden-section refinement on the two grid cells
 * around the coarse minimum, to an s-window below `window`. If the search
 * lands on its bracket edge the bracket is rescanned 10x finer and refined
 * again.
 */
inline MinGapResult min_gap(const CompiledSchedule& sched, std::size_t coarse_grid_size = 101,
                            const EigenOptions& opts = {}, double window = 1e-5) {
  if (coarse_grid_size < 11) throw std::invalid_argument("coarse grid needs at least 11 points");
  SpectrumTracker tr(sched, 3, opts);
  auto f = [&](double s) { return tr.gap(s); };
  const auto grid = uniform_grid(coarse_grid_size);
  std::vector<double> values;
  const std::size_t i = detail::argmin_on(grid, f, values);
  double lo = grid[i == 0 ? 0 : i - 1];
  double hi = grid[std::min(i + 1, grid.size() - 1)];

  MinGapResult out;
  auto g = detail::golden_section(f, lo, hi, window);
  out.refinement_iterations = g.iterations;
  if (g.at_edge && lo < hi) {
    out.rescanned = true;
    const auto fine = uniform_grid(21, lo, hi);
    std::vector<double> fv;
    const std::size_t j = detail::argmin_on(fine, f, fv);
    const double flo = fine[j == 0 ? 0 : j - 1];
    const double fhi = fine[std::min(j + 1, fine.size() - 1)];
    auto g2 = detail::golden_section(f, flo, fhi, window);
    out.refinement_iterations += g2.iterations;
    if (g2.value <= g.value) g = g2;
  }
  out.delta_min = g.value;
  out.s_star = g.s;
  out.boundary_minimum = out.s_star <= window || out.s_star >= 1.0 - window;
  out.evaluations = tr.evaluations();
  out.max_residual = tr.max_residual();
  return out;
}

inline MinGapResult min_gap(const ToyInstance& inst, std::size_t coarse_grid_size = 101,
                            const EigenOptions& opts = {}) {
  const CompiledSchedule sched(build_anneal(inst).schedule);
  return min_gap(sched, coarse_grid_size, opts);
}

// -------------------------------------------------------------------- sweeps

struct GapScalingRecord {
  unsigned n0 = 0;
  Variant variant = Variant::TF;
  double cp = 0.0;
  /** Reported value: multiplied by C_p for TF/XX when `scaled`. */
  double delta_min = 0.0;
  double s_star = 0.0;
  bool scaled = false;
  MinGapResult raw;
  std::string error;
};

struct SweepOptions {
  std::size_t coarse_grid = 101;
  unsigned threads = 1;
  EigenOptions eigen;
  /** Largest register allowed without opting in. */
  unsigned max_qubits = 18;
};

inline void check_size(const ToyInstance& inst, unsigned max_qubits) {
  const unsigned n = qubit_count(inst.variant, inst.n0);
  if (n > max_qubits)
    throw std::length_error(std::string(to_string(inst.variant)) + " at n0 = " +
                            std::to_string(inst.n0) + " needs " + std::to_string(n) +
                            " qubits; the limit is " + std::to_string(max_qubits));
}

/**
 * One minimum-gap search per (n0, variant) cell. Failures are recorded in the
 * cell and the sweep continues.
 */
inline std::vector<GapScalingRecord> gap_scaling_sweep(const std::vector<unsigned>& n0_list,
                                                       const std::vector<Variant>& variants,
                                                       double cp, bool scale_non_gadget_by_cp,
                                                       const SweepOptions& o = {},
                                                       const ToyInstance& base = {}) {
  std::vector<GapScalingRecord> out;
  for (unsigned n0 : n0_list)
    for (Variant v : variants) {
      GapScalingRecord r;
      r.n0 = n0;
      r.variant = v;
      r.cp = cp;
      out.push_back(r);
    }
  parallel_for(out.size(), o.threads, [&](std::size_t i) {
    auto& r = out[i];
    try {
      ToyInstance inst = base;
      inst.n0 = r.n0;
      inst.variant = r.variant;
      inst.cp = cp;
      check_size(inst, o.max_qubits);
      r.raw = min_gap(inst, o.coarse_grid, o.eigen);
      r.s_star = r.raw.s_star;
      const bool plain = r.variant == Variant::TF || r.variant == Variant::XX;
      r.scaled = scale_non_gadget_by_cp && plain;
      r.delta_min = r.raw.delta_min * (r.scaled ? cp : 1.0);
    } catch (const std::exception& e) {
      r.error = e.what();
      r.delta_min = std::numeric_limits<double>::quiet_NaN();
    }
  });
  return out;
}

struct CpErrorRecord {
  double cp = 0.0;
  double delta_min_oh_scaled = 0.0;
  double delta_min_xx = 0.0;
  double normalized_error = 0.0;
  MinGapResult oh;
};

/** |Delta_min^XX - 2 C_p Delta_min^OH(C_p)| / Delta_min^XX per C_p. */
inline std::vector<CpErrorRecord> cp_error_sweep(unsigned n0, const std::vector<double>& cp_list,
                                                 const SweepOptions& o = {},
                                                 const ToyInstance& base = {}) {
  for (double cp : cp_list)
    if (!(cp > 0.0)) throw std::invalid_argument("C_p values must be positive");
  ToyInstance xx = base;
  xx.n0 = n0;
  xx.variant = Variant::XX;
  check_size(xx, o.max_qubits);
  const double dxx = min_gap(xx, o.coarse_grid, o.eigen).delta_min;
  std::vector<CpErrorRecord> out(cp_list.size());
  parallel_for(out.size(), o.threads, [&](std::size_t i) {
    ToyInstance oh = base;
    oh.n0 = n0;
    oh.variant = Variant::OneHot;
    oh.cp = cp_list[i];
    check_size(oh, o.max_qubits);
    auto& r = out[i];
    r.cp = cp_list[i];
    r.oh = min_gap(oh, o.coarse_grid, o.eigen);
    r.delta_min_oh_scaled = 2.0 * r.cp * r.oh.delta_min;
    r.delta_min_xx = dxx;
    r.normalized_error = std::abs(dxx - r.delta_min_oh_scaled) / dxx;
  });
  return out;
}

// ----------------------------------------------------------------------- CSV

inline void write_gap_curve_csv(std::ostream& os, const GapCurve& c) {
  os << "s,e0,e1,e2,gap\n";
  for (std::size_t i = 0; i < c.s.size(); ++i) {
    const auto& e = c.energies[i];
    os << format_real(c.s[i]);
    for (Eigen::Index j = 0; j < 3; ++j)
      os << ',' << (j < e.size() ? format_real(e[j]) : std::string("nan"));
    os << ',' << format_real(c.gaps[i]) << '\n';
  }
}

inline void write_gap_scaling_csv(std::ostream& os, const std::vector<GapScalingRecord>& rs) {
  os << "n0,variant,cp,delta_min,s_star,scaled\n";
  for (const auto& r : rs)
    os << r.n0 << ',' << to_string(r.variant) << ',' << format_real(r.cp) << ','
       << format_real(r.delta_min) << ',' << format_real(r.s_star) << ',' << (r.scaled ? 1 : 0)
       << '\n';
}

inline void write_cp_error_csv(std::ostream& os, const std::vector<CpErrorRecord>& rs) {
  os << "cp,delta_min_oh_scaled,delta_min_xx,normalized_error\n";
  for (const auto& r : rs)
    os << format_real(r.cp) << ',' << format_real(r.delta_min_oh_scaled) << ','
       << format_real(r.delta_min_xx) << ',' << format_real(r.normalized_error) << '\n';
}

}  // namespace xxgadget
