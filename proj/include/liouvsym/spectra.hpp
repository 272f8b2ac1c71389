// Copyright 2026 the liouvsym authors
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

#include "liouvsym/arnoldi.hpp"
#include "liouvsym/liouvillian.hpp"

namespace liouvsym {

struct SpectrumOptions {
  Index dense_cap = 2048;     // dense eigensolve up to this matrix dimension
  bool allow_iterative = true;
  int iterative_count = 24;   // eigenvalues nearest zero when falling back
  double zero_tol = kZeroTol;
  std::uint64_t seed = 4321;
};

struct SpectrumResult {
  std::vector<Cplx> eigenvalues;
  std::string block_label;
  Index zero_modes = 0;
  double scale = 0.0;   // max |lambda| (or norm estimate for partial spectra)
  bool partial = false; // true when only a window near the imaginary axis was computed
};

inline SpectrumResult full_spectrum(const Superoperator& sup, const SpectrumOptions& opts = {}) {
  SpectrumResult res;
  res.block_label = sup.label();
  if (sup.dim() == 0) return res;
  if (sup.dim() <= opts.dense_cap) {
    Eigen::ComplexEigenSolver<DnMat> es(DnMat(sup.matrix), false);
    if (es.info() != Eigen::Success) throw SolverError("full_spectrum: dense eigensolve failed");
    res.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + sup.dim());
    for (const Cplx& l : res.eigenvalues) res.scale = std::max(res.scale, std::abs(l));
  } else {
    if (!opts.allow_iterative)
      throw SolverError("full_spectrum: dimension over the dense cap and iterative fallback disabled");
    auto pairs = shift_invert_eigs(sup.matrix, Cplx(0, 0),
                                   std::min<Index>(opts.iterative_count, sup.dim()), 0, opts.seed);
    res.partial = true;
    res.scale = spectral_norm_estimate(sup.matrix, 30, opts.seed + 1);
    for (const auto& p : pairs)
      if (p.residual < 1e-8 * std::max(1.0, res.scale)) res.eigenvalues.push_back(p.value);
  }
  for (const Cplx& l : res.eigenvalues)
    if (std::abs(l) <= opts.zero_tol * std::max(res.scale, 1e-300)) ++res.zero_modes;
  return res;
}

/// R = min over nonzero eigenvalues of -Re(lambda). Eigenvalues with modulus
/// below zero_tol * scale are the zero modes and are excluded.
inline double spectral_gap(const SpectrumResult& spec, double zero_tol = kZeroTol) {
  if (spec.eigenvalues.empty()) throw NoNonzeroModes("spectral_gap: empty spectrum");
  const double thresh = zero_tol * std::max(spec.scale, 1e-300);
  double gap = 0.0;
  bool found = false;
  for (const Cplx& l : spec.eigenvalues) {
    if (std::abs(l) <= thresh) continue;
    const double rate = -l.real();
    if (!found || rate < gap) gap = rate;
    found = true;
  }
  if (!found) throw NoNonzeroModes("spectral_gap: all eigenvalues classified as zero modes");
  return gap;
}

/// Cumulative damping-rate distribution W(r) = #{Re lambda_j <= r} / total.
/// Heaviside convention theta(0) = 1, so W(0) = 1 for a dissipative
/// spectrum and the function is monotone nondecreasing and right-continuous
/// on the emitted grid.
inline std::vector<std::pair<double, double>> cumulative_distribution(
    const SpectrumResult& spec, const std::vector<double>& r_grid) {
  if (spec.eigenvalues.empty()) throw std::invalid_argument("cumulative_distribution: empty spectrum");
  if (r_grid.empty()) throw std::invalid_argument("cumulative_distribution: empty grid");
  std::vector<double> reals;
  reals.reserve(spec.eigenvalues.size());
  for (const Cplx& l : spec.eigenvalues) reals.push_back(l.real());
  std::sort(reals.begin(), reals.end());
  const double total = static_cast<double>(reals.size());
  std::vector<std::pair<double, double>> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    const auto it = std::upper_bound(reals.begin(), reals.end(), r);
    out.emplace_back(r, static_cast<double>(it - reals.begin()) / total);
  }
  return out;
}

/// Uniform grid from the most negative decay rate up to r = 0 (inclusive).
inline std::vector<double> default_r_grid(const SpectrumResult& spec, int points = 400) {
  double lo = 0.0;
  for (const Cplx& l : spec.eigenvalues) lo = std::min(lo, l.real());
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points) + 1);
  for (int i = 0; i <= points; ++i)
    grid.push_back(lo + (0.0 - lo) * static_cast<double>(i) / points);
  return grid;
}

}  // namespace liouvsym
