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

#include <optional>

#include "liouvsym/liouvillian.hpp"

namespace liouvsym {

// Expectations of Hermitian observables must come out real; a significant
// imaginary part signals an invalid state (or a vectorization-convention
// bug) and is reported instead of silently discarded.
inline constexpr double kImagTol = 1e-10;

namespace detail {
inline double real_expectation(const SpMat& obs, const DnMat& rho, const char* what) {
  const Cplx v = expectation(obs, rho);
  if (std::abs(v.imag()) > kImagTol * std::max(1.0, std::abs(v.real())))
    throw SolverError(std::string(what) + ": significant imaginary part in expectation value");
  return v.real();
}
}  // namespace detail

/// J_i = tr(j_i rho) for every bond i = 1..n-1.
inline std::vector<double> current_profile(const DnMat& rho, int n) {
  if (rho.rows() != hilbert_dim(n)) throw DimensionMismatch("current_profile: dimension mismatch");
  std::vector<double> j(static_cast<std::size_t>(n - 1));
  for (int i = 1; i <= n - 1; ++i)
    j[static_cast<std::size_t>(i - 1)] = detail::real_expectation(build_current(i, n), rho, "current_profile");
  return j;
}

inline std::vector<double> current_profile(const DensityMatrix& rho, int n) {
  return current_profile(rho.dense(), n);
}

/// M_i = tr(sz_i rho) for every site.
inline std::vector<double> magnetization_profile(const DnMat& rho, int n) {
  if (rho.rows() != hilbert_dim(n))
    throw DimensionMismatch("magnetization_profile: dimension mismatch");
  std::vector<double> m(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i)
    m[static_cast<std::size_t>(i - 1)] =
        detail::real_expectation(site_operator(PauliKind::z, i, n), rho, "magnetization_profile");
  return m;
}

inline std::vector<double> magnetization_profile(const DensityMatrix& rho, int n) {
  return magnetization_profile(rho.dense(), n);
}

/// Current and magnetization profile of one state; the uniform current J is
/// defined only when the bond spread stays below `uniform_tol`.
struct TransportProfile {
  std::vector<double> currents;
  std::vector<double> magnetizations;
  std::optional<double> uniform_current;
  double spread = 0.0;
};

inline TransportProfile transport_profile(const DnMat& rho, int n, double uniform_tol = 1e-9) {
  TransportProfile p;
  p.currents = current_profile(rho, n);
  p.magnetizations = magnetization_profile(rho, n);
  const auto [lo, hi] = std::minmax_element(p.currents.begin(), p.currents.end());
  p.spread = *hi - *lo;
  if (p.spread < uniform_tol) {
    double mean = 0.0;
    for (double j : p.currents) mean += j;
    p.uniform_current = mean / static_cast<double>(p.currents.size());
  }
  return p;
}

/// Stationarity residuals r_i = tr(sz_i Lhat(rho)) / 2 on the interior
/// sites i = 2..n-1; all vanish on a true steady state.
inline std::vector<double> continuity_residual(const OpenModel& model, const DnMat& rho) {
  if (rho.rows() != model.dim()) throw DimensionMismatch("continuity_residual: dimension mismatch");
  const DnMat lrho = apply_liouvillian(model, rho);
  std::vector<double> res;
  res.reserve(static_cast<std::size_t>(std::max(0, model.n - 2)));
  for (int i = 2; i <= model.n - 1; ++i)
    res.push_back(0.5 * std::abs(expectation(site_operator(PauliKind::z, i, model.n), lrho)));
  return res;
}

/// Largest Frobenius deviation of the operator identity
///   i [H, sz_i / 2] = j_{i-1} - j_i,   i = 2..n-1,
/// computed exactly on the sparse operators. Zero for the constructed
/// current sign convention (divergence form).
inline double continuity_identity_residual(int n, double delta) {
  const SpMat h = build_xxz_hamiltonian(n, delta);
  double worst = 0.0;
  for (int i = 2; i <= n - 1; ++i) {
    const SpMat lhs = scale(Cplx(0, 0.5), commutator(h, site_operator(PauliKind::z, i, n)));
    const SpMat rhs = build_current(i - 1, n) - build_current(i, n);
    SpMat d = lhs - rhs;
    worst = std::max(worst, d.norm());
  }
  return worst;
}

}  // namespace liouvsym
