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

#include <cmath>
#include <vector>

#include "liouvsym/operator_core.hpp"

namespace liouvsym {

enum class DriveKind { weak, strong };

inline const char* to_string(DriveKind d) { return d == DriveKind::weak ? "weak" : "strong"; }

/// Open XXZ chain: Hamiltonian, boundary jump operators and their parameters.
struct OpenModel {
  int n = 0;
  double delta = 0.0;
  double gamma = 0.0;
  double mu = 0.0;
  DriveKind drive = DriveKind::weak;
  SpMat hamiltonian;
  std::vector<SpMat> jumps;

  Index dim() const { return hamiltonian.rows(); }
};

/// H = sum_i [ sx_i sx_{i+1} + sy_i sy_{i+1} + delta sz_i sz_{i+1} ],
/// open boundaries, n >= 2.
inline SpMat build_xxz_hamiltonian(int n, double delta) {
  if (n < 2) throw std::invalid_argument("build_xxz_hamiltonian: n must be >= 2");
  const Index dim = hilbert_dim(n);
  SpMat h(dim, dim);
  for (int i = 1; i < n; ++i) {
    const SpMat xx = site_operator(PauliKind::x, i, n) * site_operator(PauliKind::x, i + 1, n);
    const SpMat yy = site_operator(PauliKind::y, i, n) * site_operator(PauliKind::y, i + 1, n);
    const SpMat zz = site_operator(PauliKind::z, i, n) * site_operator(PauliKind::z, i + 1, n);
    h += xx + yy + Cplx(delta, 0) * zz;
  }
  canonicalize(h);
  return h;
}

namespace detail {
inline void check_drive_params(double gamma, double mu) {
  if (!(gamma > 0)) throw std::invalid_argument("drive: gamma must be > 0");
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("drive: mu must be in [0,1]");
}
}  // namespace detail

/// Four boundary spin-flip channels, in the fixed index order
///   L1 = sqrt(G(1-mu)) s+_1, L2 = sqrt(G(1+mu)) s-_1,
///   L3 = sqrt(G(1+mu)) s+_n, L4 = sqrt(G(1-mu)) s-_n.
/// The ordering is part of the contract; symmetry permutation tests rely
/// on it.
inline std::vector<SpMat> build_weak_drive(int n, double gamma, double mu) {
  detail::check_drive_params(gamma, mu);
  if (n < 2) throw std::invalid_argument("build_weak_drive: n must be >= 2");
  const double lo = std::sqrt(gamma * (1.0 - mu));
  const double hi = std::sqrt(gamma * (1.0 + mu));
  return {
      scale(lo, site_operator(PauliKind::plus, 1, n)),
      scale(hi, site_operator(PauliKind::minus, 1, n)),
      scale(hi, site_operator(PauliKind::plus, n, n)),
      scale(lo, site_operator(PauliKind::minus, n, n)),
  };
}

/// Magnetization-conserving pair hop between the boundary sites:
///   L1 = G(1-mu) s+_1 s-_n,  L2 = G(1+mu) s-_1 s+_n.
/// The amplitudes are G(1±mu), not sqrt(G(1±mu)); dissipation rates thus
/// scale as G²(1±mu)².
inline std::vector<SpMat> build_strong_drive(int n, double gamma, double mu) {
  detail::check_drive_params(gamma, mu);
  if (n < 2) throw std::invalid_argument("build_strong_drive: n must be >= 2");
  const SpMat hop_fwd = site_operator(PauliKind::plus, 1, n) * site_operator(PauliKind::minus, n, n);
  const SpMat hop_bwd = site_operator(PauliKind::minus, 1, n) * site_operator(PauliKind::plus, n, n);
  return {
      scale(gamma * (1.0 - mu), hop_fwd),
      scale(gamma * (1.0 + mu), hop_bwd),
  };
}

/// Permutation |a_1 ... a_n> -> |a_n ... a_1| (site reversal). P² = 1.
inline SpMat build_parity(int n) {
  const Index dim = hilbert_dim(n);
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(dim));
  for (std::uint64_t col = 0; col < static_cast<std::uint64_t>(dim); ++col) {
    std::uint64_t rev = 0;
    for (int i = 0; i < n; ++i) rev |= ((col >> i) & 1u) << (n - 1 - i);
    trip.emplace_back(rev, col, Cplx(1, 0));
  }
  SpMat p(dim, dim);
  p.setFromTriplets(trip.begin(), trip.end());
  p.makeCompressed();
  return p;
}

/// S = P * prod_i sx_i: site reversal combined with a global spin flip.
/// Unitary involution; commutes with the XXZ Hamiltonian for any delta.
inline SpMat build_spin_flip_parity(int n) {
  const Index dim = hilbert_dim(n);
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(dim));
  for (std::uint64_t col = 0; col < static_cast<std::uint64_t>(dim); ++col) {
    std::uint64_t rev = 0;
    for (int i = 0; i < n; ++i) rev |= ((col >> i) & 1u) << (n - 1 - i);
    trip.emplace_back(rev ^ all, col, Cplx(1, 0));
  }
  SpMat s(dim, dim);
  s.setFromTriplets(trip.begin(), trip.end());
  s.makeCompressed();
  return s;
}

/// Total magnetization M = sum_i sz_i, diagonal with integer spectrum
/// {-n, -n+2, ..., n}.
inline SpMat build_magnetization(int n) {
  const Index dim = hilbert_dim(n);
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(dim));
  for (std::uint64_t col = 0; col < static_cast<std::uint64_t>(dim); ++col) {
    const int m = n - 2 * __builtin_popcountll(col);
    if (m != 0) trip.emplace_back(col, col, Cplx(m, 0));
  }
  SpMat mm(dim, dim);
  mm.setFromTriplets(trip.begin(), trip.end());
  mm.makeCompressed();
  return mm;
}

/// Spin current through bond (i, i+1):
///   j_i = sx_i sy_{i+1} - sy_i sx_{i+1} = 2i (s+_i s-_{i+1} - s-_i s+_{i+1}).
/// Sign convention: the constructed j_i satisfies the bulk continuity
/// identity in divergence form, i[H, sz_i/2] = j_{i-1} - j_i (verified
/// exactly in the tests).
inline SpMat build_current(int bond, int n) {
  if (bond < 1 || bond > n - 1) throw std::invalid_argument("build_current: bond out of range");
  const SpMat xy = site_operator(PauliKind::x, bond, n) * site_operator(PauliKind::y, bond + 1, n);
  const SpMat yx = site_operator(PauliKind::y, bond, n) * site_operator(PauliKind::x, bond + 1, n);
  SpMat j = xy - yx;
  canonicalize(j);
  return j;
}

inline OpenModel make_open_model(int n, double delta, double gamma, double mu, DriveKind drive) {
  OpenModel m;
  m.n = n;
  m.delta = delta;
  m.gamma = gamma;
  m.mu = mu;
  m.drive = drive;
  m.hamiltonian = build_xxz_hamiltonian(n, delta);
  m.jumps = (drive == DriveKind::weak) ? build_weak_drive(n, gamma, mu)
                                       : build_strong_drive(n, gamma, mu);
  return m;
}

}  // namespace liouvsym
