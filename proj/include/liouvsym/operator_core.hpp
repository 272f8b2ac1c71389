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

#include <cassert>
#include <string>
#include <string_view>

#include "liouvsym/types.hpp"

namespace liouvsym {

// Basis convention, fixed once for the whole library:
// a computational basis state |a_1 a_2 ... a_n> with a_i in {0,1} is encoded
// as the integer index a_1*2^(n-1) + a_2*2^(n-2) + ... + a_n, i.e. site 1 is
// the MOST significant bit. sigma^z_i has eigenvalue 1 - 2*a_i.

/// One computational basis state of an n-site spin-1/2 chain.
struct BasisState {
  int n = 0;
  std::uint64_t index = 0;

  int bit(int site) const {
    assert(site >= 1 && site <= n);
    return static_cast<int>((index >> (n - site)) & 1u);
  }

  double sigma_z(int site) const { return 1.0 - 2.0 * bit(site); }

  BasisState flipped(int site) const {
    return {n, index ^ (std::uint64_t{1} << (n - site))};
  }

  /// Total magnetization eigenvalue sum_i (1 - 2 a_i).
  int magnetization() const {
    const int down = static_cast<int>(__builtin_popcountll(index));
    return n - 2 * down;
  }

  static BasisState from_bits(std::string_view bits) {
    BasisState s{static_cast<int>(bits.size()), 0};
    for (char c : bits) {
      if (c != '0' && c != '1') throw std::invalid_argument("BasisState: bits must be 0/1");
      s.index = (s.index << 1) | static_cast<std::uint64_t>(c - '0');
    }
    return s;
  }

  std::string bits() const {
    std::string out(static_cast<std::size_t>(n), '0');
    for (int i = 1; i <= n; ++i) out[i - 1] = static_cast<char>('0' + bit(i));
    return out;
  }
};

inline Index hilbert_dim(int n) {
  if (n < 1 || n > 30) throw std::invalid_argument("chain length out of range");
  return Index{1} << n;
}

enum class PauliKind { x, y, z, plus, minus };

namespace detail {
inline void check_same_dim(const SpMat& a, const SpMat& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch(std::string(where) + ": operator dimensions differ");
}
}  // namespace detail

/// Sorts entries, merges duplicates and purges magnitudes below eps.
inline void canonicalize(SpMat& a, double eps = kPruneEps) {
  a.prune([eps](Index, Index, const Cplx& v) { return std::abs(v) > eps; });
  a.makeCompressed();
}

inline SpMat identity_op(Index dim) {
  SpMat id(dim, dim);
  id.setIdentity();
  return id;
}

/// Embeds a single-site Pauli/ladder matrix at `site` of an n-site chain,
/// identity on every other site, under the site-1-most-significant ordering.
inline SpMat site_operator(PauliKind kind, int site, int n) {
  if (site < 1 || site > n) throw std::invalid_argument("site_operator: site out of range");
  const Index dim = hilbert_dim(n);
  const std::uint64_t mask = std::uint64_t{1} << (n - site);
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(dim));
  for (std::uint64_t col = 0; col < static_cast<std::uint64_t>(dim); ++col) {
    const bool down = (col & mask) != 0;  // a_i = 1
    switch (kind) {
      case PauliKind::z:
        trip.emplace_back(col, col, down ? Cplx(-1, 0) : Cplx(1, 0));
        break;
      case PauliKind::x:
        trip.emplace_back(col ^ mask, col, Cplx(1, 0));
        break;
      case PauliKind::y:
        // sigma^y = [[0, -i], [i, 0]]: column a=1 -> -i on row a=0, and
        // column a=0 -> +i on row a=1.
        trip.emplace_back(col ^ mask, col, down ? Cplx(0, -1) : Cplx(0, 1));
        break;
      case PauliKind::plus:
        if (down) trip.emplace_back(col ^ mask, col, Cplx(1, 0));  // |0><1|
        break;
      case PauliKind::minus:
        if (!down) trip.emplace_back(col ^ mask, col, Cplx(1, 0));  // |1><0|
        break;
    }
  }
  SpMat op(dim, dim);
  op.setFromTriplets(trip.begin(), trip.end());
  op.makeCompressed();
  return op;
}

inline SpMat add(const SpMat& a, const SpMat& b) {
  detail::check_same_dim(a, b, "add");
  SpMat c = a + b;
  canonicalize(c);
  return c;
}

inline SpMat scale(Cplx c, const SpMat& a) {
  SpMat r = c * a;
  canonicalize(r);
  return r;
}

inline SpMat mul(const SpMat& a, const SpMat& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("mul: inner dimensions differ");
  SpMat c = a * b;
  canonicalize(c);
  return c;
}

inline SpMat adjoint_of(const SpMat& a) {
  SpMat c = a.adjoint();
  c.makeCompressed();
  return c;
}

inline SpMat commutator(const SpMat& a, const SpMat& b) {
  detail::check_same_dim(a, b, "commutator");
  SpMat c = a * b - b * a;
  canonicalize(c);
  return c;
}

inline SpMat anticommutator(const SpMat& a, const SpMat& b) {
  detail::check_same_dim(a, b, "anticommutator");
  SpMat c = a * b + b * a;
  canonicalize(c);
  return c;
}

/// Hilbert-Schmidt inner product tr(a^dag b).
inline Cplx hs_inner(const SpMat& a, const SpMat& b) {
  detail::check_same_dim(a, b, "hs_inner");
  return a.conjugate().cwiseProduct(b).sum();
}

inline double frobenius_norm(const SpMat& a) { return a.norm(); }

/// tr(a b), computed without forming the product.
inline Cplx trace_product(const SpMat& a, const SpMat& b) {
  detail::check_same_dim(a, b, "trace_product");
  SpMat at = SpMat(a.transpose());
  return at.cwiseProduct(b).sum();
}

inline Cplx trace_of(const SpMat& a) {
  Cplx t = 0;
  for (Index k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      if (it.row() == it.col()) t += it.value();
  return t;
}

/// Density matrix with its sanity diagnostics. The operator is kept sparse;
/// dense views are cheap at the chain lengths handled exactly.
struct DensityMatrix {
  SpMat rho;

  Index dim() const { return rho.rows(); }
  Cplx trace() const { return trace_of(rho); }
  DnMat dense() const { return DnMat(rho); }

  double hermiticity_error() const {
    SpMat d = rho - SpMat(rho.adjoint());
    return d.norm();
  }

  /// Smallest eigenvalue of the Hermitized operator.
  double min_eigenvalue() const {
    DnMat h = dense();
    h = 0.5 * (h + h.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<DnMat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  void normalize() {
    const Cplx t = trace();
    if (std::abs(t) < kPruneEps) throw SolverError("DensityMatrix: trace is numerically zero");
    rho = rho / t;
  }
};

inline DensityMatrix density_from_dense(const DnMat& m, double eps = kPruneEps) {
  DensityMatrix d;
  d.rho = m.sparseView(1.0, eps);
  d.rho.makeCompressed();
  return d;
}

/// Pure-state density matrix |psi><psi| (psi need not be normalized).
inline DensityMatrix pure_state(const DnVec& psi) {
  DnVec p = psi / psi.norm();
  return density_from_dense(p * p.adjoint());
}

/// tr(obs rho); warns (via returned flag in expectation_checked) when rho is
/// not trace-normalized.
inline Cplx expectation(const SpMat& obs, const DensityMatrix& rho) {
  detail::check_same_dim(obs, rho.rho, "expectation");
  return trace_product(obs, rho.rho);
}

inline Cplx expectation(const SpMat& obs, const DnMat& rho) {
  if (obs.rows() != rho.rows() || obs.cols() != rho.cols())
    throw DimensionMismatch("expectation: operator dimensions differ");
  Cplx t = 0;
  for (Index k = 0; k < obs.outerSize(); ++k)
    for (SpMat::InnerIterator it(obs, k); it; ++it) t += it.value() * rho(it.col(), it.row());
  return t;
}

}  // namespace liouvsym
