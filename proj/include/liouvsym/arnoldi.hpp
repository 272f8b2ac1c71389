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

#include <algorithm>
#include <numeric>
#include <random>

#include <Eigen/SparseLU>

#include "liouvsym/types.hpp"

namespace liouvsym {

/// Crude spectral-norm estimate by power iteration on A^dag A.
inline double spectral_norm_estimate(const SpMat& a, int iters = 30, std::uint64_t seed = 7) {
  if (a.rows() == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DnVec v(a.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = Cplx(gauss(rng), gauss(rng));
  v.normalize();
  const SpMat ad = a.adjoint();
  double est = 0.0;
  for (int it = 0; it < iters; ++it) {
    DnVec w = ad * (a * v).eval();
    const double nn = w.norm();
    if (nn == 0.0) return 0.0;
    est = std::sqrt(nn);
    v = w / nn;
  }
  return est;
}

struct RitzPair {
  Cplx value;
  DnVec vector;
  double residual;  // ||A v - lambda v||, explicit
};

/// Eigenvalues of A nearest the shift sigma via Arnoldi iteration on
/// (A - sigma I)^{-1}, factored once with SparseLU. Returns up to `want`
/// Ritz pairs sorted by distance to sigma, with explicit residuals.
inline std::vector<RitzPair> shift_invert_eigs(const SpMat& a, Cplx sigma, int want,
                                               int krylov_dim = 0, std::uint64_t seed = 99) {
  const Index n = a.rows();
  if (n != a.cols()) throw DimensionMismatch("shift_invert_eigs: square matrix required");
  if (n == 0) return {};
  int m = krylov_dim > 0 ? krylov_dim : std::max(2 * want + 20, 40);
  m = static_cast<int>(std::min<Index>(m, n));
  want = std::min(want, m);

  SpMat id(n, n);
  id.setIdentity();
  Eigen::SparseLU<SpMat> lu;
  SpMat shifted = a;
  Cplx sig = sigma;
  for (int attempt = 0;; ++attempt) {
    shifted = a - sig * id;
    shifted.makeCompressed();
    lu.compute(shifted);
    if (lu.info() == Eigen::Success) break;
    if (attempt >= 4) throw SolverError("shift_invert_eigs: factorization failed");
    sig = (sig == Cplx(0, 0)) ? Cplx(1e-8, 0) : sig * 10.0;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DnMat v(n, m + 1);
  DnMat h = DnMat::Zero(m + 1, m);
  DnVec v0(n);
  for (Index i = 0; i < n; ++i) v0(i) = Cplx(gauss(rng), gauss(rng));
  v.col(0) = v0 / v0.norm();

  int steps = m;
  for (int j = 0; j < m; ++j) {
    DnVec w = lu.solve(v.col(j));
    // Modified Gram-Schmidt with one reorthogonalization pass.
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const Cplx c = v.col(i).dot(w);
        if (pass == 0)
          h(i, j) = c;
        else
          h(i, j) += c;
        w -= c * v.col(i);
      }
    }
    const double nn = w.norm();
    h(j + 1, j) = Cplx(nn, 0);
    if (nn < 1e-12) {  // invariant subspace reached
      steps = j + 1;
      break;
    }
    v.col(j + 1) = w / nn;
  }

  Eigen::ComplexEigenSolver<DnMat> es(h.topLeftCorner(steps, steps), true);
  std::vector<int> order(static_cast<std::size_t>(steps));
  std::iota(order.begin(), order.end(), 0);
  // Largest |theta| of the inverted operator = closest to sigma.
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return std::abs(es.eigenvalues()(x)) > std::abs(es.eigenvalues()(y));
  });

  std::vector<RitzPair> out;
  for (int idx : order) {
    if (static_cast<int>(out.size()) >= want) break;
    const Cplx theta = es.eigenvalues()(idx);
    if (std::abs(theta) < 1e-14) continue;
    RitzPair rp;
    rp.value = sig + 1.0 / theta;
    rp.vector = v.leftCols(steps) * es.eigenvectors().col(idx);
    rp.vector.normalize();
    rp.residual = (a * rp.vector - rp.value * rp.vector).norm();
    out.push_back(std::move(rp));
  }
  return out;
}

struct NullSpaceResult {
  DnMat basis;       // orthonormal columns spanning the numerical null space
  double scale = 0;  // spectral norm estimate used for classification
  double max_residual = 0;
};

/// Numerical null space of a large sparse matrix by subspace iteration on
/// (A - sigma I)^{-1} with a small positive shift. The block size grows
/// until the iteration separates null modes from decaying ones.
inline NullSpaceResult null_space_iterative(const SpMat& a, double tol_rel = kZeroTol,
                                            int max_null_dim = 16, std::uint64_t seed = 1234) {
  const Index n = a.rows();
  NullSpaceResult res;
  res.scale = spectral_norm_estimate(a, 30, seed + 1);
  if (res.scale == 0.0) {  // zero matrix: everything is null
    res.basis = DnMat::Identity(n, n);
    return res;
  }
  const double sigma = 1e-6 * res.scale;

  SpMat id(n, n);
  id.setIdentity();
  Eigen::SparseLU<SpMat> lu;
  SpMat shifted = a - Cplx(sigma, 0) * id;
  shifted.makeCompressed();
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) throw SolverError("null_space_iterative: factorization failed");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  int k = 4;
  for (;;) {
    k = static_cast<int>(std::min<Index>(k, n));
    DnMat q(n, k);
    for (Index i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) q(i, j) = Cplx(gauss(rng), gauss(rng));
    {
      Eigen::HouseholderQR<DnMat> qr(q);
      q = qr.householderQ() * DnMat::Identity(n, k);
    }
    const double thresh = tol_rel * res.scale;
    for (int iter = 0; iter < 60; ++iter) {
      DnMat z(n, k);
      for (int j = 0; j < k; ++j) z.col(j) = lu.solve(q.col(j));
      Eigen::HouseholderQR<DnMat> qr(z);
      q = qr.householderQ() * DnMat::Identity(n, k);

      // Rayleigh-Ritz on A over the current subspace.
      DnMat aq(n, k);
      for (int j = 0; j < k; ++j) aq.col(j) = a * q.col(j);
      DnMat small = q.adjoint() * aq;
      Eigen::ComplexEigenSolver<DnMat> es(small, true);

      std::vector<int> null_idx;
      for (int j = 0; j < k; ++j)
        if (std::abs(es.eigenvalues()(j)) < thresh) null_idx.push_back(j);

      if (static_cast<int>(null_idx.size()) == k && k < max_null_dim && k < n) break;  // grow k

      if (!null_idx.empty()) {
        DnMat cand(n, static_cast<Index>(null_idx.size()));
        double max_res = 0;
        bool converged = true;
        for (std::size_t j = 0; j < null_idx.size(); ++j) {
          DnVec y = q * es.eigenvectors().col(null_idx[j]);
          y.normalize();
          const double r = (a * y).norm();
          max_res = std::max(max_res, r);
          if (r > thresh * 10) converged = false;
          cand.col(static_cast<Index>(j)) = y;
        }
        if (converged && iter >= 2) {
          Eigen::HouseholderQR<DnMat> cqr(cand);
          res.basis = cqr.householderQ() * DnMat::Identity(n, cand.cols());
          res.max_residual = max_res;
          return res;
        }
      } else if (iter >= 10) {
        // No null mode in sight: matrix is (numerically) nonsingular.
        res.basis = DnMat(n, 0);
        return res;
      }
    }
    if (k >= max_null_dim || k >= n)
      throw SolverError("null_space_iterative: null space larger than the configured cap");
    k *= 2;
  }
}

}  // namespace liouvsym
