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

#include <Eigen/SVD>

#include "liouvsym/arnoldi.hpp"
#include "liouvsym/liouvillian.hpp"

namespace liouvsym {

struct NessOptions {
  enum class Method { automatic, dense, iterative };
  Method method = Method::automatic;
  // Singular/eigen values below tol_rel times the spectral-norm estimate
  // count as zero; shared with the spectra layer.
  double tol_rel = kZeroTol;
  Index dense_cap = 1024;       // matrix dimension up to which the dense SVD runs
  double positivity_tol = 1e-10;
  std::uint64_t seed = 1234;    // iterative-path randomness, fixed for determinism
};

/// One fixed point, embedded back into the full Hilbert space.
struct SteadyStateResult {
  DensityMatrix rho;
  std::string block_label;
  double residual = 0.0;  // ||Lhat rho||_F via the full-space action
  double min_eig = 0.0;
  Index null_dim = 0;     // null-space dimension found in the block
  bool trace_bearing = false;
  bool positive = false;
};

/// Null-space solve of one (block-)superoperator.
struct NessSolve {
  std::vector<SteadyStateResult> states;  // one per trace-bearing null vector
  Index null_dim = 0;
  std::string block_label;
  double null_scale = 0.0;  // spectral-norm estimate behind the zero threshold
};

namespace detail {

struct NullSpace {
  DnMat basis;
  double scale = 0.0;
};

inline NullSpace null_space_dense(const SpMat& a, double tol_rel) {
  const DnMat ad(a);
  NullSpace ns;
  if (ad.rows() == 0) return ns;
  DnMat v;
  Eigen::VectorXd sv;
  if (ad.rows() <= 96) {
    Eigen::JacobiSVD<DnMat> svd(ad, Eigen::ComputeFullV);
    sv = svd.singularValues();
    v = svd.matrixV();
  } else {
    Eigen::BDCSVD<DnMat> svd(ad, Eigen::ComputeFullV);
    sv = svd.singularValues();
    v = svd.matrixV();
  }
  ns.scale = sv(0);
  if (ns.scale <= 0.0) {  // zero matrix, e.g. a one-dimensional dark-state block
    ns.basis = DnMat::Identity(ad.rows(), ad.cols());
    return ns;
  }
  Index count = 0;
  for (Index i = sv.size() - 1; i >= 0 && sv(i) < tol_rel * ns.scale; --i) ++count;
  ns.basis = v.rightCols(count);
  return ns;
}

/// Alternating projection between the positive cone and the (affine) null
/// space, used when a degenerate null space hands us an indefinite
/// trace-one representative. Falls back honestly: returns false when no
/// positive combination emerges.
inline bool positivize_in_null_space(const DnMat& null_basis_full_ops, DnMat& rho,
                                     double tol, int max_iters = 300) {
  // null_basis_full_ops: columns are vec'd (row-major) full-space operators.
  const Index d = rho.rows();
  auto project_to_null = [&](const DnMat& x) {
    DnVec v = vec_rm(x);
    DnVec c = null_basis_full_ops.adjoint() * v;
    return unvec_rm(DnVec(null_basis_full_ops * c), d, d);
  };
  for (int it = 0; it < max_iters; ++it) {
    rho = 0.5 * (rho + rho.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<DnMat> es(rho);
    if (es.eigenvalues().minCoeff() >= -tol) {
      const Cplx tr = rho.trace();
      if (std::abs(tr) < 1e-14) return false;
      rho /= tr;
      return true;
    }
    DnMat positive = es.eigenvectors() *
                     es.eigenvalues().cwiseMax(0.0).asDiagonal().toDenseMatrix().cast<Cplx>() *
                     es.eigenvectors().adjoint();
    rho = project_to_null(positive);
    const Cplx tr = rho.trace();
    if (std::abs(tr) < 1e-14) return false;
    rho /= tr;
  }
  return false;
}

}  // namespace detail

/// Fixed points of a (block-)superoperator: numerical null space, Hermitized
/// trace-normalized representatives, positivity certificates, residuals via
/// the full-space action. Trace-free null vectors are counted in null_dim
/// but yield no state (NoTraceBearingNullVector is a report, not an error).
inline NessSolve solve_ness(const OpenModel& model, const Superoperator& sup,
                            const NessOptions& opts = {}) {
  NessSolve out;
  out.block_label = sup.label();

  detail::NullSpace ns;
  const bool dense = opts.method == NessOptions::Method::dense ||
                     (opts.method == NessOptions::Method::automatic && sup.dim() <= opts.dense_cap);
  if (dense) {
    ns = detail::null_space_dense(sup.matrix, opts.tol_rel);
  } else {
    NullSpaceResult it = null_space_iterative(sup.matrix, opts.tol_rel, 16, opts.seed);
    ns.basis = std::move(it.basis);
    ns.scale = it.scale;
  }
  out.null_dim = ns.basis.cols();
  out.null_scale = ns.scale;
  if (out.null_dim == 0) return out;

  // Embed the null basis to full space once; used both for the states and
  // for the positivization fallback.
  std::vector<DnMat> null_full;
  null_full.reserve(static_cast<std::size_t>(out.null_dim));
  for (Index k = 0; k < out.null_dim; ++k)
    null_full.push_back(embed_to_full(sup, ns.basis.col(k)));

  DnMat null_basis_vecs(sup.full_dim * sup.full_dim, out.null_dim);
  for (Index k = 0; k < out.null_dim; ++k) null_basis_vecs.col(k) = vec_rm(null_full[k]);
  {  // orthonormalize the embedded family (isometries keep it orthonormal already)
    Eigen::HouseholderQR<DnMat> qr(null_basis_vecs);
    null_basis_vecs = qr.householderQ() * DnMat::Identity(null_basis_vecs.rows(), out.null_dim);
  }

  const double trace_tol = 1e-8;
  for (Index k = 0; k < out.null_dim; ++k) {
    const DnMat& x = null_full[k];
    const Cplx tr = x.trace();
    if (std::abs(tr) < trace_tol * x.norm()) continue;  // trace-free direction

    DnMat rho = x / tr;
    rho = 0.5 * (rho + rho.adjoint().eval());

    SteadyStateResult r;
    r.block_label = out.block_label;
    r.null_dim = out.null_dim;
    r.trace_bearing = true;

    Eigen::SelfAdjointEigenSolver<DnMat> es(rho, Eigen::EigenvaluesOnly);
    double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -opts.positivity_tol && out.null_dim > 1) {
      // Degenerate family: look for a positive representative instead of
      // reporting the arbitrary SVD mixture.
      if (detail::positivize_in_null_space(null_basis_vecs, rho, opts.positivity_tol)) {
        Eigen::SelfAdjointEigenSolver<DnMat> es2(rho, Eigen::EigenvaluesOnly);
        min_eig = es2.eigenvalues().minCoeff();
      }
    }
    r.min_eig = min_eig;
    r.positive = min_eig >= -opts.positivity_tol;
    r.rho = density_from_dense(rho);
    r.residual = apply_liouvillian(model, rho).norm();
    out.states.push_back(std::move(r));
  }
  return out;
}

inline NessSolve solve_ness_full(const OpenModel& model, const NessOptions& opts = {}) {
  return solve_ness(model, assemble_liouvillian(model), opts);
}

inline NessSolve solve_ness_block(const OpenModel& model, const OperatorBlock& block,
                                  const NessOptions& opts = {}) {
  if (!block.diagonal())
    throw std::invalid_argument("solve_ness_block: trace-bearing solves need a diagonal block");
  return solve_ness(model, restrict_liouvillian(model, block), opts);
}

/// Convex combination of steady states: rho(u) = sum_k u_k rho_k. Linearity
/// of the flow makes the mixture a steady state again.
inline DensityMatrix convex_combination(const std::vector<SteadyStateResult>& states,
                                        const std::vector<double>& weights) {
  if (states.empty() || states.size() != weights.size())
    throw std::invalid_argument("convex_combination: states/weights size mismatch");
  double sum = 0.0;
  for (double u : weights) {
    if (u < 0.0) throw std::invalid_argument("convex_combination: negative weight");
    sum += u;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("convex_combination: weights must sum to 1");
  const Index d = states.front().rho.dim();
  DnMat mix = DnMat::Zero(d, d);
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k].rho.dim() != d) throw DimensionMismatch("convex_combination: dimension mismatch");
    mix += weights[k] * states[k].rho.dense();
  }
  return density_from_dense(mix);
}

struct MultiplicityRow {
  std::string label;
  Index null_dim = 0;
  Index block_dim = 0;  // operator-space dimension of the diagonal block
  double residual = 0.0;
};

/// Measured null-space dimension per diagonal block of the decomposition.
/// Under a strong symmetry every diagonal block must carry at least one
/// fixed point; the caller checks the returned dims against that bound.
inline std::vector<MultiplicityRow> ness_multiplicity_report(const OpenModel& model,
                                                             const SymmetryDecomposition& dec,
                                                             const NessOptions& opts = {}) {
  std::vector<MultiplicityRow> rows(dec.sectors.size());
  std::vector<OperatorBlock> diag;
  diag.reserve(dec.sectors.size());
  for (std::size_t a = 0; a < dec.sectors.size(); ++a)
    diag.push_back({a, a, dec.sectors[a], dec.sectors[a]});
  parallel_for(static_cast<std::int64_t>(diag.size()), [&](std::int64_t i) {
    const auto solve = solve_ness_block(model, diag[static_cast<std::size_t>(i)], opts);
    MultiplicityRow row;
    row.label = diag[static_cast<std::size_t>(i)].row.label_string();
    row.null_dim = solve.null_dim;
    row.block_dim = diag[static_cast<std::size_t>(i)].rows() * diag[static_cast<std::size_t>(i)].cols();
    for (const auto& st : solve.states) row.residual = std::max(row.residual, st.residual);
    rows[static_cast<std::size_t>(i)] = std::move(row);
  });
  return rows;
}

}  // namespace liouvsym
