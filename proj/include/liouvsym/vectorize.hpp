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

#include <unsupported/Eigen/KroneckerProduct>

#include "liouvsym/operator_core.hpp"

namespace liouvsym {

// Vectorization convention, fixed globally: vec stacks ROWS, so an r x c
// matrix element (i, j) lands at vec index i*c + j. Under this convention
//   vec(A X B) = (A kron B^T) vec(X).
// The two stacking conventions differ by a transposition and silently
// corrupt results if mixed; every superoperator in this library uses this
// one and the round trip is unit-tested.

inline DnVec vec_rm(const DnMat& x) {
  DnVec v(x.rows() * x.cols());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) v(i * x.cols() + j) = x(i, j);
  return v;
}

inline DnMat unvec_rm(const DnVec& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw DimensionMismatch("unvec_rm: size mismatch");
  DnMat x(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) x(i, j) = v(i * cols + j);
  return x;
}

inline SpMat kron(const SpMat& a, const SpMat& b) {
  SpMat out = Eigen::kroneckerProduct(a, b).eval();
  out.makeCompressed();
  return out;
}

/// Matrix of rho -> -i[H, rho] + sum_m (L rho L^dag - 1/2 {L^dag L, rho})
/// acting on row-major vectorized operators of shape rows x cols. For the
/// off-diagonal symmetry blocks the left factors act on the row space and
/// the right factors on the column space, hence the two operator sets.
inline SpMat lindblad_superop_matrix(const SpMat& h_row, const SpMat& h_col,
                                     const std::vector<SpMat>& jumps_row,
                                     const std::vector<SpMat>& jumps_col) {
  if (jumps_row.size() != jumps_col.size())
    throw DimensionMismatch("lindblad_superop_matrix: jump counts differ");
  const Index r = h_row.rows();
  const Index c = h_col.rows();
  const SpMat id_r = identity_op(r);
  const SpMat id_c = identity_op(c);
  const Cplx im(0, 1);

  SpMat sup = kron(scale(-im, h_row), id_c) + kron(id_r, scale(im, SpMat(h_col.transpose())));
  for (std::size_t m = 0; m < jumps_row.size(); ++m) {
    const SpMat& lr = jumps_row[m];
    const SpMat& lc = jumps_col[m];
    const SpMat ldl_r = adjoint_of(lr) * lr;
    const SpMat ldl_c = adjoint_of(lc) * lc;
    sup += kron(lr, SpMat(lc.conjugate()));
    sup -= 0.5 * kron(ldl_r, id_c);
    sup -= 0.5 * kron(id_r, SpMat(ldl_c.transpose()));
  }
  canonicalize(sup);
  return sup;
}

inline SpMat lindblad_superop_matrix(const SpMat& h, const std::vector<SpMat>& jumps) {
  return lindblad_superop_matrix(h, h, jumps, jumps);
}

/// Adjoint action x -> S x S^dag as a matrix on row-major vecs.
inline SpMat adjoint_superop_matrix(const SpMat& s) {
  return kron(s, SpMat(s.conjugate()));
}

}  // namespace liouvsym
