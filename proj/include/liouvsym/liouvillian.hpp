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

#include <ostream>
#include <random>

#include "liouvsym/symmetry.hpp"
#include "liouvsym/vectorize.hpp"

namespace liouvsym {

/// Matrix realization of the Lindblad generator on (a block of) operator
/// space, with the bookkeeping needed to map block coordinates back to full
/// operators. Full-space superoperators have one segment and no blocks;
/// quotient-block restrictions stack one segment per member pair.
struct Superoperator {
  static constexpr const char* kVectorization = "row-major";

  struct Segment {
    Index rows = 0;
    Index cols = 0;
    Index offset = 0;
    std::string label;
  };

  SpMat matrix;
  std::vector<Segment> segments;
  std::vector<OperatorBlock> blocks;  // empty for the full space
  Index full_dim = 0;                 // Hilbert-space dimension of the parent model

  Index dim() const { return matrix.rows(); }
  std::string label() const {
    if (segments.size() == 1) return segments[0].label;
    std::string s;
    for (const auto& seg : segments) s += (s.empty() ? "" : " + ") + seg.label;
    return s;
  }
};

/// Matrix-free Lindblad action with the adjoints and rate operators
/// precomputed; use this for anything applied repeatedly.
struct LiouvillianAction {
  SpMat h;
  std::vector<SpMat> jumps;
  std::vector<SpMat> jump_adj;
  std::vector<SpMat> rates;  // L^dag L

  explicit LiouvillianAction(const OpenModel& m) : h(m.hamiltonian), jumps(m.jumps) {
    jump_adj.reserve(jumps.size());
    rates.reserve(jumps.size());
    for (const auto& l : jumps) {
      jump_adj.push_back(adjoint_of(l));
      rates.push_back(mul(jump_adj.back(), l));
    }
  }

  DnMat apply(const DnMat& x) const {
    if (x.rows() != h.rows() || x.cols() != h.cols())
      throw DimensionMismatch("LiouvillianAction: shape mismatch");
    const Cplx im(0, 1);
    DnMat y = -im * (h * x - x * h);
    for (std::size_t m = 0; m < jumps.size(); ++m) {
      y += jumps[m] * (x * jump_adj[m]);
      y -= 0.5 * (rates[m] * x + x * rates[m]);
    }
    return y;
  }
};

inline DnMat apply_liouvillian(const OpenModel& model, const DnMat& x) {
  return LiouvillianAction(model).apply(x);
}

/// Full-space superoperator under the row-major vectorization.
inline Superoperator assemble_liouvillian(const OpenModel& model) {
  Superoperator sup;
  sup.matrix = lindblad_superop_matrix(model.hamiltonian, model.jumps);
  const Index d = model.dim();
  sup.segments.push_back({d, d, 0, "full"});
  sup.full_dim = d;
  return sup;
}

namespace detail {

inline SpMat compressed_op(const SpMat& x, const Sector& row, const Sector& col) {
  SpMat c = SpMat(row.isometry.adjoint()) * x * col.isometry;
  canonicalize(c);
  return c;
}

/// Residual of X against preservation of the sector: ||(1-VV^dag) X V||
/// relative to ||X V||.
inline double sector_leakage(const SpMat& x, const Sector& sec) {
  SpMat t = x * sec.isometry;
  SpMat inside = SpMat(sec.isometry * SpMat(SpMat(sec.isometry.adjoint()) * t));
  SpMat leak = t - inside;
  const double tn = t.norm();
  return tn > 0 ? leak.norm() / std::max(1.0, tn) : 0.0;
}

inline void append_block_triplets(std::vector<Triplet>& out, const SpMat& m, Index row_off,
                                  Index col_off) {
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out.emplace_back(it.row() + row_off, it.col() + col_off, it.value());
}

}  // namespace detail

/// Restriction of the Liouvillian to a single invariant block B_{alpha,beta}
/// of a strong symmetry. Every generator must preserve both sectors; the
/// leakage assertion catches misclassified symmetries.
inline Superoperator restrict_liouvillian(const OpenModel& model, const OperatorBlock& block,
                                          double leak_tol = 1e-10) {
  for (const Sector* sec : {&block.row, &block.col}) {
    double leak = detail::sector_leakage(model.hamiltonian, *sec);
    for (const auto& l : model.jumps) leak = std::max(leak, detail::sector_leakage(l, *sec));
    if (leak > leak_tol)
      throw LeakageDetected(
          "restrict_liouvillian: block " + block.label_string() + " is not invariant", leak);
  }
  const SpMat h_r = detail::compressed_op(model.hamiltonian, block.row, block.row);
  const SpMat h_c = detail::compressed_op(model.hamiltonian, block.col, block.col);
  std::vector<SpMat> l_r, l_c;
  l_r.reserve(model.jumps.size());
  l_c.reserve(model.jumps.size());
  for (const auto& l : model.jumps) {
    l_r.push_back(detail::compressed_op(l, block.row, block.row));
    l_c.push_back(detail::compressed_op(l, block.col, block.col));
  }
  Superoperator sup;
  sup.matrix = lindblad_superop_matrix(h_r, h_c, l_r, l_c);
  sup.segments.push_back({block.rows(), block.cols(), 0, block.label_string()});
  sup.blocks.push_back(block);
  sup.full_dim = model.dim();
  return sup;
}

/// Restriction to a quotient block of a weak symmetry. The member pairs are
/// coupled by the jump terms, so the matrix is assembled between all member
/// pairs from sector-compressed operators, then validated against the full
/// matrix-free action on a random element.
inline Superoperator restrict_liouvillian(const OpenModel& model, const QuotientBlock& qblock,
                                          double leak_tol = 1e-10) {
  const std::size_t nm = qblock.members.size();
  if (nm == 0) throw std::invalid_argument("restrict_liouvillian: empty quotient block");

  Superoperator sup;
  sup.full_dim = model.dim();
  Index offset = 0;
  for (const auto& b : qblock.members) {
    sup.segments.push_back({b.rows(), b.cols(), offset, b.label_string()});
    sup.blocks.push_back(b);
    offset += b.rows() * b.cols();
  }
  const Index total = offset;

  SpMat big_sum(model.dim(), model.dim());
  for (const auto& l : model.jumps) big_sum += SpMat(SpMat(l.adjoint()) * l);
  canonicalize(big_sum);

  const Cplx im(0, 1);
  std::vector<Triplet> trip;
  for (std::size_t src = 0; src < nm; ++src) {
    const OperatorBlock& sb = qblock.members[src];
    const SpMat id_r = identity_op(sb.rows());
    const SpMat id_c = identity_op(sb.cols());
    for (std::size_t dst = 0; dst < nm; ++dst) {
      const OperatorBlock& db = qblock.members[dst];
      SpMat contrib(db.rows() * db.cols(), sb.rows() * sb.cols());
      // Left-acting pieces connect (a,b) -> (a',b); right-acting ones
      // (a,b) -> (a,b').
      if (db.col_sector == sb.col_sector) {
        const SpMat h_da = detail::compressed_op(model.hamiltonian, db.row, sb.row);
        if (h_da.nonZeros() > 0) contrib += kron(scale(-im, h_da), id_c);
        const SpMat g_da = detail::compressed_op(big_sum, db.row, sb.row);
        if (g_da.nonZeros() > 0) contrib -= 0.5 * kron(g_da, id_c);
      }
      if (db.row_sector == sb.row_sector) {
        const SpMat h_bd = detail::compressed_op(model.hamiltonian, sb.col, db.col);
        if (h_bd.nonZeros() > 0) contrib += kron(id_r, scale(im, SpMat(h_bd.transpose())));
        const SpMat g_bd = detail::compressed_op(big_sum, sb.col, db.col);
        if (g_bd.nonZeros() > 0) contrib -= 0.5 * kron(id_r, SpMat(g_bd.transpose()));
      }
      for (const auto& l : model.jumps) {
        const SpMat l_da = detail::compressed_op(l, db.row, sb.row);
        if (l_da.nonZeros() == 0) continue;
        const SpMat l_db = detail::compressed_op(l, db.col, sb.col);
        if (l_db.nonZeros() == 0) continue;
        contrib += kron(l_da, SpMat(l_db.conjugate()));
      }
      canonicalize(contrib);
      detail::append_block_triplets(trip, contrib, sup.segments[dst].offset,
                                    sup.segments[src].offset);
    }
  }
  sup.matrix.resize(total, total);
  sup.matrix.setFromTriplets(trip.begin(), trip.end());
  canonicalize(sup.matrix);

  // Validation against the matrix-free action: if the quotient block were
  // not invariant (or a compressed term were missing) this residual blows up.
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DnVec coords(total);
  for (Index i = 0; i < total; ++i) coords(i) = Cplx(gauss(rng), gauss(rng));
  coords.normalize();
  DnMat x_full = DnMat::Zero(model.dim(), model.dim());
  for (std::size_t i = 0; i < nm; ++i) {
    const auto& seg = sup.segments[i];
    x_full += embed(qblock.members[i], unvec_rm(coords.segment(seg.offset, seg.rows * seg.cols),
                                                seg.rows, seg.cols));
  }
  const DnMat y_full = apply_liouvillian(model, x_full);
  DnVec expected(total);
  DnMat y_rebuilt = DnMat::Zero(model.dim(), model.dim());
  for (std::size_t i = 0; i < nm; ++i) {
    const auto& seg = sup.segments[i];
    const DnMat c = compress(qblock.members[i], y_full);
    expected.segment(seg.offset, seg.rows * seg.cols) = vec_rm(c);
    y_rebuilt += embed(qblock.members[i], c);
  }
  const double scale_norm = std::max(1.0, y_full.norm());
  const double leak = (y_full - y_rebuilt).norm() / scale_norm;
  const double assembly_err = (sup.matrix * coords - expected).norm() / scale_norm;
  if (leak > leak_tol || assembly_err > std::max(leak_tol, 1e-9))
    throw LeakageDetected("restrict_liouvillian: quotient block " +
                              std::to_string(qblock.members.size()) +
                              "-member restriction failed validation",
                          std::max(leak, assembly_err));
  return sup;
}

/// Embeds block coordinates back into a full-space operator.
inline DnMat embed_to_full(const Superoperator& sup, const DnVec& coords) {
  if (coords.size() != sup.dim()) throw DimensionMismatch("embed_to_full: size mismatch");
  if (sup.blocks.empty()) {
    const auto& seg = sup.segments.at(0);
    return unvec_rm(coords, seg.rows, seg.cols);
  }
  DnMat out = DnMat::Zero(sup.full_dim, sup.full_dim);
  for (std::size_t i = 0; i < sup.blocks.size(); ++i) {
    const auto& seg = sup.segments[i];
    out += embed(sup.blocks[i],
                 unvec_rm(coords.segment(seg.offset, seg.rows * seg.cols), seg.rows, seg.cols));
  }
  return out;
}

/// Projects a full-space operator onto the block coordinates.
inline DnVec compress_from_full(const Superoperator& sup, const DnMat& x) {
  if (sup.blocks.empty()) return vec_rm(x);
  DnVec coords(sup.dim());
  for (std::size_t i = 0; i < sup.blocks.size(); ++i) {
    const auto& seg = sup.segments[i];
    coords.segment(seg.offset, seg.rows * seg.cols) = vec_rm(compress(sup.blocks[i], x));
  }
  return coords;
}

inline DnVec apply(const Superoperator& sup, const DnVec& coords) {
  if (coords.size() != sup.dim()) throw DimensionMismatch("apply: coordinate size mismatch");
  return sup.matrix * coords;
}

/// Text dump of the sparse matrix, one `row, col, re, im` line per stored
/// entry, for external eigensolver cross-checks.
inline void write_superoperator_triplets(const Superoperator& sup, std::ostream& os) {
  os.precision(17);
  for (Index k = 0; k < sup.matrix.outerSize(); ++k)
    for (SpMat::InnerIterator it(sup.matrix, k); it; ++it)
      os << it.row() << ", " << it.col() << ", " << it.value().real() << ", "
         << it.value().imag() << "\n";
}

}  // namespace liouvsym
