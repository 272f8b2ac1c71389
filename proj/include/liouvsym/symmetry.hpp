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
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <utility>

#include "liouvsym/models.hpp"
#include "liouvsym/vectorize.hpp"

namespace liouvsym {

enum class SymmetryClass { strong, weak, none };

inline const char* to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::strong: return "strong";
    case SymmetryClass::weak: return "weak";
    default: return "none";
  }
}

/// One eigenspace of a symmetry (or of a refinement chain of symmetries).
/// `labels` records (symmetry name, eigenvalue) pairs in refinement order;
/// `isometry` has orthonormal columns spanning the eigenspace.
struct Sector {
  std::vector<std::pair<std::string, Cplx>> labels;
  SpMat isometry;

  Index dim() const { return isometry.cols(); }

  std::optional<Cplx> label(const std::string& name) const {
    for (const auto& [k, v] : labels)
      if (k == name) return v;
    return std::nullopt;
  }

  std::string label_string() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : labels) {
      if (!first) os << ",";
      first = false;
      os << k << "=";
      if (std::abs(v.imag()) < 1e-9 && std::abs(v.real() - std::round(v.real())) < 1e-9)
        os << static_cast<long long>(std::llround(v.real()));
      else
        os << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i";
    }
    return os.str();
  }
};

struct SymmetryDecomposition {
  Index dim = 0;
  std::vector<Sector> sectors;

  Index total_sector_dim() const {
    Index t = 0;
    for (const auto& s : sectors) t += s.dim();
    return t;
  }
};

/// Operator-space block B_{alpha,beta} = V_row X V_col^dag with the two
/// sector isometries copied in, so the block is self-contained.
struct OperatorBlock {
  std::size_t row_sector = 0;
  std::size_t col_sector = 0;
  Sector row;
  Sector col;

  Index rows() const { return row.dim(); }
  Index cols() const { return col.dim(); }
  bool diagonal() const { return row_sector == col_sector; }
  std::string label_string() const {
    return "(" + row.label_string() + ")x(" + col.label_string() + ")";
  }
};

/// Eigenspace of the adjoint map S . S^dag: the partial direct sum of all
/// B_{alpha,beta} with s_alpha * conj(s_beta) equal to `eigenvalue`.
struct QuotientBlock {
  Cplx eigenvalue;
  std::vector<OperatorBlock> members;

  Index total_dim() const {
    Index t = 0;
    for (const auto& b : members) t += b.rows() * b.cols();
    return t;
  }
};

inline DnMat compress(const OperatorBlock& blk, const DnMat& x_full) {
  return blk.row.isometry.adjoint() * x_full * blk.col.isometry;
}

inline DnMat embed(const OperatorBlock& blk, const DnMat& x_block) {
  return blk.row.isometry * x_block * blk.col.isometry.adjoint();
}

namespace detail {

inline double unitarity_error(const SpMat& s) {
  SpMat d = SpMat(s.adjoint()) * s - identity_op(s.rows());
  return d.norm();
}

/// True when every column of s holds exactly one entry, real and equal to
/// +-1, i.e. s is a signed permutation with real signs.
inline bool is_real_signed_permutation(const SpMat& s, std::vector<Index>& target,
                                       std::vector<double>& sign) {
  const Index n = s.cols();
  target.assign(n, -1);
  sign.assign(n, 0.0);
  for (Index col = 0; col < s.outerSize(); ++col) {
    int count = 0;
    for (SpMat::InnerIterator it(s, col); it; ++it) {
      ++count;
      if (count > 1) return false;
      const Cplx v = it.value();
      if (std::abs(v.imag()) > 0 || std::abs(std::abs(v.real()) - 1.0) > 1e-12) return false;
      target[col] = it.row();
      sign[col] = v.real();
    }
    if (count == 0) return false;
  }
  return true;
}

inline Sector make_sector(std::string name, Cplx eig, SpMat v) {
  Sector s;
  s.labels.emplace_back(std::move(name), eig);
  s.isometry = std::move(v);
  return s;
}

/// Exact eigenbasis of a real signed permutation involution from its orbit
/// structure: fixed points give eigenvectors e_b, two-cycles give
/// (e_b +- sgn e_{Sb})/sqrt(2).
inline SymmetryDecomposition involution_orbit_decomposition(const SpMat& s,
                                                            const std::vector<Index>& target,
                                                            const std::vector<double>& sign,
                                                            const std::string& name) {
  const Index dim = s.rows();
  std::vector<Triplet> plus_trip, minus_trip;
  Index plus_count = 0, minus_count = 0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index b = 0; b < dim; ++b) {
    const Index tb = target[b];
    if (tb == b) {
      if (sign[b] > 0) {
        plus_trip.emplace_back(b, plus_count++, Cplx(1, 0));
      } else {
        minus_trip.emplace_back(b, minus_count++, Cplx(1, 0));
      }
    } else if (b < tb) {
      plus_trip.emplace_back(b, plus_count, Cplx(inv_sqrt2, 0));
      plus_trip.emplace_back(tb, plus_count, Cplx(sign[b] * inv_sqrt2, 0));
      ++plus_count;
      minus_trip.emplace_back(b, minus_count, Cplx(inv_sqrt2, 0));
      minus_trip.emplace_back(tb, minus_count, Cplx(-sign[b] * inv_sqrt2, 0));
      ++minus_count;
    }
  }
  SymmetryDecomposition dec;
  dec.dim = dim;
  if (plus_count > 0) {
    SpMat v(dim, plus_count);
    v.setFromTriplets(plus_trip.begin(), plus_trip.end());
    v.makeCompressed();
    dec.sectors.push_back(make_sector(name, Cplx(1, 0), std::move(v)));
  }
  if (minus_count > 0) {
    SpMat v(dim, minus_count);
    v.setFromTriplets(minus_trip.begin(), minus_trip.end());
    v.makeCompressed();
    dec.sectors.push_back(make_sector(name, Cplx(-1, 0), std::move(v)));
  }
  return dec;
}

/// Orthonormal basis of the range of a (near-)projector via column-pivoted
/// QR; rank is fixed by the projector trace.
inline SpMat projector_range(const DnMat& p) {
  const Index rank = static_cast<Index>(std::llround(p.trace().real()));
  if (rank == 0) return SpMat(p.rows(), 0);
  Eigen::ColPivHouseholderQR<DnMat> qr(p);
  DnMat q = qr.householderQ() * DnMat::Identity(p.rows(), rank);
  return q.sparseView(1.0, kPruneEps);
}

inline bool entries_are_diagonal(const SpMat& a) {
  for (Index k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      if (it.row() != it.col()) return false;
  return true;
}

/// Clusters complex values with a hard gap tolerance; throws when chaining
/// makes the grouping ambiguous.
inline std::vector<std::vector<Index>> cluster_values(const std::vector<Cplx>& vals, double tol) {
  std::vector<Index> order(vals.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (vals[a].real() != vals[b].real()) return vals[a].real() < vals[b].real();
    return vals[a].imag() < vals[b].imag();
  });
  std::vector<std::vector<Index>> clusters;
  for (Index idx : order) {
    bool placed = false;
    for (auto& c : clusters) {
      if (std::abs(vals[c.front()] - vals[idx]) < tol) {
        c.push_back(idx);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({idx});
  }
  // Ambiguity guard: representatives of distinct clusters must stay
  // separated by more than the tolerance.
  for (std::size_t i = 0; i < clusters.size(); ++i)
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      double dmin = 1e300;
      for (Index a : clusters[i])
        for (Index b : clusters[j]) dmin = std::min(dmin, std::abs(vals[a] - vals[b]));
      if (dmin < tol)
        throw SolverError("eigenvalue clusters closer than tolerance: ambiguous grouping");
    }
  return clusters;
}

}  // namespace detail

/// Spectral decomposition of a symmetry operator into eigenspaces with
/// orthonormal isometries. Unitary involutions take the exact projector
/// route; diagonal operators are grouped exactly; other unitaries (and
/// Hermitian generators) go through a dense eigensolve with eigenvalue
/// clustering at `tol`.
inline SymmetryDecomposition decompose_operator(const SpMat& s, double tol = 1e-8,
                                                const std::string& name = "s") {
  const Index dim = s.rows();
  if (dim != s.cols()) throw DimensionMismatch("decompose_operator: square operator required");

  // Diagonal operator: sectors are exact index groups.
  if (detail::entries_are_diagonal(s)) {
    std::vector<Cplx> d(dim, Cplx(0, 0));
    for (Index k = 0; k < s.outerSize(); ++k)
      for (SpMat::InnerIterator it(s, k); it; ++it) d[it.row()] = it.value();
    auto clusters = detail::cluster_values(d, tol);
    std::sort(clusters.begin(), clusters.end(), [&](const auto& a, const auto& b) {
      const Cplx va = d[a.front()], vb = d[b.front()];
      if (va.real() != vb.real()) return va.real() < vb.real();
      return va.imag() < vb.imag();
    });
    SymmetryDecomposition dec;
    dec.dim = dim;
    for (const auto& c : clusters) {
      std::vector<Triplet> trip;
      trip.reserve(c.size());
      Index col = 0;
      std::vector<Index> sorted(c.begin(), c.end());
      std::sort(sorted.begin(), sorted.end());
      for (Index b : sorted) trip.emplace_back(b, col++, Cplx(1, 0));
      SpMat v(dim, static_cast<Index>(c.size()));
      v.setFromTriplets(trip.begin(), trip.end());
      v.makeCompressed();
      dec.sectors.push_back(detail::make_sector(name, d[c.front()], std::move(v)));
    }
    return dec;
  }

  const double uerr = detail::unitarity_error(s);
  const bool unitary = uerr < std::max(tol, 1e-10) * std::sqrt(static_cast<double>(dim));

  if (unitary) {
    // Involution: exact projectors (1 +- S)/2.
    SpMat s2 = s * s;
    SpMat dev = s2 - identity_op(dim);
    if (dev.norm() < std::max(tol, 1e-10) * std::sqrt(static_cast<double>(dim))) {
      std::vector<Index> target;
      std::vector<double> sign;
      if (detail::is_real_signed_permutation(s, target, sign))
        return detail::involution_orbit_decomposition(s, target, sign, name);
      const DnMat sd(s);
      const DnMat id = DnMat::Identity(dim, dim);
      SymmetryDecomposition dec;
      dec.dim = dim;
      for (double sv : {1.0, -1.0}) {
        SpMat v = detail::projector_range(0.5 * (id + sv * sd));
        if (v.cols() > 0) dec.sectors.push_back(detail::make_sector(name, Cplx(sv, 0), std::move(v)));
      }
      return dec;
    }
  }

  // Generic path: dense eigensolve, then cluster.
  const DnMat sd(s);
  const double herm_err = (sd - sd.adjoint()).norm();
  SymmetryDecomposition dec;
  dec.dim = dim;
  std::vector<Cplx> vals;
  DnMat vecs;
  if (herm_err < std::max(tol, 1e-10) * std::sqrt(static_cast<double>(dim))) {
    Eigen::SelfAdjointEigenSolver<DnMat> es(sd);
    vals.resize(dim);
    for (Index i = 0; i < dim; ++i) vals[i] = Cplx(es.eigenvalues()(i), 0);
    vecs = es.eigenvectors();
  } else if (unitary) {
    Eigen::ComplexEigenSolver<DnMat> es(sd, true);
    vals.assign(es.eigenvalues().data(), es.eigenvalues().data() + dim);
    vecs = es.eigenvectors();
  } else {
    throw std::invalid_argument("decompose_operator: operator is neither unitary nor Hermitian");
  }

  auto clusters = detail::cluster_values(vals, tol);
  std::sort(clusters.begin(), clusters.end(), [&](const auto& a, const auto& b) {
    const Cplx va = vals[a.front()], vb = vals[b.front()];
    const double pa = std::abs(std::arg(va)), pb = std::abs(std::arg(vb));
    if (pa != pb) return pa < pb;
    return std::arg(va) > std::arg(vb);
  });
  for (const auto& c : clusters) {
    DnMat cols(dim, static_cast<Index>(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k) cols.col(static_cast<Index>(k)) = vecs.col(c[k]);
    // Eigenvectors of one cluster need not be orthogonal for a general
    // unitary reported by the solver; orthonormalize.
    Eigen::HouseholderQR<DnMat> qr(cols);
    DnMat q = qr.householderQ() * DnMat::Identity(dim, static_cast<Index>(c.size()));
    Cplx mean = 0;
    for (Index b : c) mean += vals[b];
    mean /= static_cast<double>(c.size());
    dec.sectors.push_back(detail::make_sector(name, mean, q.sparseView(1.0, kPruneEps)));
  }
  return dec;
}

/// Eigendecomposition of a unitary symmetry; rejects non-unitary input.
inline SymmetryDecomposition eigendecompose_symmetry(const SpMat& s, double tol = 1e-8,
                                                     const std::string& name = "s") {
  const double uerr = detail::unitarity_error(s);
  if (uerr > std::max(tol, 1e-10) * std::sqrt(static_cast<double>(s.rows())))
    throw std::invalid_argument("eigendecompose_symmetry: operator is not unitary within tolerance");
  auto dec = decompose_operator(s, tol, name);
  // Reconstruction check: sum_a s_a V_a V_a^dag must reproduce S.
  SpMat rec(s.rows(), s.cols());
  for (const auto& sec : dec.sectors)
    rec += sec.labels.back().second * SpMat(sec.isometry * sec.isometry.adjoint());
  SpMat dev = rec - s;
  if (dev.norm() > 1e-8 * std::sqrt(static_cast<double>(s.rows())))
    throw SolverError("eigendecompose_symmetry: reconstruction residual too large");
  return dec;
}

/// Exact magnetization sectors grouped by down-spin count; labels are the
/// integer eigenvalues m in ascending order. This is the U(1) symmetry
/// e^{i phi M} represented by its generator: the M sectors are the joint
/// eigenspaces of the whole one-parameter family.
inline SymmetryDecomposition magnetization_sectors(int n) {
  const Index dim = hilbert_dim(n);
  std::map<int, std::vector<Index>> groups;
  for (Index b = 0; b < dim; ++b)
    groups[n - 2 * __builtin_popcountll(static_cast<unsigned long long>(b))].push_back(b);
  SymmetryDecomposition dec;
  dec.dim = dim;
  for (const auto& [m, idx] : groups) {
    std::vector<Triplet> trip;
    trip.reserve(idx.size());
    Index col = 0;
    for (Index b : idx) trip.emplace_back(b, col++, Cplx(1, 0));
    SpMat v(dim, static_cast<Index>(idx.size()));
    v.setFromTriplets(trip.begin(), trip.end());
    v.makeCompressed();
    dec.sectors.push_back(detail::make_sector("m", Cplx(m, 0), std::move(v)));
  }
  return dec;
}

enum class RefinePolicy { error_on_mixing, keep_mixing };

/// Refines each sector of `dec` by the additional operator s2. A sector is
/// refined only when s2 preserves it; otherwise SectorMixing is raised (or
/// the sector is kept whole under keep_mixing). The (S, M) pair genuinely
/// mixes: M maps the S-sectors onto each other away from m=0, so callers
/// restrict refinement to the sectors where it is valid.
inline SymmetryDecomposition refine_by(const SymmetryDecomposition& dec, const SpMat& s2,
                                       double tol = 1e-8,
                                       RefinePolicy policy = RefinePolicy::error_on_mixing,
                                       const std::string& name = "s") {
  if (s2.rows() != dec.dim) throw DimensionMismatch("refine_by: dimension mismatch");
  std::vector<std::size_t> mixing;
  SymmetryDecomposition out;
  out.dim = dec.dim;
  for (std::size_t a = 0; a < dec.sectors.size(); ++a) {
    const Sector& sec = dec.sectors[a];
    const SpMat& v = sec.isometry;
    SpMat t = s2 * v;
    SpMat inside = SpMat(v * SpMat(SpMat(v.adjoint()) * t));
    SpMat leak = t - inside;
    const double tn = t.norm();
    if (leak.norm() > tol * std::max(1.0, tn)) {
      mixing.push_back(a);
      out.sectors.push_back(sec);
      continue;
    }
    SpMat sub = SpMat(SpMat(v.adjoint()) * t);
    canonicalize(sub);
    auto subdec = decompose_operator(sub, tol, name);
    for (const auto& subsec : subdec.sectors) {
      Sector refined;
      refined.labels = sec.labels;
      refined.labels.emplace_back(subsec.labels.back());
      refined.isometry = SpMat(v * subsec.isometry);
      canonicalize(refined.isometry);
      out.sectors.push_back(std::move(refined));
    }
  }
  if (!mixing.empty() && policy == RefinePolicy::error_on_mixing) {
    std::ostringstream os;
    os << "refine_by: operator maps " << mixing.size()
       << " sector(s) off themselves (SectorMixing); first offender has label "
       << dec.sectors[mixing.front()].label_string();
    throw SectorMixing(os.str(), std::move(mixing));
  }
  return out;
}

/// Joint (m, s) sectors of the magnetization-constrained chain: exact M
/// sectors, with the m=0 sector refined by the spin-flip parity S. Away
/// from m=0, S maps m to -m, so those sectors keep the plain m label.
inline SymmetryDecomposition xxz_strong_sectors(int n, double tol = 1e-10) {
  auto dec = magnetization_sectors(n);
  return refine_by(dec, build_spin_flip_parity(n), tol, RefinePolicy::keep_mixing, "s");
}

inline std::vector<OperatorBlock> operator_blocks(const SymmetryDecomposition& dec) {
  std::vector<OperatorBlock> blocks;
  blocks.reserve(dec.sectors.size() * dec.sectors.size());
  for (std::size_t a = 0; a < dec.sectors.size(); ++a)
    for (std::size_t b = 0; b < dec.sectors.size(); ++b)
      blocks.push_back({a, b, dec.sectors[a], dec.sectors[b]});
  return blocks;
}

/// Groups the operator blocks by the adjoint-map eigenvalue
/// s'_nu = s_alpha * conj(s_beta). The trace-bearing group s' = 1 comes
/// first. The count n_S <= n_Shat <= n_S(n_S-1) + 1 is asserted (the +1
/// accounts for s'_1 = 1, which the off-diagonal count excludes).
inline std::vector<QuotientBlock> quotient_blocks(const SymmetryDecomposition& dec,
                                                  double tol = 1e-8) {
  for (const auto& s : dec.sectors)
    if (s.labels.size() != 1)
      throw std::invalid_argument("quotient_blocks: single-symmetry decomposition required");
  const std::size_t ns = dec.sectors.size();
  std::vector<Cplx> prods;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < ns; ++a)
    for (std::size_t b = 0; b < ns; ++b) {
      prods.push_back(dec.sectors[a].labels[0].second * std::conj(dec.sectors[b].labels[0].second));
      pairs.emplace_back(a, b);
    }
  auto clusters = detail::cluster_values(prods, tol);
  std::sort(clusters.begin(), clusters.end(), [&](const auto& x, const auto& y) {
    const double dx = std::abs(prods[x.front()] - Cplx(1, 0));
    const double dy = std::abs(prods[y.front()] - Cplx(1, 0));
    return dx < dy;
  });
  if (clusters.empty() || std::abs(prods[clusters.front().front()] - Cplx(1, 0)) > tol)
    throw SolverError("quotient_blocks: unit eigenvalue s'_1 = 1 not found");
  const std::size_t nhat = clusters.size();
  if (nhat < ns || nhat > ns * (ns - 1) + 1)
    throw SolverError("quotient_blocks: eigenvalue count violates the n_S bounds");
  std::vector<QuotientBlock> out;
  out.reserve(nhat);
  for (const auto& c : clusters) {
    QuotientBlock qb;
    Cplx mean = 0;
    for (Index i : c) mean += prods[static_cast<std::size_t>(i)];
    qb.eigenvalue = mean / static_cast<double>(c.size());
    for (Index i : c) {
      const auto [a, b] = pairs[static_cast<std::size_t>(i)];
      qb.members.push_back({a, b, dec.sectors[a], dec.sectors[b]});
    }
    out.push_back(std::move(qb));
  }
  return out;
}

/// Classifies a unitary S against a model: `strong` when S commutes with H
/// and every jump operator, `weak` when S commutes with H and the adjoint
/// action permutes the jump set (or, as a small-size fallback, when the
/// assembled superoperators commute), `none` otherwise.
inline SymmetryClass classify_symmetry(const OpenModel& model, const SpMat& s,
                                       double tol = 1e-10) {
  const Index dim = model.dim();
  if (s.rows() != dim) throw DimensionMismatch("classify_symmetry: dimension mismatch");
  if (detail::unitarity_error(s) > std::max(tol, 1e-10) * std::sqrt(static_cast<double>(dim)))
    throw std::invalid_argument("classify_symmetry: S is not unitary within tolerance");

  const double hscale = std::max(1.0, model.hamiltonian.norm());
  if (commutator(s, model.hamiltonian).norm() > tol * hscale) return SymmetryClass::none;

  bool strong = true;
  for (const auto& l : model.jumps) {
    if (commutator(s, l).norm() > tol * std::max(1.0, l.norm())) {
      strong = false;
      break;
    }
  }
  if (strong) return SymmetryClass::strong;

  // Sufficient weak condition: the adjoint action permutes the jump set.
  const std::size_t nj = model.jumps.size();
  std::vector<bool> used(nj, false);
  bool permutes = true;
  const SpMat sdag = adjoint_of(s);
  for (const auto& l : model.jumps) {
    SpMat sl = SpMat(s * l) * sdag;
    canonicalize(sl);
    bool found = false;
    for (std::size_t k = 0; k < nj; ++k) {
      if (used[k]) continue;
      SpMat d = sl - model.jumps[k];
      if (d.norm() <= tol * std::max(1.0, l.norm())) {
        used[k] = true;
        found = true;
        break;
      }
    }
    if (!found) {
      permutes = false;
      break;
    }
  }
  if (permutes) return SymmetryClass::weak;

  // Fallback for small sizes: commutation of the assembled superoperators.
  if (dim * dim <= 4096) {
    const SpMat lhat = lindblad_superop_matrix(model.hamiltonian, model.jumps);
    const SpMat shat = adjoint_superop_matrix(s);
    SpMat comm = lhat * shat - shat * lhat;
    if (comm.norm() <= tol * std::max(1.0, lhat.norm())) return SymmetryClass::weak;
  }
  return SymmetryClass::none;
}

struct ClosureResult {
  Index dimension = 0;
  bool converged = false;
};

/// Dimension of the associative algebra generated by the given operators
/// (augmented with their adjoints and the identity) under products and
/// linear span. Iterated span growth with Hilbert-Schmidt
/// orthonormalization; the Evans uniqueness condition holds iff the result
/// is N^2.
inline ClosureResult evans_algebra_closure(const std::vector<SpMat>& generators, Index dim_cap) {
  if (generators.empty()) throw std::invalid_argument("evans_algebra_closure: no generators");
  const Index n = generators.front().rows();
  for (const auto& g : generators)
    if (g.rows() != n || g.cols() != n)
      throw DimensionMismatch("evans_algebra_closure: generator dimensions differ");
  if (dim_cap < n * n) throw std::invalid_argument("evans_algebra_closure: dim_cap below N^2");

  constexpr double kPivotTol = 1e-10;  // rank decisions need a stated cutoff
  std::vector<DnMat> gens;
  gens.emplace_back(DnMat::Identity(n, n));
  for (const auto& g : generators) {
    gens.emplace_back(DnMat(g));
    gens.emplace_back(DnMat(g).adjoint());
  }

  const Index n2 = n * n;
  DnMat basis(n2, 0);  // orthonormal HS basis, one vectorized operator per column
  auto try_add = [&](const DnMat& op) -> bool {
    DnVec v = Eigen::Map<const DnVec>(op.data(), n2);
    const double pre = v.norm();
    if (pre < kPivotTol) return false;
    for (int pass = 0; pass < 2; ++pass)
      if (basis.cols() > 0) v -= basis * (basis.adjoint() * v).eval();
    if (v.norm() <= kPivotTol * pre) return false;
    v.normalize();
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v;
    return true;
  };

  std::vector<DnMat> frontier;
  for (const auto& g : gens)
    if (try_add(g)) frontier.push_back(g);

  Index iterations = 0;
  while (!frontier.empty() && basis.cols() < n2) {
    if (++iterations > dim_cap) return {basis.cols(), false};
    std::vector<DnMat> next;
    for (const auto& b : frontier) {
      for (const auto& g : gens) {
        DnMat p = g * b;
        if (try_add(p)) next.push_back(std::move(p));
        if (basis.cols() >= n2) break;
      }
      if (basis.cols() >= n2) break;
    }
    frontier = std::move(next);
  }
  return {basis.cols(), true};
}

}  // namespace liouvsym
