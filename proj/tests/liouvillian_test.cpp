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

#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "liouvsym/liouvillian.hpp"
#include "test_support.hpp"

using namespace liouvsym;

namespace {

OpenModel single_qubit_damping(double gamma) {
  OpenModel m;
  m.n = 1;
  m.delta = 0;
  m.gamma = gamma;
  m.mu = 0;
  m.drive = DriveKind::weak;
  m.hamiltonian = SpMat(2, 2);
  m.jumps = {scale(std::sqrt(gamma), site_operator(PauliKind::minus, 1, 1))};
  return m;
}

}  // namespace

TEST_CASE("row-major vectorization round trip and product identity", "[liouvillian]") {
  oracle::Rng rng(31);
  const DnMat x = oracle::random_matrix(5, rng).block(0, 0, 3, 5);
  CHECK((unvec_rm(vec_rm(x), 3, 5) - x).norm() == 0.0);

  // vec(A X B) = (A kron B^T) vec(X)
  const DnMat a = oracle::random_matrix(3, rng);
  const DnMat b = oracle::random_matrix(5, rng);
  const DnVec lhs = vec_rm(a * x * b);
  const SpMat ak = a.sparseView(1.0, 1e-300);
  const SpMat bk = DnMat(b.transpose()).sparseView(1.0, 1e-300);
  const DnVec rhs = DnMat(kron(ak, bk)) * vec_rm(x);
  CHECK((lhs - rhs).norm() < 1e-12 * std::max(1.0, lhs.norm()));
}

TEST_CASE("assembled superoperator matches the columnwise dense oracle", "[liouvillian]") {
  for (auto drive : {DriveKind::weak, DriveKind::strong}) {
    const auto model = make_open_model(2, 1.3, 0.8, 0.4, drive);
    const auto sup = assemble_liouvillian(model);
    std::vector<DnMat> jumps;
    for (const auto& l : model.jumps) jumps.emplace_back(l);
    const DnMat want = oracle::dense_superop_columnwise(DnMat(model.hamiltonian), jumps);
    CHECK((DnMat(sup.matrix) - want).norm() < 1e-12 * std::max(1.0, want.norm()));
  }
}

TEST_CASE("vectorized identity is a left null vector (trace preservation)", "[liouvillian]") {
  for (int n : {2, 3}) {
    const auto model = make_open_model(n, 2.0, 1.0, 0.2, DriveKind::weak);
    const auto sup = assemble_liouvillian(model);
    const DnVec id_vec = vec_rm(DnMat::Identity(model.dim(), model.dim()));
    CHECK((sup.matrix.adjoint() * id_vec).norm() < 1e-12 * sup.matrix.norm());
  }
}

TEST_CASE("trace preservation and hermiticity preservation of the action", "[liouvillian]") {
  oracle::Rng rng(23);
  for (auto drive : {DriveKind::weak, DriveKind::strong}) {
    const auto model = make_open_model(3, 1.5, 1.0, 0.3, drive);
    const LiouvillianAction act(model);
    for (int rep = 0; rep < 20; ++rep) {
      const DnMat x = oracle::random_matrix(model.dim(), rng);
      const DnMat y = act.apply(x);
      CHECK(std::abs(y.trace()) < 1e-12 * x.norm());
      const DnMat y_adj_arg = act.apply(x.adjoint());
      CHECK((y_adj_arg - y.adjoint()).norm() < 1e-12 * std::max(1.0, y.norm()));
    }
  }
}

TEST_CASE("single-qubit amplitude damping spectrum", "[liouvillian]") {
  const double gamma = 0.7;
  const auto sup = assemble_liouvillian(single_qubit_damping(gamma));
  Eigen::ComplexEigenSolver<DnMat> es(DnMat(sup.matrix), false);
  std::vector<double> re(4);
  for (Index i = 0; i < 4; ++i) {
    CHECK(std::abs(es.eigenvalues()(i).imag()) < 1e-12);
    re[static_cast<std::size_t>(i)] = es.eigenvalues()(i).real();
  }
  std::sort(re.begin(), re.end());
  CHECK(std::abs(re[0] + gamma) < 1e-12);
  CHECK(std::abs(re[1] + gamma / 2) < 1e-12);
  CHECK(std::abs(re[2] + gamma / 2) < 1e-12);
  CHECK(std::abs(re[3]) < 1e-12);
}

TEST_CASE("matrix-free action equals the assembled matrix", "[liouvillian]") {
  oracle::Rng rng(37);
  const auto model = make_open_model(3, 2.0, 1.0, 0.2, DriveKind::strong);
  const auto sup = assemble_liouvillian(model);
  const LiouvillianAction act(model);
  for (int rep = 0; rep < 20; ++rep) {
    const DnMat x = oracle::random_matrix(model.dim(), rng);
    const DnVec via_matrix = sup.matrix * vec_rm(x);
    const DnVec via_action = vec_rm(act.apply(x));
    REQUIRE((via_matrix - via_action).norm() < 1e-12 * std::max(1.0, via_action.norm()));
  }
}

TEST_CASE("strong-drive blocks are invariant and restrictions act consistently", "[liouvillian]") {
  oracle::Rng rng(41);
  const auto model = make_open_model(4, 2.0, 1.0, 0.2, DriveKind::strong);
  const auto joint = xxz_strong_sectors(4);
  const LiouvillianAction act(model);
  for (const auto& blk : operator_blocks(joint)) {
    const auto sup = restrict_liouvillian(model, blk);
    CHECK(sup.dim() == blk.rows() * blk.cols());

    DnMat x = oracle::random_matrix(std::max(blk.rows(), blk.cols()), rng)
                  .block(0, 0, blk.rows(), blk.cols());
    const DnMat y_full = act.apply(embed(blk, x));
    // Invariance: the full action stays inside the block.
    const DnMat y_back = embed(blk, compress(blk, y_full));
    REQUIRE((y_full - y_back).norm() < 1e-10 * std::max(1.0, y_full.norm()));
    // The compressed matrix reproduces the compressed action.
    const DnVec via_block = sup.matrix * vec_rm(x);
    REQUIRE((via_block - vec_rm(compress(blk, y_full))).norm() <
            1e-10 * std::max(1.0, y_full.norm()));
  }
}

TEST_CASE("the dark-state block restricts to the 1x1 zero matrix", "[liouvillian]") {
  for (double delta : {0.5, 2.0}) {
    for (double mu : {0.0, 0.9}) {
      const auto model = make_open_model(4, delta, 1.0, mu, DriveKind::strong);
      const auto joint = xxz_strong_sectors(4);
      for (std::size_t a = 0; a < joint.sectors.size(); ++a) {
        if (joint.sectors[a].label("s") != Cplx(-1, 0)) continue;
        OperatorBlock blk{a, a, joint.sectors[a], joint.sectors[a]};
        const auto sup = restrict_liouvillian(model, blk);
        REQUIRE(sup.dim() == 1);
        CHECK(sup.matrix.norm() < 1e-14);
      }
    }
  }
}

TEST_CASE("restricting a non-invariant block raises LeakageDetected", "[liouvillian]") {
  // The weak drive does not preserve the S sectors individually.
  const auto model = make_open_model(3, 1.5, 1.0, 0.2, DriveKind::weak);
  const auto sdec = eigendecompose_symmetry(build_spin_flip_parity(3), 1e-8, "s");
  const auto blocks = operator_blocks(sdec);
  CHECK_THROWS_AS(restrict_liouvillian(model, blocks.front()), LeakageDetected);
}

TEST_CASE("weak-drive quotient blocks: invariant, coupled inside B1", "[liouvillian]") {
  oracle::Rng rng(43);
  for (int n : {2, 3}) {
    const auto model = make_open_model(n, 1.5, 1.0, 0.2, DriveKind::weak);
    const auto sdec = eigendecompose_symmetry(build_spin_flip_parity(n), 1e-8, "s");
    const auto qbs = quotient_blocks(sdec);
    REQUIRE(qbs.size() == 2);
    const LiouvillianAction act(model);

    Index total = 0;
    for (const auto& qb : qbs) {
      const auto sup = restrict_liouvillian(model, qb);  // validates internally
      total += sup.dim();

      // Compressed action matches the full action on a random element.
      DnVec coords(sup.dim());
      for (Index i = 0; i < coords.size(); ++i) coords(i) = rng.cplx();
      const DnMat x_full = embed_to_full(sup, coords);
      const DnVec via_block = sup.matrix * coords;
      const DnVec via_full = compress_from_full(sup, act.apply(x_full));
      REQUIRE((via_block - via_full).norm() < 1e-10 * std::max(1.0, via_full.norm()));
    }
    CHECK(total == model.dim() * model.dim());
  }

  // Inside B1 the flow genuinely couples {+1,+1} to {-1,-1}: exhibit a
  // nonzero cross term for n=2.
  const auto model = make_open_model(2, 1.5, 1.0, 0.2, DriveKind::weak);
  const auto sdec = eigendecompose_symmetry(build_spin_flip_parity(2), 1e-8, "s");
  const auto qbs = quotient_blocks(sdec);
  const auto& b1 = qbs.front();
  REQUIRE(b1.members.size() == 2);
  const LiouvillianAction act(model);
  const auto& from = b1.members[0];  // (+1,+1)
  const auto& to = b1.members[1];    // (-1,-1)
  oracle::Rng rng2(44);
  const DnMat x = oracle::random_matrix(from.rows(), rng2);
  const DnMat cross = compress(to, act.apply(embed(from, x)));
  CHECK(cross.norm() > 1e-3);
}

TEST_CASE("superoperator triplet dump format", "[liouvillian]") {
  const auto sup = assemble_liouvillian(single_qubit_damping(1.0));
  std::ostringstream os;
  write_superoperator_triplets(sup, os);
  const std::string text = os.str();
  CHECK(text.find(',') != std::string::npos);
  // Every stored entry emits one line.
  std::size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == static_cast<std::size_t>(sup.matrix.nonZeros()));
}

TEST_CASE("apply and embed reject mismatched shapes", "[liouvillian]") {
  const auto model = make_open_model(2, 1.0, 1.0, 0.2, DriveKind::weak);
  const auto sup = assemble_liouvillian(model);
  const DnVec bad = DnVec::Zero(3);
  CHECK_THROWS_AS(liouvsym::apply(sup, bad), DimensionMismatch);
  CHECK_THROWS_AS(embed_to_full(sup, bad), DimensionMismatch);
  const LiouvillianAction act(model);
  CHECK_THROWS_AS(act.apply(DnMat::Zero(2, 2)), DimensionMismatch);
}
