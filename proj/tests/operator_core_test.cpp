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

#include <catch2/catch_amalgamated.hpp>

#include "liouvsym/operator_core.hpp"
#include "test_support.hpp"

using namespace liouvsym;

TEST_CASE("basis state encoding: site 1 is the most significant bit", "[operator_core]") {
  const auto s = BasisState::from_bits("0110");
  CHECK(s.index == 6);
  CHECK(s.bit(1) == 0);
  CHECK(s.bit(2) == 1);
  CHECK(s.sigma_z(1) == 1.0);
  CHECK(s.sigma_z(2) == -1.0);
  CHECK(s.bits() == "0110");
  CHECK(s.magnetization() == 0);
  CHECK(BasisState::from_bits("1001").index == 9);
  CHECK(BasisState{4, 9}.bits() == "1001");
  CHECK(BasisState::from_bits("1000").magnetization() == 2);
}

TEST_CASE("single-site operators on one spin", "[operator_core]") {
  const SpMat z = site_operator(PauliKind::z, 1, 1);
  CHECK(DnMat(z)(0, 0) == Cplx(1, 0));
  CHECK(DnMat(z)(1, 1) == Cplx(-1, 0));

  const SpMat plus = site_operator(PauliKind::plus, 1, 1);
  CHECK(plus.nonZeros() == 1);
  CHECK(DnMat(plus)(0, 1) == Cplx(1, 0));  // maps |1> to |0>
}

TEST_CASE("sigma_z at site 2 of 2 has site-1-major ordering", "[operator_core]") {
  const DnMat z2 = DnMat(site_operator(PauliKind::z, 2, 2));
  const DnMat expected =
      oracle::dense_site_operator(PauliKind::z, 2, 2);  // diag(+1,-1,+1,-1)
  CHECK((z2 - expected).norm() == 0.0);
  CHECK(z2(0, 0) == Cplx(1, 0));
  CHECK(z2(1, 1) == Cplx(-1, 0));
  CHECK(z2(2, 2) == Cplx(1, 0));
  CHECK(z2(3, 3) == Cplx(-1, 0));
}

TEST_CASE("site operators agree with the dense Kronecker oracle up to n=6", "[operator_core]") {
  for (int n = 1; n <= 6; ++n)
    for (int site = 1; site <= n; ++site)
      for (auto kind : {PauliKind::x, PauliKind::y, PauliKind::z, PauliKind::plus,
                        PauliKind::minus}) {
        const DnMat got = DnMat(site_operator(kind, site, n));
        const DnMat want = oracle::dense_site_operator(kind, site, n);
        REQUIRE((got - want).norm() == 0.0);
      }
}

TEST_CASE("site_operator rejects out-of-range sites", "[operator_core]") {
  CHECK_THROWS_AS(site_operator(PauliKind::x, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(site_operator(PauliKind::x, 4, 3), std::invalid_argument);
}

TEST_CASE("pauli algebra identities", "[operator_core]") {
  const SpMat x = site_operator(PauliKind::x, 1, 1);
  const SpMat y = site_operator(PauliKind::y, 1, 1);
  const SpMat z = site_operator(PauliKind::z, 1, 1);

  CHECK(commutator(x, x).nonZeros() == 0);
  SpMat d = commutator(x, y) - scale(Cplx(0, 2), z);
  CHECK(d.norm() == 0.0);
  SpMat a = anticommutator(x, y);
  CHECK(a.nonZeros() == 0);
}

TEST_CASE("sparse product matches the dense multiplication oracle", "[operator_core]") {
  oracle::Rng rng(42);
  for (int rep = 0; rep < 5; ++rep) {
    const SpMat a = oracle::random_sparse(8, 0.4, rng);
    const SpMat b = oracle::random_sparse(8, 0.4, rng);
    const DnMat got = DnMat(mul(a, b));
    const DnMat want = DnMat(a) * DnMat(b);
    REQUIRE((got - want).norm() < 1e-12 * std::max(1.0, want.norm()));
  }
}

TEST_CASE("adjoint of a product reverses factors exactly", "[operator_core]") {
  oracle::Rng rng(7);
  const SpMat a = oracle::random_sparse(16, 0.3, rng);
  const SpMat b = oracle::random_sparse(16, 0.3, rng);
  SpMat lhs = adjoint_of(mul(a, b));
  SpMat rhs = mul(adjoint_of(b), adjoint_of(a));
  SpMat d = lhs - rhs;
  CHECK(d.norm() == 0.0);
}

TEST_CASE("adjoint is an involution", "[operator_core]") {
  oracle::Rng rng(8);
  const SpMat a = oracle::random_sparse(8, 0.5, rng);
  SpMat d = adjoint_of(adjoint_of(a)) - a;
  CHECK(d.norm() == 0.0);
}

TEST_CASE("hilbert-schmidt inner product", "[operator_core]") {
  const int n = 3;
  const SpMat id = identity_op(hilbert_dim(n));
  CHECK(hs_inner(id, id) == Cplx(8, 0));

  const SpMat x = site_operator(PauliKind::x, 1, 1);
  const SpMat y = site_operator(PauliKind::y, 1, 1);
  CHECK(std::abs(hs_inner(x, y)) == 0.0);

  oracle::Rng rng(3);
  const SpMat a = oracle::random_sparse(8, 0.4, rng);
  const SpMat b = oracle::random_sparse(8, 0.4, rng);
  const Cplx got = hs_inner(a, b);
  const Cplx want = (DnMat(a).adjoint() * DnMat(b)).trace();
  CHECK(std::abs(got - want) < 1e-12 * std::max(1.0, std::abs(want)));

  const Cplx self = hs_inner(a, a);
  CHECK(self.real() >= 0.0);
  CHECK(std::abs(self.imag()) < 1e-14 * self.real());
  CHECK(std::abs(self.real() - a.norm() * a.norm()) < 1e-10 * self.real());
}

TEST_CASE("operators on distinct sites commute", "[operator_core]") {
  const int n = 4;
  for (auto ka : {PauliKind::x, PauliKind::y, PauliKind::z, PauliKind::plus})
    for (auto kb : {PauliKind::x, PauliKind::y, PauliKind::minus}) {
      const SpMat a = site_operator(ka, 1, n);
      const SpMat b = site_operator(kb, 3, n);
      REQUIRE(commutator(a, b).nonZeros() == 0);
    }
}

TEST_CASE("expectation values", "[operator_core]") {
  const int n = 3;
  const Index dim = hilbert_dim(n);

  DensityMatrix mixed = density_from_dense(DnMat::Identity(dim, dim) / double(dim));
  CHECK(std::abs(expectation(identity_op(dim), mixed) - Cplx(1, 0)) < 1e-14);
  CHECK(std::abs(expectation(site_operator(PauliKind::z, 1, n), mixed)) < 1e-14);

  DnVec up = DnVec::Zero(dim);
  up(0) = 1;  // |000>
  DensityMatrix pure = pure_state(up);
  CHECK(std::abs(expectation(site_operator(PauliKind::z, 1, n), pure) - Cplx(1, 0)) < 1e-14);
}

TEST_CASE("dimension mismatches are rejected", "[operator_core]") {
  const SpMat a = identity_op(2);
  const SpMat b = identity_op(4);
  CHECK_THROWS_AS(add(a, b), DimensionMismatch);
  CHECK_THROWS_AS(mul(a, b), DimensionMismatch);
  CHECK_THROWS_AS(hs_inner(a, b), DimensionMismatch);
  CHECK_THROWS_AS(commutator(a, b), DimensionMismatch);
}

TEST_CASE("density matrix diagnostics", "[operator_core]") {
  oracle::Rng rng(11);
  DensityMatrix rho = density_from_dense(oracle::random_density(8, rng));
  CHECK(std::abs(rho.trace() - Cplx(1, 0)) < 1e-12);
  CHECK(rho.hermiticity_error() < 1e-14);
  CHECK(rho.min_eigenvalue() >= -1e-12);
}
