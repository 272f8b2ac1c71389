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

#include "liouvsym/models.hpp"
#include "test_support.hpp"

using namespace liouvsym;

namespace {
std::vector<double> sorted_eigenvalues(const SpMat& h) {
  Eigen::SelfAdjointEigenSolver<DnMat> es(DnMat(h), Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end());
  return ev;
}
}  // namespace

TEST_CASE("xxz hamiltonian spectrum for two sites", "[models]") {
  auto ev = sorted_eigenvalues(build_xxz_hamiltonian(2, 1.0));
  REQUIRE(ev.size() == 4);
  CHECK(std::abs(ev[0] + 3.0) < 1e-12);
  CHECK(std::abs(ev[1] - 1.0) < 1e-12);
  CHECK(std::abs(ev[2] - 1.0) < 1e-12);
  CHECK(std::abs(ev[3] - 1.0) < 1e-12);

  ev = sorted_eigenvalues(build_xxz_hamiltonian(2, 0.0));
  CHECK(std::abs(ev[0] + 2.0) < 1e-12);
  CHECK(std::abs(ev[1]) < 1e-12);
  CHECK(std::abs(ev[2]) < 1e-12);
  CHECK(std::abs(ev[3] - 2.0) < 1e-12);
}

TEST_CASE("hamiltonian matches the dense oracle and is hermitian", "[models]") {
  for (int n : {2, 3, 4}) {
    for (double delta : {0.5, 2.0}) {
      const SpMat h = build_xxz_hamiltonian(n, delta);
      CHECK((DnMat(h) - oracle::dense_xxz_hamiltonian(n, delta)).norm() == 0.0);
      SpMat dev = h - SpMat(h.adjoint());
      CHECK(dev.norm() == 0.0);
    }
  }
  CHECK_THROWS_AS(build_xxz_hamiltonian(1, 1.0), std::invalid_argument);
}

TEST_CASE("hamiltonian conserves total magnetization up to n=8", "[models]") {
  for (int n = 2; n <= 8; ++n) {
    const SpMat m = build_magnetization(n);
    for (double delta : {0.5, 1.0, 2.0}) {
      const SpMat h = build_xxz_hamiltonian(n, delta);
      REQUIRE(commutator(h, m).nonZeros() == 0);
    }
  }
}

TEST_CASE("weak drive operators in the contracted index order", "[models]") {
  const int n = 2;
  const double gamma = 1.0, mu = 0.2;
  const auto jumps = build_weak_drive(n, gamma, mu);
  REQUIRE(jumps.size() == 4);
  const double lo = std::sqrt(gamma * (1 - mu));
  const double hi = std::sqrt(gamma * (1 + mu));
  CHECK((DnMat(jumps[0]) - lo * oracle::dense_site_operator(PauliKind::plus, 1, n)).norm() == 0.0);
  CHECK((DnMat(jumps[1]) - hi * oracle::dense_site_operator(PauliKind::minus, 1, n)).norm() == 0.0);
  CHECK((DnMat(jumps[2]) - hi * oracle::dense_site_operator(PauliKind::plus, n, n)).norm() == 0.0);
  CHECK((DnMat(jumps[3]) - lo * oracle::dense_site_operator(PauliKind::minus, n, n)).norm() == 0.0);
}

TEST_CASE("weak drive limiting cases", "[models]") {
  auto maximal = build_weak_drive(3, 2.0, 1.0);
  CHECK(maximal[0].nonZeros() == 0);  // sqrt(Gamma * 0)
  CHECK(maximal[3].nonZeros() == 0);

  auto unbiased = build_weak_drive(3, 2.0, 0.0);
  const double amp = std::sqrt(2.0);
  for (const auto& l : unbiased) {
    for (Index k = 0; k < l.outerSize(); ++k)
      for (SpMat::InnerIterator it(l, k); it; ++it)
        REQUIRE(std::abs(it.value() - Cplx(amp, 0)) < 1e-15);
  }
  CHECK_THROWS_AS(build_weak_drive(3, -1.0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(build_weak_drive(3, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("strong drive: literal amplitudes, magnetization conserved", "[models]") {
  const int n = 4;
  const double gamma = 1.3, mu = 0.4;
  const auto jumps = build_strong_drive(n, gamma, mu);
  REQUIRE(jumps.size() == 2);

  const DnMat want1 = gamma * (1 - mu) *
                      (oracle::dense_site_operator(PauliKind::plus, 1, n) *
                       oracle::dense_site_operator(PauliKind::minus, n, n));
  const DnMat want2 = gamma * (1 + mu) *
                      (oracle::dense_site_operator(PauliKind::minus, 1, n) *
                       oracle::dense_site_operator(PauliKind::plus, n, n));
  CHECK((DnMat(jumps[0]) - want1).norm() == 0.0);
  CHECK((DnMat(jumps[1]) - want2).norm() == 0.0);

  const SpMat m = build_magnetization(n);
  const SpMat s = build_spin_flip_parity(n);
  for (const auto& l : jumps) {
    CHECK(commutator(m, l).nonZeros() == 0);
    SpMat d = commutator(s, l);
    CHECK(d.norm() == 0.0);
  }
  CHECK(build_strong_drive(2, 1.0, 1.0)[0].nonZeros() == 0);  // mu = 1 kills L1
}

TEST_CASE("parity operator reverses the chain", "[models]") {
  const SpMat p = build_parity(4);
  const DnVec in = oracle::basis_ket("1000");
  const DnVec out = p * in;
  CHECK((out - oracle::basis_ket("0001")).norm() == 0.0);
  const DnVec pal = oracle::basis_ket("0110");
  CHECK((p * pal - pal).norm() == 0.0);

  const SpMat p5 = build_parity(5);
  SpMat dev = SpMat(p5 * p5) - identity_op(hilbert_dim(5));
  CHECK(dev.norm() == 0.0);
}

TEST_CASE("spin-flip parity S", "[models]") {
  const int n = 4;
  const SpMat s = build_spin_flip_parity(n);

  CHECK((s * oracle::basis_ket("0110") - oracle::basis_ket("1001")).norm() == 0.0);
  CHECK((s * oracle::basis_ket("1001") - oracle::basis_ket("0110")).norm() == 0.0);

  SpMat invol = SpMat(s * s) - identity_op(hilbert_dim(n));
  CHECK(invol.norm() == 0.0);
  SpMat unit = SpMat(SpMat(s.adjoint()) * s) - identity_op(hilbert_dim(n));
  CHECK(unit.norm() == 0.0);

  // S = P * prod_i sigma^x_i as operators.
  SpMat flip = identity_op(hilbert_dim(n));
  for (int i = 1; i <= n; ++i) flip = mul(flip, site_operator(PauliKind::x, i, n));
  SpMat built = mul(build_parity(n), flip);
  SpMat dev = built - s;
  CHECK(dev.norm() == 0.0);

  for (double delta : {0.5, 2.0}) {
    SpMat comm = commutator(build_xxz_hamiltonian(n, delta), s);
    CHECK(comm.norm() == 0.0);
  }
}

TEST_CASE("weak jumps transform into each other under S", "[models]") {
  for (int n : {2, 3, 4}) {
    const SpMat s = build_spin_flip_parity(n);
    const SpMat sdag = adjoint_of(s);
    const auto jumps = build_weak_drive(n, 1.7, 0.3);
    SpMat d1 = SpMat(SpMat(s * jumps[0]) * sdag) - jumps[3];
    SpMat d2 = SpMat(SpMat(s * jumps[1]) * sdag) - jumps[2];
    CHECK(d1.norm() == 0.0);
    CHECK(d2.norm() == 0.0);
  }
}

TEST_CASE("magnetization operator", "[models]") {
  const int n = 3;
  const SpMat m = build_magnetization(n);
  CHECK((DnMat(m) * oracle::basis_ket("000") - 3.0 * oracle::basis_ket("000")).norm() == 0.0);

  const SpMat m4 = build_magnetization(4);
  CHECK((DnMat(m4) * oracle::basis_ket("0101")).norm() == 0.0);

  std::vector<double> diag;
  for (Index i = 0; i < hilbert_dim(n); ++i) diag.push_back(DnMat(m)(i, i).real());
  std::sort(diag.begin(), diag.end());
  const std::vector<double> want = {-3, -1, -1, -1, 1, 1, 1, 3};
  for (std::size_t i = 0; i < want.size(); ++i) REQUIRE(diag[i] == want[i]);
}

TEST_CASE("current operator forms and properties", "[models]") {
  const int n = 4;
  for (int bond = 1; bond <= n - 1; ++bond) {
    const SpMat j = build_current(bond, n);
    SpMat herm = j - SpMat(j.adjoint());
    CHECK(herm.norm() == 0.0);
    CHECK(std::abs(trace_of(j)) == 0.0);

    // Ladder form: j_i = 2i (s+_i s-_{i+1} - s-_i s+_{i+1}). The reversed
    // ladder ordering differs by an overall sign.
    const SpMat alt = scale(Cplx(0, 2), site_operator(PauliKind::plus, bond, n) *
                                                site_operator(PauliKind::minus, bond + 1, n) -
                                            site_operator(PauliKind::minus, bond, n) *
                                                site_operator(PauliKind::plus, bond + 1, n));
    SpMat d = j - alt;
    CHECK(d.norm() == 0.0);
  }
  CHECK_THROWS_AS(build_current(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_current(4, 4), std::invalid_argument);

  // Diagonal states carry no current.
  oracle::Rng rng(5);
  DnMat rho = DnMat::Zero(16, 16);
  for (Index i = 0; i < 16; ++i) rho(i, i) = std::abs(rng.cplx());
  rho /= rho.trace();
  for (int bond = 1; bond <= 3; ++bond)
    CHECK(std::abs((DnMat(build_current(bond, n)) * rho).trace()) < 1e-14);
}

TEST_CASE("bulk continuity identity holds in divergence form", "[models]") {
  // i [H, sz_i / 2] = j_{i-1} - j_i exactly, interior sites.
  for (int n : {4, 5}) {
    for (double delta : {0.7, 2.0}) {
      const SpMat h = build_xxz_hamiltonian(n, delta);
      for (int i = 2; i <= n - 1; ++i) {
        const SpMat lhs = scale(Cplx(0, 0.5), commutator(h, site_operator(PauliKind::z, i, n)));
        const SpMat rhs = build_current(i - 1, n) - build_current(i, n);
        SpMat d = lhs - rhs;
        REQUIRE(d.norm() == 0.0);
      }
    }
  }
}

TEST_CASE("open model assembly", "[models]") {
  const auto weak = make_open_model(3, 1.5, 1.0, 0.2, DriveKind::weak);
  CHECK(weak.jumps.size() == 4);
  const auto strong = make_open_model(3, 1.5, 1.0, 0.2, DriveKind::strong);
  CHECK(strong.jumps.size() == 2);
  for (const auto& l : strong.jumps) CHECK(l.rows() == strong.dim());
}
