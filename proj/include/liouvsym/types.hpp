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

#include <atomic>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace liouvsym {

using Cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Cplx>;
using DnMat = Eigen::MatrixXcd;
using DnVec = Eigen::VectorXcd;
using Triplet = Eigen::Triplet<Cplx>;
using Index = Eigen::Index;

// Entries with magnitude below this are purged when an operator is
// canonicalized. Keeps Pauli-string products exact while bounding fill.
inline constexpr double kPruneEps = 1e-14;

// Shared zero-mode classification threshold, relative to a spectral norm
// estimate. Used by both the steady-state and spectra layers so that "zero
// eigenvalue" means the same thing everywhere.
inline constexpr double kZeroTol = 1e-10;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SectorMixing : std::runtime_error {
  std::vector<std::size_t> mixing_sectors;
  explicit SectorMixing(const std::string& what, std::vector<std::size_t> sectors = {})
      : std::runtime_error(what), mixing_sectors(std::move(sectors)) {}
};

struct LeakageDetected : std::runtime_error {
  double leakage = 0.0;
  explicit LeakageDetected(const std::string& what, double leak)
      : std::runtime_error(what), leakage(leak) {}
};

struct NoNonzeroModes : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Worker count for parallel sections. LIOUVSYM_THREADS caps it; otherwise
/// the hardware concurrency is used.
inline int worker_count() {
  if (const char* env = std::getenv("LIOUVSYM_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs fn(i) for i in [0, count) on a small thread pool. The work must be
/// independent per index; results written by index stay deterministic
/// regardless of scheduling.
template <typename Fn>
void parallel_for(std::int64_t count, Fn&& fn) {
  const int workers = std::min<std::int64_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<std::int64_t> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace liouvsym
