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

#include <optional>
#include <random>

#include "liouvsym/observables.hpp"

namespace liouvsym {

/// Initial-sector selector: restricts the random initial state to the given
/// magnetization sector and/or spin-flip-parity sector. Empty means the
/// full space.
struct SectorSelect {
  std::optional<int> m;
  std::optional<double> s;

  bool empty() const { return !m && !s; }
};

struct TrajectoryConfig {
  double dt = 0.005;
  double t_burn = -1.0;  // negative: default to 20 / gamma
  double t_sample = 150.0;
  double sample_stride = 1.0;
  int n_traj = 2000;
  std::uint64_t seed = 1;
  int trotter_order = 2;  // 1 or 2 (Strang)
  SectorSelect sector;

  void validate() const {
    if (!(dt > 0)) throw std::invalid_argument("trajectory: dt must be > 0");
    if (!(t_sample > 0)) throw std::invalid_argument("trajectory: t_sample must be > 0");
    if (!(sample_stride > 0)) throw std::invalid_argument("trajectory: sample_stride must be > 0");
    if (n_traj < 1) throw std::invalid_argument("trajectory: n_traj must be >= 1");
    if (trotter_order != 1 && trotter_order != 2)
      throw std::invalid_argument("trajectory: trotter_order must be 1 or 2");
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Exact propagator of one XXZ bond term for a fixed time step.
struct BondCoeffs {
  Cplx phase_parallel;   // e^{-i delta dt} on |00>, |11>
  Cplx phase_anti;       // e^{+i delta dt} prefactor on the flip pair
  double c, s;           // cos(2 dt), sin(2 dt)
};

inline BondCoeffs bond_coeffs(double delta, double dt) {
  BondCoeffs bc;
  bc.phase_parallel = std::exp(Cplx(0, -delta * dt));
  bc.phase_anti = std::exp(Cplx(0, delta * dt));
  bc.c = std::cos(2.0 * dt);
  bc.s = std::sin(2.0 * dt);
  return bc;
}

/// Applies exp(-i h_bond dt) exactly on the (site, site+1) pair of the
/// state vector, site-1-most-significant ordering.
inline void apply_bond(DnVec& psi, int n, int site, const BondCoeffs& bc) {
  const std::uint64_t mi = std::uint64_t{1} << (n - site);
  const std::uint64_t mj = std::uint64_t{1} << (n - site - 1);
  const std::uint64_t both = mi | mj;
  const std::uint64_t dim = std::uint64_t{1} << n;
  const Cplx mis(0, -bc.s);
  for (std::uint64_t x = 0; x < dim; ++x) {
    const bool bi = (x & mi) != 0;
    const bool bj = (x & mj) != 0;
    if (bi == bj) {
      psi(static_cast<Index>(x)) *= bc.phase_parallel;
    } else if (!bi) {  // handle the (0,1)/(1,0) pair once
      const std::uint64_t y = x ^ both;
      const Cplx a = psi(static_cast<Index>(x));
      const Cplx b = psi(static_cast<Index>(y));
      psi(static_cast<Index>(x)) = bc.phase_anti * (bc.c * a + mis * b);
      psi(static_cast<Index>(y)) = bc.phase_anti * (mis * a + bc.c * b);
    }
  }
}

}  // namespace detail

/// One Trotter step of exp(-i H dt) for the XXZ chain by even/odd bond
/// splitting with exact bond propagators. Order 2 is the symmetric Strang
/// composition; a single-bond chain is exact for both orders.
inline void trotter_step(int n, double delta, DnVec& psi, double dt, int order = 2) {
  if (psi.size() != hilbert_dim(n)) throw DimensionMismatch("trotter_step: state size mismatch");
  if (order == 1) {
    const auto bc = detail::bond_coeffs(delta, dt);
    for (int i = 1; i <= n - 1; i += 2) detail::apply_bond(psi, n, i, bc);
    for (int i = 2; i <= n - 1; i += 2) detail::apply_bond(psi, n, i, bc);
  } else if (order == 2) {
    const auto half = detail::bond_coeffs(delta, dt / 2);
    const auto full = detail::bond_coeffs(delta, dt);
    for (int i = 1; i <= n - 1; i += 2) detail::apply_bond(psi, n, i, half);
    for (int i = 2; i <= n - 1; i += 2) detail::apply_bond(psi, n, i, full);
    for (int i = 1; i <= n - 1; i += 2) detail::apply_bond(psi, n, i, half);
  } else {
    throw std::invalid_argument("trotter_step: order must be 1 or 2");
  }
}

/// Sampled observables of a single trajectory on the fixed sampling grid.
struct TrajectorySeries {
  std::vector<double> times;
  Eigen::MatrixXd currents;        // sample x bond
  Eigen::MatrixXd magnetizations;  // sample x site
  long jump_count = 0;
};

/// Ensemble estimate of steady-state transport observables.
struct TrajectoryEstimate {
  std::vector<double> bond_current, bond_current_se;
  std::vector<double> site_magnetization, site_magnetization_se;
  double pooled_current = 0.0;     // per-trajectory chain-averaged current
  double pooled_current_se = 0.0;
  double spread = 0.0;             // max - min over the bond-current means
  double pooled_bond_se = 0.0;     // rms of the per-bond standard errors
  bool converged = false;          // spread <= 3 * pooled_bond_se
  int n_traj = 0;
  // Time-resolved ensemble means for the series dump.
  std::vector<double> times;
  Eigen::MatrixXd current_time_mean, current_time_se;
  Eigen::MatrixXd magnetization_time_mean, magnetization_time_se;
};

/// Piecewise-deterministic wave-function unraveling: non-Hermitian drift
/// H_eff = H - (i/2) sum_m L_m^dag L_m with norm-threshold jumps. The
/// coherent part is Trotterized; the damping part is applied exactly (the
/// rate operator of both drives is diagonal). Deterministic per seed.
class TrajectoryEngine {
 public:
  TrajectoryEngine(const OpenModel& model, const TrajectoryConfig& cfg)
      : model_(model), cfg_(cfg), dim_(model.dim()) {
    cfg_.validate();
    if (cfg_.t_burn < 0) cfg_.t_burn = 20.0 / model.gamma;
    steps_per_stride_ = std::max(1, static_cast<int>(std::llround(cfg_.sample_stride / cfg_.dt)));
    dt_ = cfg_.sample_stride / steps_per_stride_;

    SpMat k(dim_, dim_);
    for (const auto& l : model.jumps) k += SpMat(SpMat(l.adjoint()) * l);
    canonicalize(k);
    if (!detail::entries_are_diagonal(k))
      throw SolverError("TrajectoryEngine: non-diagonal rate operator is not supported");
    rate_diag_ = Eigen::VectorXd::Zero(dim_);
    for (Index c = 0; c < k.outerSize(); ++c)
      for (SpMat::InnerIterator it(k, c); it; ++it) rate_diag_(it.row()) = it.value().real();

    for (int i = 1; i <= model.n - 1; ++i) bond_currents_.push_back(build_current(i, model.n));
    if (cfg_.sector.s) flip_parity_ = build_spin_flip_parity(model.n);
  }

  double burn_time() const { return cfg_.t_burn; }

  TrajectorySeries run(std::uint64_t traj_seed) const {
    std::mt19937_64 rng(detail::splitmix64(traj_seed));
    DnVec psi = initial_state(rng);

    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double threshold = uni(rng);

    TrajectorySeries series;
    const int burn_strides =
        static_cast<int>(std::llround(std::ceil(cfg_.t_burn / cfg_.sample_stride)));
    const int sample_count = std::max(1, static_cast<int>(std::llround(cfg_.t_sample / cfg_.sample_stride)));
    const int bonds = model_.n - 1;
    series.currents.resize(sample_count, bonds);
    series.magnetizations.resize(sample_count, model_.n);
    series.times.reserve(static_cast<std::size_t>(sample_count));

    long jumps = 0;
    for (int stride = 0; stride < burn_strides + sample_count; ++stride) {
      for (int step = 0; step < steps_per_stride_; ++step) {
        advance(psi, dt_, 0);
        if (psi.squaredNorm() < threshold) {
          perform_jump(psi, rng);
          threshold = uni(rng);
          ++jumps;
        }
      }
      if (stride >= burn_strides) {
        const int k = stride - burn_strides;
        series.times.push_back((stride + 1) * cfg_.sample_stride);
        record(psi, k, series);
      }
    }
    series.jump_count = jumps;
    return series;
  }

 private:
  DnVec initial_state(std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    DnVec psi(dim_);
    for (Index i = 0; i < dim_; ++i) psi(i) = Cplx(gauss(rng), gauss(rng));
    if (cfg_.sector.m) {
      for (Index i = 0; i < dim_; ++i) {
        const int m = model_.n - 2 * __builtin_popcountll(static_cast<unsigned long long>(i));
        if (m != *cfg_.sector.m) psi(i) = 0;
      }
    }
    if (cfg_.sector.s) {
      DnVec spsi = flip_parity_ * psi;
      psi = 0.5 * (psi + (*cfg_.sector.s) * spsi);
    }
    const double nn = psi.norm();
    if (nn < 1e-12)
      throw std::invalid_argument("TrajectoryEngine: selected sector is empty");
    return psi / nn;
  }

  // One full step of the dissipative Trotter composition, with a guard that
  // sub-steps whenever the norm drops by more than 10% within one dt.
  void advance(DnVec& psi, double dt, int depth) const {
    const DnVec saved = psi;
    step_once(psi, dt);
    if (depth < 20 && psi.norm() < 0.9 * saved.norm()) {
      psi = saved;
      advance(psi, dt / 2, depth + 1);
      advance(psi, dt / 2, depth + 1);
    }
  }

  void step_once(DnVec& psi, double dt) const {
    if (cfg_.trotter_order == 2) {
      apply_decay(psi, dt / 4);
      trotter_step(model_.n, model_.delta, psi, dt, 2);
      apply_decay(psi, dt / 4);
    } else {
      apply_decay(psi, dt / 2);
      trotter_step(model_.n, model_.delta, psi, dt, 1);
    }
  }

  void apply_decay(DnVec& psi, double tau) const {
    if (model_.jumps.empty()) return;
    for (Index i = 0; i < dim_; ++i) psi(i) *= std::exp(-rate_diag_(i) * tau);
  }

  void perform_jump(DnVec& psi, std::mt19937_64& rng) const {
    std::vector<double> w(model_.jumps.size());
    std::vector<DnVec> jumped(model_.jumps.size());
    double total = 0.0;
    for (std::size_t m = 0; m < model_.jumps.size(); ++m) {
      jumped[m] = model_.jumps[m] * psi;
      w[m] = jumped[m].squaredNorm();
      total += w[m];
    }
    if (total <= 0.0)
      throw SolverError("TrajectoryEngine: norm decayed but all jump rates vanish");
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double pick = uni(rng) * total;
    double acc = 0.0;
    std::size_t chosen = model_.jumps.size() - 1;
    for (std::size_t m = 0; m < model_.jumps.size(); ++m) {
      acc += w[m];
      if (pick <= acc) {
        chosen = m;
        break;
      }
    }
    psi = jumped[chosen] / std::sqrt(w[chosen]);
  }

  void record(const DnVec& psi, int row, TrajectorySeries& series) const {
    const double nn = psi.squaredNorm();
    for (int b = 0; b < model_.n - 1; ++b) {
      const Cplx v = psi.dot(bond_currents_[static_cast<std::size_t>(b)] * psi);
      series.currents(row, b) = v.real() / nn;
    }
    for (int i = 1; i <= model_.n; ++i) {
      const std::uint64_t mask = std::uint64_t{1} << (model_.n - i);
      double m = 0.0;
      for (Index x = 0; x < dim_; ++x) {
        const double p = std::norm(psi(x));
        m += ((static_cast<std::uint64_t>(x) & mask) ? -1.0 : 1.0) * p;
      }
      series.magnetizations(row, i - 1) = m / nn;
    }
  }

  OpenModel model_;
  TrajectoryConfig cfg_;
  Index dim_;
  double dt_ = 0.0;
  int steps_per_stride_ = 1;
  Eigen::VectorXd rate_diag_;
  std::vector<SpMat> bond_currents_;
  SpMat flip_parity_;
};

/// Runs a single trajectory; fixed (model, config, seed) gives a bitwise
/// identical series.
inline TrajectorySeries run_trajectory(const OpenModel& model, const TrajectoryConfig& cfg,
                                       std::uint64_t seed) {
  TrajectoryConfig one = cfg;
  one.seed = seed;
  TrajectoryEngine engine(model, one);
  return engine.run(seed);
}

/// Trajectory-and-time averages of the transport observables with standard
/// errors from per-trajectory means. Trajectory k uses the scrambled seed
/// (config seed XOR k); merging is by trajectory index, so the result does
/// not depend on worker scheduling.
inline TrajectoryEstimate estimate_ness_observables(const OpenModel& model,
                                                    const TrajectoryConfig& cfg) {
  TrajectoryEngine engine(model, cfg);
  const int bonds = model.n - 1;
  const int sites = model.n;
  const int nt = cfg.n_traj;

  std::vector<TrajectorySeries> all(static_cast<std::size_t>(nt));
  parallel_for(nt, [&](std::int64_t k) {
    all[static_cast<std::size_t>(k)] =
        engine.run(cfg.seed ^ static_cast<std::uint64_t>(k));
  });

  const auto& first = all.front();
  const int samples = static_cast<int>(first.times.size());

  TrajectoryEstimate est;
  est.n_traj = nt;
  est.times = first.times;

  // Per-trajectory time averages.
  Eigen::MatrixXd traj_cur(nt, bonds), traj_mag(nt, sites);
  Eigen::VectorXd traj_chain(nt);
  for (int k = 0; k < nt; ++k) {
    traj_cur.row(k) = all[static_cast<std::size_t>(k)].currents.colwise().mean();
    traj_mag.row(k) = all[static_cast<std::size_t>(k)].magnetizations.colwise().mean();
    traj_chain(k) = traj_cur.row(k).mean();
  }

  auto mean_se = [nt](const Eigen::VectorXd& col) {
    const double mean = col.mean();
    double var = 0.0;
    for (int k = 0; k < col.size(); ++k) var += (col(k) - mean) * (col(k) - mean);
    var /= std::max(1, nt - 1);
    return std::pair<double, double>(mean, std::sqrt(var / nt));
  };

  for (int b = 0; b < bonds; ++b) {
    auto [m, se] = mean_se(traj_cur.col(b));
    est.bond_current.push_back(m);
    est.bond_current_se.push_back(se);
  }
  for (int i = 0; i < sites; ++i) {
    auto [m, se] = mean_se(traj_mag.col(i));
    est.site_magnetization.push_back(m);
    est.site_magnetization_se.push_back(se);
  }
  {
    auto [m, se] = mean_se(traj_chain);
    est.pooled_current = m;
    est.pooled_current_se = se;
  }
  const auto [lo, hi] = std::minmax_element(est.bond_current.begin(), est.bond_current.end());
  est.spread = *hi - *lo;
  double rms = 0.0;
  for (double se : est.bond_current_se) rms += se * se;
  est.pooled_bond_se = std::sqrt(rms / bonds);
  est.converged = est.spread <= 3.0 * est.pooled_bond_se;

  // Time-resolved ensemble statistics.
  est.current_time_mean.setZero(samples, bonds);
  est.current_time_se.setZero(samples, bonds);
  est.magnetization_time_mean.setZero(samples, sites);
  est.magnetization_time_se.setZero(samples, sites);
  Eigen::MatrixXd csum = Eigen::MatrixXd::Zero(samples, bonds);
  Eigen::MatrixXd csq = Eigen::MatrixXd::Zero(samples, bonds);
  Eigen::MatrixXd msum = Eigen::MatrixXd::Zero(samples, sites);
  Eigen::MatrixXd msq = Eigen::MatrixXd::Zero(samples, sites);
  for (int k = 0; k < nt; ++k) {
    csum += all[static_cast<std::size_t>(k)].currents;
    csq += all[static_cast<std::size_t>(k)].currents.cwiseAbs2();
    msum += all[static_cast<std::size_t>(k)].magnetizations;
    msq += all[static_cast<std::size_t>(k)].magnetizations.cwiseAbs2();
  }
  est.current_time_mean = csum / nt;
  est.magnetization_time_mean = msum / nt;
  if (nt > 1) {
    est.current_time_se =
        ((csq - csum.cwiseAbs2() / nt) / (nt - 1)).cwiseMax(0.0).cwiseSqrt() / std::sqrt(double(nt));
    est.magnetization_time_se =
        ((msq - msum.cwiseAbs2() / nt) / (nt - 1)).cwiseMax(0.0).cwiseSqrt() / std::sqrt(double(nt));
  }
  return est;
}

}  // namespace liouvsym
