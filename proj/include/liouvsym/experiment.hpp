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

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "liouvsym/csv.hpp"
#include "liouvsym/spectra.hpp"
#include "liouvsym/steadystate.hpp"
#include "liouvsym/trajectories.hpp"

namespace liouvsym {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Batch experiment description, parsed from plain `key = value` lines.
/// Unknown keys are rejected; every domain is validated before any
/// computation starts.
struct ExperimentConfig {
  std::string experiment;
  int n = 4;
  double delta = 1.0;
  double gamma = 1.0;
  double mu = 0.2;
  DriveKind drive = DriveKind::strong;
  SectorSelect sector;  // empty -> full space

  double dt = 0.005;
  double t_burn = -1.0;
  double t_sample = 150.0;
  double sample_stride = 1.0;
  int n_traj = 2000;
  int trotter_order = 2;

  std::uint64_t seed = 1;
  double tol = kZeroTol;
  Index dense_cap = 2048;
  std::vector<int> n_list = {4, 6, 8};
  std::vector<double> mu_list = {0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.95, 1.0};
  std::vector<std::string> figures;
  bool dump_superoperator = false;

  bool allow_large = false;  // CLI flag
  std::string out_dir = ".";
};

namespace detail {

inline const std::set<std::string>& known_experiments() {
  static const std::set<std::string> k = {"ness-exact", "ness-trajectory", "spectrum",
                                          "wr-dist",    "scan-n",          "scan-mu",
                                          "symmetry-report"};
  return k;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: invalid number for '" + key + "': " + v);
  }
  if (pos != v.size()) throw ConfigError("config: trailing junk for '" + key + "': " + v);
  return out;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: invalid integer for '" + key + "': " + v);
  }
  if (pos != v.size()) throw ConfigError("config: trailing junk for '" + key + "': " + v);
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: invalid boolean for '" + key + "': " + v);
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::string& key, const std::string& v, Fn parse_one) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("config: empty list entry for '" + key + "'");
    out.push_back(parse_one(key, item));
  }
  if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
  return out;
}

inline SectorSelect parse_sector(const std::string& v) {
  if (v == "full") return {};
  const auto comma = v.find(',');
  if (comma == std::string::npos)
    throw ConfigError("config: sector must be 'full' or 's,m' like '+1,0'");
  SectorSelect sel;
  const std::string s_str = trim(v.substr(0, comma));
  const std::string m_str = trim(v.substr(comma + 1));
  if (s_str != "+1" && s_str != "1" && s_str != "-1")
    throw ConfigError("config: sector s must be +1 or -1");
  sel.s = (s_str == "-1") ? -1.0 : 1.0;
  sel.m = static_cast<int>(parse_int("sector m", m_str));
  return sel;
}

}  // namespace detail

/// Parses the plain-text config format. Lines are `key = value`; blank
/// lines and '#' comments are skipped; unknown keys are rejected.
inline ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  bool experiment_set = false;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string val = detail::trim(stripped.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    if (!seen.insert(key).second)
      throw ConfigError("config: duplicate key '" + key + "'");

    if (key == "experiment") {
      if (!detail::known_experiments().count(val))
        throw ConfigError("config: unknown experiment '" + val + "'");
      cfg.experiment = val;
      experiment_set = true;
    } else if (key == "n") {
      cfg.n = static_cast<int>(detail::parse_int(key, val));
    } else if (key == "delta") {
      cfg.delta = detail::parse_double(key, val);
    } else if (key == "gamma") {
      cfg.gamma = detail::parse_double(key, val);
    } else if (key == "mu") {
      cfg.mu = detail::parse_double(key, val);
    } else if (key == "drive") {
      if (val == "weak")
        cfg.drive = DriveKind::weak;
      else if (val == "strong")
        cfg.drive = DriveKind::strong;
      else
        throw ConfigError("config: drive must be weak or strong");
    } else if (key == "sector") {
      cfg.sector = detail::parse_sector(val);
    } else if (key == "dt") {
      cfg.dt = detail::parse_double(key, val);
    } else if (key == "t_burn") {
      cfg.t_burn = detail::parse_double(key, val);
    } else if (key == "t_sample") {
      cfg.t_sample = detail::parse_double(key, val);
    } else if (key == "sample_stride") {
      cfg.sample_stride = detail::parse_double(key, val);
    } else if (key == "n_traj") {
      cfg.n_traj = static_cast<int>(detail::parse_int(key, val));
    } else if (key == "trotter_order") {
      cfg.trotter_order = static_cast<int>(detail::parse_int(key, val));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(detail::parse_int(key, val));
    } else if (key == "tol") {
      cfg.tol = detail::parse_double(key, val);
    } else if (key == "dense_cap") {
      cfg.dense_cap = static_cast<Index>(detail::parse_int(key, val));
    } else if (key == "n_list") {
      cfg.n_list = detail::parse_list<int>(key, val, [](const std::string& k, const std::string& s) {
        return static_cast<int>(detail::parse_int(k, s));
      });
    } else if (key == "mu_list") {
      cfg.mu_list = detail::parse_list<double>(key, val, detail::parse_double);
    } else if (key == "figures") {
      cfg.figures = detail::parse_list<std::string>(
          key, val, [](const std::string&, const std::string& s) { return s; });
    } else if (key == "dump_superoperator") {
      cfg.dump_superoperator = detail::parse_bool(key, val);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  if (!experiment_set) throw ConfigError("config: missing required key 'experiment'");
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace detail {

inline void check_sector_parity(const ExperimentConfig& cfg, int n) {
  if (cfg.sector.m && ((n - *cfg.sector.m) % 2 != 0 || std::abs(*cfg.sector.m) > n))
    throw ConfigError("config: sector m is incompatible with chain length n");
  if (cfg.sector.s && cfg.sector.m && *cfg.sector.m != 0)
    throw ConfigError("config: joint (s, m) labels exist only at m = 0");
  if (cfg.sector.s && cfg.drive == DriveKind::weak)
    throw ConfigError("config: S-labeled sectors require the strong drive");
}

inline void check_desk_caps(const ExperimentConfig& cfg, int n, bool blockwise) {
  if (cfg.allow_large) return;
  if (!blockwise && n > 10)
    throw ConfigError("exact full-space pipeline refuses n > 10 without --allow-large");
  if (blockwise && n > 12)
    throw ConfigError("exact block pipeline refuses n > 12 without --allow-large");
}

/// Every emitted file carries the full resolved configuration.
inline std::vector<std::pair<std::string, std::string>> resolved_header(
    const ExperimentConfig& cfg, int n_current, double mu_current) {
  std::vector<std::pair<std::string, std::string>> h;
  h.emplace_back("experiment", cfg.experiment);
  h.emplace_back("n", fmt_int(n_current));
  h.emplace_back("delta", fmt_g17(cfg.delta));
  h.emplace_back("gamma", fmt_g17(cfg.gamma));
  h.emplace_back("mu", fmt_g17(mu_current));
  h.emplace_back("drive", to_string(cfg.drive));
  std::string sec = "full";
  if (cfg.sector.m || cfg.sector.s) {
    sec.clear();
    if (cfg.sector.s) sec += (*cfg.sector.s > 0 ? "+1" : "-1");
    if (cfg.sector.m) sec += (sec.empty() ? "" : ",") + fmt_int(*cfg.sector.m);
  }
  h.emplace_back("sector", sec);
  h.emplace_back("seed", fmt_int(static_cast<long long>(cfg.seed)));
  h.emplace_back("tol", fmt_g17(cfg.tol));
  if (cfg.experiment == "ness-trajectory") {
    h.emplace_back("dt", fmt_g17(cfg.dt));
    h.emplace_back("t_burn", fmt_g17(cfg.t_burn));
    h.emplace_back("t_sample", fmt_g17(cfg.t_sample));
    h.emplace_back("sample_stride", fmt_g17(cfg.sample_stride));
    h.emplace_back("n_traj", fmt_int(cfg.n_traj));
    h.emplace_back("trotter_order", fmt_int(cfg.trotter_order));
  }
  return h;
}

/// Finds the diagonal block matching the (s, m) selector in the joint
/// strong-drive decomposition.
inline OperatorBlock select_block(const SymmetryDecomposition& dec, const SectorSelect& sel) {
  for (std::size_t a = 0; a < dec.sectors.size(); ++a) {
    const Sector& sec = dec.sectors[a];
    bool ok = true;
    if (sel.m) {
      const auto m = sec.label("m");
      ok = ok && m && std::abs(*m - Cplx(*sel.m, 0)) < 1e-9;
    }
    if (sel.s) {
      const auto s = sec.label("s");
      ok = ok && s && std::abs(*s - Cplx(*sel.s, 0)) < 1e-9;
    } else {
      ok = ok && !sec.label("s");
    }
    if (ok) return {a, a, sec, sec};
  }
  throw ConfigError("config: no sector matches the requested (s, m) labels");
}

inline nlohmann::ordered_json header_json(
    const std::vector<std::pair<std::string, std::string>>& header) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : header) j[k] = v;
  return j;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw SolverError("cannot open " + path.string());
  out << j.dump(2) << "\n";
}

struct ExactNess {
  SteadyStateResult state;
  Index null_dim = 0;
  std::string label;
};

/// Exact NESS for the configured sector (block-restricted) or full space.
inline ExactNess exact_ness(const ExperimentConfig& cfg, const OpenModel& model, int n) {
  NessOptions opts;
  opts.tol_rel = cfg.tol;
  opts.dense_cap = std::min<Index>(cfg.dense_cap, 4096);
  opts.seed = cfg.seed;
  NessSolve solve;
  if (!cfg.sector.empty()) {
    auto dec = xxz_strong_sectors(n);
    auto block = select_block(dec, cfg.sector);
    check_desk_caps(cfg, n, true);
    solve = solve_ness_block(model, block, opts);
  } else {
    check_desk_caps(cfg, n, false);
    solve = solve_ness_full(model, opts);
  }
  if (solve.states.empty())
    throw SolverError("ness: no trace-bearing null vector in the requested block");
  ExactNess out;
  out.state = solve.states.front();
  out.null_dim = solve.null_dim;
  out.label = solve.block_label;
  return out;
}

inline Superoperator sector_superoperator(const ExperimentConfig& cfg, const OpenModel& model,
                                          int n) {
  if (!cfg.sector.empty()) {
    auto dec = xxz_strong_sectors(n);
    auto block = select_block(dec, cfg.sector);
    check_desk_caps(cfg, n, true);
    return restrict_liouvillian(model, block);
  }
  check_desk_caps(cfg, n, false);
  return assemble_liouvillian(model);
}

}  // namespace detail

/// Figure-data emission: fixed column sets keyed by the figure tag.
///   fig1: (n, minus_J, sector)      fig2: (site, M, n, sector)
///   fig3: (n, R, sector)            fig4: (r, W, sector)
struct FigureRow {
  double x = 0;
  double y = 0;
  int n = 0;
  std::string sector;
};

inline void emit_figure_data(const std::vector<FigureRow>& rows, const std::string& figure,
                             const std::filesystem::path& path,
                             const std::vector<std::pair<std::string, std::string>>& header) {
  std::vector<std::string> cols;
  if (figure == "fig1")
    cols = {"n", "minus_J", "sector"};
  else if (figure == "fig2")
    cols = {"site", "M", "n", "sector"};
  else if (figure == "fig3")
    cols = {"n", "R", "sector"};
  else if (figure == "fig4")
    cols = {"r", "W", "sector"};
  else
    throw ConfigError("emit_figure_data: unknown figure '" + figure + "'");
  CsvWriter csv(path, header, cols);
  for (const auto& r : rows) {
    if (figure == "fig2")
      csv.row({fmt_g17(r.x), fmt_g17(r.y), fmt_int(r.n), r.sector});
    else
      csv.row({fmt_g17(r.x), fmt_g17(r.y), r.sector});
  }
}

namespace detail {

inline std::string sector_name(const ExperimentConfig& cfg) {
  if (cfg.sector.empty()) return "full";
  std::string s;
  if (cfg.sector.s) s += (*cfg.sector.s > 0 ? "+1" : "-1");
  if (cfg.sector.m) s += (s.empty() ? "m=" : ",") + fmt_int(*cfg.sector.m);
  return s;
}

inline void validate_figures(const ExperimentConfig& cfg) {
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"ness-exact", {"fig2"}},      {"ness-trajectory", {"fig2"}}, {"scan-n", {"fig1", "fig3"}},
      {"wr-dist", {"fig4"}},         {"spectrum", {}},              {"scan-mu", {}},
      {"symmetry-report", {}},
  };
  const auto& ok = allowed.at(cfg.experiment);
  for (const auto& f : cfg.figures)
    if (!ok.count(f))
      throw ConfigError("config: figure '" + f + "' cannot be produced by experiment '" +
                        cfg.experiment + "'");
}

inline void run_ness_exact(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const auto model = make_open_model(cfg.n, cfg.delta, cfg.gamma, cfg.mu, cfg.drive);
  const auto header = resolved_header(cfg, cfg.n, cfg.mu);
  const auto ness = exact_ness(cfg, model, cfg.n);
  const DnMat rho = ness.state.rho.dense();
  const auto profile = transport_profile(rho, cfg.n);

  {
    CsvWriter csv(dir / "current.csv", header, {"bond", "J"});
    for (std::size_t b = 0; b < profile.currents.size(); ++b)
      csv.row({fmt_int(static_cast<long long>(b + 1)), fmt_g17(profile.currents[b])});
  }
  {
    CsvWriter csv(dir / "profile.csv", header, {"site", "M"});
    for (std::size_t i = 0; i < profile.magnetizations.size(); ++i)
      csv.row({fmt_int(static_cast<long long>(i + 1)), fmt_g17(profile.magnetizations[i])});
  }
  {
    CsvWriter csv(dir / "rho.csv", header, {"row", "col", "re", "im"});
    for (Index c = 0; c < ness.state.rho.rho.outerSize(); ++c)
      for (SpMat::InnerIterator it(ness.state.rho.rho, c); it; ++it)
        csv.row({fmt_int(it.row()), fmt_int(it.col()), fmt_g17(it.value().real()),
                 fmt_g17(it.value().imag())});
  }
  nlohmann::ordered_json j;
  j["config"] = header_json(header);
  j["sector"] = ness.label;
  j["residual"] = ness.state.residual;
  j["trace"] = ness.state.rho.trace().real();
  j["min_eig"] = ness.state.min_eig;
  j["null_dim"] = ness.null_dim;
  j["positive"] = ness.state.positive;
  if (profile.uniform_current) j["J"] = *profile.uniform_current;
  j["current_spread"] = profile.spread;
  write_json(dir / "summary.json", j);

  if (cfg.dump_superoperator) {
    std::ofstream out(dir / "superop.txt");
    write_superoperator_triplets(sector_superoperator(cfg, model, cfg.n), out);
  }
  for (const auto& fig : cfg.figures) {
    std::vector<FigureRow> rows;
    for (std::size_t i = 0; i < profile.magnetizations.size(); ++i)
      rows.push_back({static_cast<double>(i + 1), profile.magnetizations[i], cfg.n,
                      sector_name(cfg)});
    emit_figure_data(rows, fig, dir / (fig + ".csv"), header);
  }
}

inline void run_ness_trajectory(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                                int* nonconverged) {
  const auto model = make_open_model(cfg.n, cfg.delta, cfg.gamma, cfg.mu, cfg.drive);
  TrajectoryConfig tc;
  tc.dt = cfg.dt;
  tc.t_burn = cfg.t_burn;
  tc.t_sample = cfg.t_sample;
  tc.sample_stride = cfg.sample_stride;
  tc.n_traj = cfg.n_traj;
  tc.seed = cfg.seed;
  tc.trotter_order = cfg.trotter_order;
  tc.sector = cfg.sector;
  const auto est = estimate_ness_observables(model, tc);
  ExperimentConfig resolved = cfg;
  resolved.t_burn = TrajectoryEngine(model, tc).burn_time();
  const auto header = resolved_header(resolved, cfg.n, cfg.mu);

  {
    CsvWriter csv(dir / "current.csv", header, {"bond", "J", "stderr"});
    for (std::size_t b = 0; b < est.bond_current.size(); ++b)
      csv.row({fmt_int(static_cast<long long>(b + 1)), fmt_g17(est.bond_current[b]),
               fmt_g17(est.bond_current_se[b])});
  }
  {
    CsvWriter csv(dir / "profile.csv", header, {"site", "M", "stderr"});
    for (std::size_t i = 0; i < est.site_magnetization.size(); ++i)
      csv.row({fmt_int(static_cast<long long>(i + 1)), fmt_g17(est.site_magnetization[i]),
               fmt_g17(est.site_magnetization_se[i])});
  }
  {
    CsvWriter csv(dir / "timeseries.csv", header, {"time", "observable", "mean", "stderr"});
    for (std::size_t t = 0; t < est.times.size(); ++t) {
      for (Index b = 0; b < est.current_time_mean.cols(); ++b)
        csv.row({fmt_g17(est.times[t]), "J_" + fmt_int(b + 1),
                 fmt_g17(est.current_time_mean(static_cast<Index>(t), b)),
                 fmt_g17(est.current_time_se(static_cast<Index>(t), b))});
      for (Index i = 0; i < est.magnetization_time_mean.cols(); ++i)
        csv.row({fmt_g17(est.times[t]), "M_" + fmt_int(i + 1),
                 fmt_g17(est.magnetization_time_mean(static_cast<Index>(t), i)),
                 fmt_g17(est.magnetization_time_se(static_cast<Index>(t), i))});
    }
  }
  nlohmann::ordered_json j;
  j["config"] = header_json(header);
  j["J"] = est.pooled_current;
  j["J_stderr"] = est.pooled_current_se;
  j["bond_spread"] = est.spread;
  j["pooled_bond_stderr"] = est.pooled_bond_se;
  j["converged"] = est.converged;
  j["n_traj"] = est.n_traj;
  write_json(dir / "summary.json", j);
  if (!est.converged && nonconverged) ++*nonconverged;

  for (const auto& fig : cfg.figures) {
    std::vector<FigureRow> rows;
    for (std::size_t i = 0; i < est.site_magnetization.size(); ++i)
      rows.push_back({static_cast<double>(i + 1), est.site_magnetization[i], cfg.n,
                      sector_name(cfg)});
    emit_figure_data(rows, fig, dir / (fig + ".csv"), header);
  }
}

inline void run_spectrum(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                         bool with_wr) {
  const auto model = make_open_model(cfg.n, cfg.delta, cfg.gamma, cfg.mu, cfg.drive);
  const auto header = resolved_header(cfg, cfg.n, cfg.mu);
  const auto sup = sector_superoperator(cfg, model, cfg.n);
  SpectrumOptions sopts;
  sopts.dense_cap = cfg.dense_cap;
  sopts.zero_tol = cfg.tol;
  sopts.seed = cfg.seed;
  if (with_wr) sopts.allow_iterative = false;  // W(r) needs the complete spectrum
  const auto spec = full_spectrum(sup, sopts);

  {
    CsvWriter csv(dir / "spectrum.csv", header, {"re", "im", "block"});
    for (const Cplx& l : spec.eigenvalues)
      csv.row({fmt_g17(l.real()), fmt_g17(l.imag()), spec.block_label});
  }
  nlohmann::ordered_json j;
  j["config"] = header_json(header);
  j["block"] = spec.block_label;
  j["eigenvalue_count"] = spec.eigenvalues.size();
  j["zero_modes"] = spec.zero_modes;
  j["partial"] = spec.partial;
  try {
    j["gap"] = spectral_gap(spec, cfg.tol);
  } catch (const NoNonzeroModes&) {
    j["gap"] = nullptr;
  }
  write_json(dir / "summary.json", j);

  if (with_wr) {
    const auto wr = cumulative_distribution(spec, default_r_grid(spec));
    CsvWriter csv(dir / "wr.csv", header, {"r", "W"});
    for (const auto& [r, w] : wr) csv.row({fmt_g17(r), fmt_g17(w)});
    for (const auto& fig : cfg.figures) {
      std::vector<FigureRow> rows;
      for (const auto& [r, w] : wr) rows.push_back({r, w, cfg.n, sector_name(cfg)});
      emit_figure_data(rows, fig, dir / (fig + ".csv"), header);
    }
  }
  if (cfg.dump_superoperator) {
    std::ofstream out(dir / "superop.txt");
    write_superoperator_triplets(sup, out);
  }
}

inline void run_scan_n(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const auto header = resolved_header(cfg, cfg.n_list.front(), cfg.mu);
  CsvWriter csv(dir / "scan.csv", header, {"n", "J", "R", "sector"});
  std::vector<FigureRow> fig1_rows, fig3_rows;
  for (int n : cfg.n_list) {
    ExperimentConfig sub = cfg;
    sub.n = n;
    check_sector_parity(sub, n);
    const auto model = make_open_model(n, cfg.delta, cfg.gamma, cfg.mu, cfg.drive);
    const auto ness = exact_ness(sub, model, n);
    const auto profile = transport_profile(ness.state.rho.dense(), n);
    const double j_val = profile.uniform_current ? *profile.uniform_current
                                                 : profile.currents.front();
    std::string r_str = "nan";
    const auto sup = sector_superoperator(sub, model, n);
    if (sup.dim() <= cfg.dense_cap) {
      SpectrumOptions sopts;
      sopts.dense_cap = cfg.dense_cap;
      sopts.zero_tol = cfg.tol;
      try {
        const double gap = spectral_gap(full_spectrum(sup, sopts), cfg.tol);
        r_str = fmt_g17(gap);
        fig3_rows.push_back({static_cast<double>(n), gap, n, sector_name(cfg)});
      } catch (const NoNonzeroModes&) {
        // 1x1 blocks have no decay modes: omitted from fig3 by contract.
      }
    }
    csv.row({fmt_int(n), fmt_g17(j_val), r_str, sector_name(cfg)});
    fig1_rows.push_back({static_cast<double>(n), -j_val, n, sector_name(cfg)});
  }
  for (const auto& fig : cfg.figures) {
    if (fig == "fig1") emit_figure_data(fig1_rows, fig, dir / "fig1.csv", header);
    if (fig == "fig3") emit_figure_data(fig3_rows, fig, dir / "fig3.csv", header);
  }
}

inline void run_scan_mu(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const auto header = resolved_header(cfg, cfg.n, cfg.mu_list.front());
  CsvWriter csv(dir / "scan.csv", header, {"mu", "J", "sector"});
  for (double mu : cfg.mu_list) {
    if (mu < 0.0 || mu > 1.0) throw ConfigError("config: mu_list entries must lie in [0,1]");
    ExperimentConfig sub = cfg;
    sub.mu = mu;
    const auto model = make_open_model(cfg.n, cfg.delta, cfg.gamma, mu, cfg.drive);
    const auto ness = exact_ness(sub, model, cfg.n);
    const auto profile = transport_profile(ness.state.rho.dense(), cfg.n);
    const double j_val = profile.uniform_current ? *profile.uniform_current
                                                 : profile.currents.front();
    csv.row({fmt_g17(mu), fmt_g17(j_val), sector_name(cfg)});
  }
}

inline void run_symmetry_report(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const auto model = make_open_model(cfg.n, cfg.delta, cfg.gamma, cfg.mu, cfg.drive);
  const auto header = resolved_header(cfg, cfg.n, cfg.mu);
  const SpMat s = build_spin_flip_parity(cfg.n);
  const auto cls = classify_symmetry(model, s, std::max(cfg.tol, 1e-10));

  nlohmann::ordered_json j;
  j["config"] = header_json(header);
  j["classification"] = to_string(cls);

  CsvWriter blocks(dir / "blocks.csv", header, {"kind", "label", "dim"});
  const auto sdec = eigendecompose_symmetry(s, 1e-8, "s");
  for (const auto& sec : sdec.sectors)
    blocks.row({"hilbert_sector", sec.label_string(), fmt_int(sec.dim())});

  if (cls == SymmetryClass::weak) {
    const auto qblocks = quotient_blocks(sdec);
    nlohmann::ordered_json qj = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < qblocks.size(); ++i) {
      blocks.row({"quotient_block", "B" + fmt_int(static_cast<long long>(i + 1)),
                  fmt_int(qblocks[i].total_dim())});
      nlohmann::ordered_json e;
      e["label"] = "B" + fmt_int(static_cast<long long>(i + 1));
      e["eigenvalue_re"] = qblocks[i].eigenvalue.real();
      e["eigenvalue_im"] = qblocks[i].eigenvalue.imag();
      e["dim"] = qblocks[i].total_dim();
      qj.push_back(e);
    }
    j["quotient_blocks"] = qj;
  }

  if (cls == SymmetryClass::strong) {
    const auto joint = xxz_strong_sectors(cfg.n);
    NessOptions opts;
    opts.tol_rel = cfg.tol;
    opts.seed = cfg.seed;
    check_desk_caps(cfg, cfg.n, true);
    const auto rows = ness_multiplicity_report(model, joint, opts);
    CsvWriter mult(dir / "multiplicity.csv", header, {"sector", "null_dim", "block_dim"});
    Index total = 0;
    for (const auto& r : rows) {
      mult.row({r.label, fmt_int(r.null_dim), fmt_int(r.block_dim)});
      total += r.null_dim;
      blocks.row({"diagonal_block", r.label, fmt_int(r.block_dim)});
    }
    j["diagonal_blocks"] = rows.size();
    j["total_null_dim"] = total;
  }

  // Evans algebra closure is a 4^n-dimensional construction; keep it to
  // sizes where the span growth is quick.
  if (cfg.n <= 4) {
    std::vector<SpMat> gens = {model.hamiltonian};
    for (const auto& l : model.jumps) gens.push_back(l);
    const auto closure = evans_algebra_closure(gens, 4 * model.dim() * model.dim());
    j["evans_closure_dim"] = closure.dimension;
    j["evans_closure_converged"] = closure.converged;
    j["evans_unique_ness"] = (closure.dimension == model.dim() * model.dim());
  }
  write_json(dir / "report.json", j);
}

}  // namespace detail

/// Runs one experiment; returns 0 on success (non-convergence of trajectory
/// estimates is flagged in the output but still exits 0).
inline int run_experiment(const ExperimentConfig& cfg) {
  if (!detail::known_experiments().count(cfg.experiment))
    throw ConfigError("config: unknown experiment '" + cfg.experiment + "'");
  if (cfg.n < 2) throw ConfigError("config: n must be >= 2");
  if (!(cfg.gamma > 0)) throw ConfigError("config: gamma must be > 0");
  if (!(cfg.mu >= 0 && cfg.mu <= 1)) throw ConfigError("config: mu must lie in [0,1]");
  if (cfg.n > 20) throw ConfigError("config: n too large for this build");
  detail::check_sector_parity(cfg, cfg.n);
  detail::validate_figures(cfg);
  if (cfg.experiment == "ness-trajectory") {
    TrajectoryConfig tc;
    tc.dt = cfg.dt;
    tc.t_sample = cfg.t_sample;
    tc.sample_stride = cfg.sample_stride;
    tc.n_traj = cfg.n_traj;
    tc.trotter_order = cfg.trotter_order;
    tc.validate();
  }
  for (int n : cfg.n_list)
    if (n < 2 || n > 20) throw ConfigError("config: n_list entries out of range");

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);

  int nonconverged = 0;
  if (cfg.experiment == "ness-exact")
    detail::run_ness_exact(cfg, dir);
  else if (cfg.experiment == "ness-trajectory")
    detail::run_ness_trajectory(cfg, dir, &nonconverged);
  else if (cfg.experiment == "spectrum")
    detail::run_spectrum(cfg, dir, false);
  else if (cfg.experiment == "wr-dist")
    detail::run_spectrum(cfg, dir, true);
  else if (cfg.experiment == "scan-n")
    detail::run_scan_n(cfg, dir);
  else if (cfg.experiment == "scan-mu")
    detail::run_scan_mu(cfg, dir);
  else if (cfg.experiment == "symmetry-report")
    detail::run_symmetry_report(cfg, dir);
  return 0;
}

}  // namespace liouvsym
