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

#include <iostream>

#include <CLI11.hpp>

#include "liouvsym/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

int do_run(const std::string& config_path, const std::string& out_dir, long long seed,
           bool seed_set, bool allow_large) {
  liouvsym::ExperimentConfig cfg;
  try {
    cfg = liouvsym::parse_config_file(config_path);
  } catch (const liouvsym::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  cfg.out_dir = out_dir;
  cfg.allow_large = allow_large;
  if (seed_set) cfg.seed = static_cast<std::uint64_t>(seed);
  try {
    return liouvsym::run_experiment(cfg);
  } catch (const liouvsym::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
}

int do_validate(const std::string& config_path) {
  try {
    liouvsym::parse_config_file(config_path);
  } catch (const liouvsym::ConfigError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitConfig;
  }
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetry-reduced Lindblad steady states and spectra for boundary-driven XXZ chains"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  long long seed = 0;
  bool allow_large = false;

  auto* run = app.add_subcommand("run", "run an experiment described by a config file");
  run->add_option("config", config_path, "config file (key = value lines)")->required();
  run->add_option("--out", out_dir, "output directory (created if missing)");
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_flag("--allow-large", allow_large, "lift the desk-scale n caps");

  auto* validate = app.add_subcommand("validate", "validate a config file and exit");
  validate->add_option("config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (run->parsed()) return do_run(config_path, out_dir, seed, seed_opt->count() > 0, allow_large);
  return do_validate(config_path);
}
