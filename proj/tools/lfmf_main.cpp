// Copyright 2026 The lfmf Authors.
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

// lfmf: command-line front end.
//
//   lfmf check    --config example.json
//   lfmf converge --config example.json --out results --seed 7

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lfmf/commands.hpp"
#include "lfmf/config.hpp"
#include "lfmf/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Leader-follower mean-field LQ social optimum solver"};
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<long long> seed, steps, agents, runs;
  app.add_option("command", command, "check | solve | simulate | converge | probe")
      ->required()
      ->check(CLI::IsMember({"check", "solve", "simulate", "converge", "probe"}));
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "output directory (default: output_dir from the config, else ./out)");
  app.add_option("--seed", seed, "master seed, overrides the config")->check(CLI::NonNegativeNumber);
  app.add_option("--steps", steps, "time steps")->check(CLI::Range(2LL, 100000000LL));
  app.add_option("--n", agents, "number of followers")->check(CLI::PositiveNumber);
  app.add_option("--runs", runs, "Monte Carlo runs")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lfmf::kExitUsage;
  }

  lfmf::RunConfig cfg;
  try {
    cfg = lfmf::load_config(config_path);
  } catch (const lfmf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return lfmf::kExitConfig;
  }
  if (seed) cfg.simulate.seed = static_cast<unsigned long long>(*seed);
  if (steps) cfg.steps = static_cast<int>(*steps);
  if (agents) cfg.simulate.agents = static_cast<int>(*agents);
  if (runs) {
    cfg.simulate.runs = static_cast<int>(*runs);
    cfg.converge.runs_per_n = static_cast<int>(*runs);
    cfg.probe.runs = static_cast<int>(*runs);
  }
  return lfmf::run_command(command, cfg, out_dir.value_or(cfg.output_dir), std::cout,
                           std::cerr);
}
