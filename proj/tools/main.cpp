// Copyright 2026 The mitiq-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// mitiq-forge <ground-state|optimize|benchmark|readout-study>
//     --config <path> --out <dir> [--seed N] [--threads K]
// Exit codes: 0 success, 2 configuration error, 3 aborted run.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>

#include "commands.hpp"
#include "mitiq_forge/util.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;

using Command = mf::cli::Written (*)(const mf::cli::LoadedConfig&, const mf::cli::RunOptions&);

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, Command> commands{
      {"ground-state", mf::cli::cmd_ground_state},
      {"optimize", mf::cli::cmd_optimize},
      {"benchmark", mf::cli::cmd_benchmark},
      {"readout-study", mf::cli::cmd_readout_study},
  };

  CLI::App app{"VQE error-mitigation simulation workbench", "mitiq-forge"};
  app.set_version_flag("--version", std::string(mf::kVersion));
  std::string command, config, out;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("command", command, "ground-state, optimize, benchmark or readout-study")
      ->required()
      ->check(CLI::IsMember({"ground-state", "optimize", "benchmark", "readout-study"}));
  app.add_option("--config", config, "JSON config file")->required();
  app.add_option("--out", out, "output directory")->required();
  auto* seed_opt = app.add_option("--seed", seed, "seed; overrides the config");
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1, 1024));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  mf::set_thread_count(threads);
  mf::cli::RunOptions opts;
  opts.out = out;
  if (seed_opt->count() > 0) opts.seed = seed;

  try {
    const mf::cli::LoadedConfig loaded = mf::cli::load_config(config);
    for (const auto& name : commands.at(command)(loaded, opts)) std::cout << (opts.out / name).string() << '\n';
    return 0;
  } catch (const mf::ConfigError& e) {
    std::cerr << "mitiq-forge: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mf::Error& e) {
    std::cerr << "mitiq-forge: aborted: " << e.what() << '\n';
    return kExitAbort;
  } catch (const std::exception& e) {
    std::cerr << "mitiq-forge: aborted: " << e.what() << '\n';
    return kExitAbort;
  }
}
