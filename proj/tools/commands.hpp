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

// Subcommands of the mitiq-forge driver. Each parses its config strictly,
// runs, and writes its reports under the output directory. Reports carry no
// timestamps or paths, so a rerun with the same config and seed reproduces
// them byte for byte.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace mf::cli {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config seed
  std::filesystem::path out;
};

// Names of the files written, relative to the output directory.
using Written = std::vector<std::string>;

Written cmd_ground_state(const LoadedConfig& c, const RunOptions& o);
Written cmd_optimize(const LoadedConfig& c, const RunOptions& o);
Written cmd_benchmark(const LoadedConfig& c, const RunOptions& o);
Written cmd_readout_study(const LoadedConfig& c, const RunOptions& o);

}  // namespace mf::cli
