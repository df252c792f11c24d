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

// Subcommands of the command-line tool. Each writes its CSV files into the
// output directory and a short summary to out.

#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "lfmf/config.hpp"

namespace lfmf {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitSolvability = 3,
  kExitNumerical = 4,
};

// Runs one of check, solve, simulate, converge, probe. Errors are reported
// on err and mapped to exit codes; nothing is written for a failed command.
int run_command(const std::string& command, const RunConfig& cfg,
                const std::filesystem::path& out_dir, std::ostream& out,
                std::ostream& err);

}  // namespace lfmf
