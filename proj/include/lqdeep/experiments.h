// Copyright 2026 The lqdeep Authors.
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

///////////////////////////////////////////////////////////////////////////////
//
// Task dispatch for the command-line front end. Each task writes its CSVs,
// plot data and run_metadata.json into the output directory and prints a
// human-readable summary (or a JSON record with emit_json).
//
///////////////////////////////////////////////////////////////////////////////

#ifndef LQDEEP_EXPERIMENTS_H_
#define LQDEEP_EXPERIMENTS_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "lqdeep/config.h"

namespace lqdeep {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNumericalFailure = 2;

std::vector<std::string> TaskNames();

struct RunOptions {
  std::string task;
  std::string output_dir = "out";
  bool emit_json = false;
  bool svg = false;
  bool trace = false;             // simulate: dump rollout 0 in full
  // simulate: "nash" plays the equilibrium, "init" the configured policy.
  std::string policy_source = "nash";
  bool corrupt_gradient = false;  // check: fault-injection hook
};

// Returns the process exit code. ConfigError and NumericalError propagate to
// the caller, which maps them to codes 1 and 2.
int RunExperiment(const ExperimentConfig& config, const RunOptions& options,
                  std::ostream& out);

}  // namespace lqdeep

#endif  // LQDEEP_EXPERIMENTS_H_
