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
// JSON experiment configuration. A config holds a "game" record whose keys are
// the GameSpec field names (matrices as row-major nested arrays, n as an
// integer or "infinite"), a "params" record with task parameters, and a seed.
// The bundled presets example1..example3 are compiled into the library.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef LQDEEP_CONFIG_H_
#define LQDEEP_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqdeep/policy_grad.h"

namespace lqdeep {

struct TaskParams {
  std::string method = "gd";  // gd | npg | both (train-mb only)
  std::optional<double> eta;  // unset = auto
  int iterations = 10000;
  double stop_tol = 1e-8;
  int T = 100;
  int L = 100;
  double r = 0.09;
  int rollouts_per_perturbation = 1;
  int rollouts = 10000;  // simulate
  int learner = 1;       // one-based player index
  bool random_learner = false;
  std::optional<Policy> init;  // defaults to the zero policy
  std::vector<PlayerCount> sweep_n;
};

struct ExperimentConfig {
  std::string name = "custom";
  GameSpec game;
  TaskParams params;
  std::uint64_t seed = 0;
};

// Throws ConfigError with the offending key on malformed input. Unknown keys
// are rejected so that typos do not silently fall back to defaults.
ExperimentConfig ParseConfig(const nlohmann::json& doc);
ExperimentConfig LoadConfigFile(const std::string& path);
ExperimentConfig LoadPreset(const std::string& name);
std::vector<std::string> PresetNames();

// Inverse of ParseConfig; used for run metadata.
nlohmann::json ToJson(const ExperimentConfig& config);

PlayerCount ParsePlayerCount(const nlohmann::json& value);
nlohmann::json ToJson(const PlayerCount& n);
nlohmann::json ToJson(const Matrix& m);

}  // namespace lqdeep

#endif  // LQDEEP_CONFIG_H_
