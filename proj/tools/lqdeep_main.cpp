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
// lqdeep command-line front end.
//
//   lqdeep solve    --preset example1
//   lqdeep train-mb --preset example1 --method both --svg
//   lqdeep run      --preset example3 --task sweep-n
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.
//
///////////////////////////////////////////////////////////////////////////////

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "lqdeep/config.h"
#include "lqdeep/experiments.h"

namespace {

struct Overrides {
  std::optional<std::string> method;
  std::optional<std::string> eta;
  std::optional<int> iterations;
  std::optional<double> stop_tol;
  std::optional<int> T;
  std::optional<int> L;
  std::optional<double> r;
  std::optional<int> rollouts;
  std::optional<int> rollouts_per_perturbation;
  std::optional<int> learner;
  std::optional<std::string> n;
};

void Apply(const Overrides& o, lqdeep::ExperimentConfig& c) {
  auto& p = c.params;
  if (o.method) p.method = *o.method;
  if (o.eta) {
    if (*o.eta == "auto") {
      p.eta.reset();
    } else {
      try {
        p.eta = std::stod(*o.eta);
      } catch (const std::exception&) {
        throw lqdeep::ConfigError("--eta must be a number or auto");
      }
    }
  }
  if (o.iterations) p.iterations = *o.iterations;
  if (o.stop_tol) p.stop_tol = *o.stop_tol;
  if (o.T) p.T = *o.T;
  if (o.L) p.L = *o.L;
  if (o.r) p.r = *o.r;
  if (o.rollouts) p.rollouts = *o.rollouts;
  if (o.rollouts_per_perturbation) {
    p.rollouts_per_perturbation = *o.rollouts_per_perturbation;
  }
  if (o.learner) p.learner = *o.learner;
  if (o.n) {
    if (*o.n == "infinite") {
      c.game.n = lqdeep::PlayerCount::Infinite();
    } else {
      try {
        c.game.n = lqdeep::PlayerCount::Finite(std::stoll(*o.n));
      } catch (const std::logic_error&) {
        throw lqdeep::ConfigError("--n must be a positive integer or infinite");
      }
    }
  }
  // Re-run the parameter checks on the merged record.
  c = lqdeep::ParseConfig(lqdeep::ToJson(c));
  if (p.learner < 1 ||
      (!c.game.n.is_infinite() && p.learner > c.game.n.value())) {
    throw lqdeep::ConfigError("--learner must lie in 1..n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nash equilibria of linear-quadratic deep structured games"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, preset, task;
  std::optional<std::uint64_t> seed;
  lqdeep::RunOptions run;
  Overrides o;
  bool list_presets = false;

  auto* source = app.add_option_group("source");
  source->add_option("--config", config_path, "JSON experiment config");
  source->add_option("--preset", preset, "bundled preset: example1, example2, example3");
  app.add_option("--out", run.output_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_flag("--emit-json", run.emit_json, "print a JSON summary record");
  app.add_flag("--svg", run.svg, "also write SVG plots");
  app.add_flag("--list-presets", list_presets, "print preset names and exit");

  app.add_option("--method", o.method, "gd, npg, or both (train-mb)");
  app.add_option("--eta", o.eta, "step size, or auto");
  app.add_option("--iterations", o.iterations, "iteration budget K");
  app.add_option("--stop-tol", o.stop_tol, "stop when |J - J*| falls below this");
  app.add_option("--T", o.T, "rollout horizon");
  app.add_option("--L", o.L, "perturbations per gradient estimate");
  app.add_option("--r", o.r, "smoothing radius");
  app.add_option("--rollouts", o.rollouts, "rollouts for simulate");
  app.add_option("--rollouts-per-perturbation", o.rollouts_per_perturbation,
                 "rollouts averaged per perturbation");
  app.add_option("--learner", o.learner, "one-based learner index");
  app.add_option("--n", o.n, "override the player count (integer or infinite)");
  app.add_flag("--trace", run.trace, "simulate: dump rollout 0 to trace.csv");
  app.add_option("--policy", run.policy_source, "simulate: nash or init")
      ->capture_default_str();
  app.add_flag("--corrupt-gradient", run.corrupt_gradient,
               "check: perturb the analytic gradient (fault injection)");

  for (const auto& name : lqdeep::TaskNames()) {
    app.add_subcommand(name, "run the " + name + " task");
  }
  auto* run_cmd = app.add_subcommand("run", "run the task named by --task");
  run_cmd->add_option("--task", task, "solve | train-mb | train-mf | simulate | sweep-n | check")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (list_presets) {
      for (const auto& name : lqdeep::PresetNames()) std::cout << name << '\n';
      return lqdeep::kExitSuccess;
    }
    app.exit(e);
    return lqdeep::kExitConfigError;
  }

  try {
    if (list_presets) {
      for (const auto& name : lqdeep::PresetNames()) std::cout << name << '\n';
      return lqdeep::kExitSuccess;
    }
    run.task = app.get_subcommands().front()->get_name();
    if (run.task == "run") run.task = task;
    if (config_path.empty() == preset.empty()) {
      throw lqdeep::ConfigError("give exactly one of --config or --preset");
    }
    lqdeep::ExperimentConfig config = preset.empty()
                                          ? lqdeep::LoadConfigFile(config_path)
                                          : lqdeep::LoadPreset(preset);
    if (seed) config.seed = *seed;
    Apply(o, config);
    return lqdeep::RunExperiment(config, run, std::cout);
  } catch (const lqdeep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return lqdeep::kExitConfigError;
  } catch (const lqdeep::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return lqdeep::kExitNumericalFailure;
  }
}
