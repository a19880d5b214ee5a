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
// Explicit n-player simulator. Every player j acts as
//
//   u^j = -theta_j x^j - (theta_bar_j - theta_j) xbar,
//
// with (theta_j, theta_bar_j) the learner's policy for j == learner and the
// imitators' shared policy otherwise, and the raw dynamics
//
//   x^j_{t+1} = A x^j + B u^j + A_bar xbar + B_bar ubar + w^j.
//
// Traces record the learner's gauge-transformed trajectory and its truncated
// discounted cost (1 - gamma) sum_{t=1}^T gamma^{t-1} c_t.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef LQDEEP_SIM_ENGINE_H_
#define LQDEEP_SIM_ENGINE_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "lqdeep/policy_grad.h"

namespace lqdeep {

// Any state entry above this magnitude marks the trace as diverged.
inline constexpr double kStateGuard = 1e12;

struct RolloutConfig {
  int T = 100;
  int n_rollouts = 1;
  std::uint64_t seed = 0;
  int learner_index = 0;  // zero-based
  // Draw the learner uniformly per rollout instead of using learner_index.
  bool random_learner = false;
  // Keep the lifted trajectory and per-step costs. Bulk estimation turns this
  // off; the discounted cost and second moment are always accumulated.
  bool record_trajectory = true;
  // Also keep every player's raw state (d_x x n per step).
  bool record_all_players = false;
  // Infinity disables the divergence check.
  double state_guard = kStateGuard;
};

struct RolloutTrace {
  Matrix lifted_states;   // 2d_x x T, columns are (x^l - xbar, xbar)
  Matrix lifted_actions;  // 2d_u x T
  std::vector<double> per_step_costs;
  std::vector<Matrix> player_states;  // only with record_all_players
  double discounted_cost = 0.0;
  // (1 - gamma) sum_t gamma^{t-1} x_t x_t' over the lifted learner state.
  Matrix discounted_second_moment;
  int learner = 0;
  bool diverged = false;
};

// Returns the d_x x n matrix of primitives for one rollout: the initial
// states when t == 0, the noise w_t for t >= 1. Must be a pure function of
// its arguments for runs to be reproducible.
using PrimitiveSampler = std::function<Matrix(
    std::uint64_t seed, std::uint32_t rollout, std::uint32_t t, int n)>;

// I.i.d. Gaussian primitives with the game's mean and covariances, drawn from
// the counter-based stream keyed by (seed, rollout, t, player).
PrimitiveSampler GaussianSampler(const GameSpec& spec);

// Throws ConfigError for an infinite population, a learner index out of
// range, or policy dimensions that do not match the model.
std::vector<RolloutTrace> Rollout(const LiftedModel& m,
                                  const Policy& learner_policy,
                                  const Policy& others_policy,
                                  const RolloutConfig& cfg,
                                  const PrimitiveSampler& sampler = {});

struct ScalarEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  int samples = 0;   // traces used
  int diverged = 0;  // traces skipped
};

struct CovarianceEstimate {
  CovarianceMatrix mean;
  Matrix standard_error;  // entrywise
  int samples = 0;
  int diverged = 0;
};

// Sample means over the non-diverged traces. Throw ConfigError on empty input
// and NumericalError when every trace diverged.
ScalarEstimate EmpiricalCost(const std::vector<RolloutTrace>& traces);
CovarianceEstimate EmpiricalCovariance(const std::vector<RolloutTrace>& traces);

}  // namespace lqdeep

#endif  // LQDEEP_SIM_ENGINE_H_
