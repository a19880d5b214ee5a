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
// Model-free learner updates from simulated costs only. The learner perturbs
// its gain pair by a uniform draw U_l on the Frobenius sphere of radius r in
// the 2 d_x d_u dimensional pair space, the imitators keep the unperturbed
// policy, and
//
//   grad ~ (2 d_x d_u / (r^2 L)) sum_l Jtilde_T(theta + U_l) U_l
//
// estimates the gradient of the sphere-smoothed learner cost.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef LQDEEP_ZEROTH_ORDER_H_
#define LQDEEP_ZEROTH_ORDER_H_

#include <cstdint>
#include <vector>

#include "lqdeep/sim_engine.h"

namespace lqdeep {

struct SmoothingConfig {
  double r = 0.09;
  int L = 1500;
  int T = 10;
  int rollouts_per_perturbation = 1;
  int learner_index = 0;  // zero-based
  // Reject samples whose rollout leaves the state guard. When false the
  // guard is disabled and every sample is kept.
  bool guard = true;
};

struct PerturbationSample {
  Matrix theta_tilde;
  Matrix theta_bar_tilde;
  double cost_sample = 0.0;  // mean Jtilde_T over the perturbation's rollouts
  bool rejected = false;
};

// Gaussian vector of dimension 2 d_x d_u scaled to norm r, reshaped as
// (theta_tilde, theta_bar_tilde). `index` selects an independent draw.
PerturbationSample SampleSphere(double r, int d_u, int d_x, std::uint64_t seed,
                                std::uint32_t index);

struct GradientEstimate {
  GradientPair gradient;
  int accepted = 0;
  int rejected = 0;
  std::vector<PerturbationSample> samples;
};

// Throws ConfigError for r <= 0, L < 1 or an infinite population, and
// NumericalError when every perturbed rollout diverged.
GradientEstimate EmpiricalGradient(const Policy& policy, const LiftedModel& m,
                                   const SmoothingConfig& smoothing,
                                   std::uint64_t seed);

struct ModelFreeOptions {
  Method method = Method::kGd;
  double eta = 0.04;
  int iterations = 6000;
  SmoothingConfig smoothing;
  std::uint64_t seed = 0;
  // Unperturbed rollouts per iteration for the empirical cost and the NPG
  // preconditioner; 0 selects max(L / 10, 50).
  int baseline_rollouts = 0;
  bool random_learner = false;
  // Evaluate exact cost and stability against the model after each step.
  // Without it, destabilization is detected by the state guard alone.
  bool use_model_for_evaluation = true;
};

TrainLog TrainModelFree(const LiftedModel& m, const Policy& init,
                        const ModelFreeOptions& options);

}  // namespace lqdeep

#endif  // LQDEEP_ZEROTH_ORDER_H_
