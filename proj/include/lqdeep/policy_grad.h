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
// Model-based policy optimization for the learner/imitator scheme: one player
// (the learner) differentiates its own cost with every other player frozen at
// the current shared policy; after each update the imitators copy it.
//
// The learner's gradient at the shared policy theta_blk is
//
//   [grad_theta J, grad_theta_bar J] = 2 P_n E_theta Sigma_theta,
//   E_theta = (R_blk + gamma B_blk' M B_blk) theta_blk - gamma B_blk' M A_blk,
//
// with Sigma_theta the (1 - gamma)-normalized discounted state covariance.
// This is the derivative of DeviationCost() in its first argument. It is not
// the derivative of PolicyCost(), the cost when every player moves together.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef LQDEEP_POLICY_GRAD_H_
#define LQDEEP_POLICY_GRAD_H_

#include <optional>
#include <string>
#include <vector>

#include "lqdeep/riccati_nash.h"

namespace lqdeep {

struct GradientPair {
  Matrix d_theta;
  Matrix d_theta_bar;

  Matrix Concatenated() const;
  static GradientPair FromConcatenated(const Matrix& pair);
  double FrobeniusNorm() const;
};

struct CovarianceMatrix {
  Matrix sigma;  // 2d_x x 2d_x
};

// Unique solution of
//   Sigma = (1 - gamma) sigma_x + gamma (A - B theta) Sigma (A - B theta)'
//           + gamma sigma_w.
CovarianceMatrix DiscountedCovariance(const Policy& policy,
                                      const LiftedModel& m, double gamma);

// Cost of any player when all players use `policy`.
double PolicyCost(const Policy& policy, const LiftedModel& m, double gamma);

// Full 2d_u x 2d_x lifted feedback gain seen by the learner when it plays
// `learner` and all n-1 others play `others`; u_blk = -gain * x_blk.
Matrix DeviationGain(const Policy& learner, const Policy& others,
                     const LiftedModel& m);

// Learner's cost under a unilateral deviation. Equals PolicyCost() when
// learner == others.
double DeviationCost(const Policy& learner, const Policy& others,
                     const LiftedModel& m, double gamma);

GradientPair ExactGradient(const Policy& policy, const LiftedModel& m,
                           double gamma);

// mu = sigma_min(sigma_x).
double InitialMomentFloor(const LiftedModel& m);

Policy GdStep(const Policy& policy, const GradientPair& grad, double eta);
// Right-preconditions the concatenated gradient by Sigma^{-1}. Throws
// NumericalError("singular covariance") when sigma_min(Sigma) < 1e-12.
Policy NpgStep(const Policy& policy, const GradientPair& grad,
               const CovarianceMatrix& sigma, double eta);

// 1 / (||P_n' P_n|| (||R_blk|| + gamma ||B_blk||^2 J1 / mu)), spectral norms.
double NpgStepSize(const LiftedModel& m, double gamma, double initial_cost,
                   double mu);

enum class Method { kGd, kNpg };
enum class TerminalStatus { kConverged, kMaxIter, kDestabilized, kStalled };

std::string ToString(Method method);
Method ParseMethod(const std::string& text);
std::string ToString(TerminalStatus status);

struct IterationRecord {
  int k = 0;
  Policy policy;
  double cost = 0.0;  // exact J(theta_k) when a model is available
  double grad_norm = 0.0;
  double rho = 0.0;   // spectral radius of A_blk - B_blk theta_k
  double step = 0.0;  // eta used to move from k to k+1 (0 on the last record)
  double wall_clock = 0.0;  // seconds since the start of the run
  // Model-free runs only.
  double empirical_cost = 0.0;
  int rejected = 0;
};

struct TrainLog {
  std::vector<IterationRecord> iterations;
  TerminalStatus terminal_status = TerminalStatus::kMaxIter;
  std::string message;
};

struct ModelBasedOptions {
  Method method = Method::kGd;
  // Unset selects the automatic rule: the constant NPG step size for kNpg,
  // and backtracking halving from 1 for kGd.
  std::optional<double> eta;
  int max_iterations = 10000;
  double stop_tol = 1e-8;
  // Cost of the Nash policy. When set, the run stops once
  // |J(theta_k) - J*| <= stop_tol; otherwise once the gradient norm is.
  std::optional<double> nash_cost;
};

// Throws NumericalError("initial policy unstable") when `init` violates
// rho(A_blk - B_blk theta) < 1. A destabilizing update ends the run with
// TerminalStatus::kDestabilized.
TrainLog TrainModelBased(const LiftedModel& m, double gamma,
                         const Policy& init, const ModelBasedOptions& options);

struct PlReport {
  bool applicable = true;
  std::string reason;
  double constant = 0.0;  // L1
  double gap = 0.0;       // J(theta) - J(theta*)
  double bound = 0.0;     // L1 * ||grad||_F^2
  bool holds = true;
};

PlReport PlCheck(const Policy& policy, const NashSolution& nash,
                 const LiftedModel& m, double gamma);

}  // namespace lqdeep

#endif  // LQDEEP_POLICY_GRAD_H_
