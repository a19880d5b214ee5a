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
// Named self-checks on a single game: assumption reports, fixed-point and
// stationarity checks, gradient finite differences, the PL inequality, the
// NPG contraction bound, truncation bounds and Monte-Carlo agreement of the
// closed-form cost and covariance.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef LQDEEP_DIAGNOSTICS_H_
#define LQDEEP_DIAGNOSTICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lqdeep/config.h"

namespace lqdeep {

enum class CheckStatus { kPass, kWarn, kInapplicable, kFail };
std::string ToString(CheckStatus status);

struct DiagnosticResult {
  std::string name;
  CheckStatus status = CheckStatus::kPass;
  std::string detail;
};

struct DiagnosticOptions {
  int rollouts = 1000;
  int perturbations = 100;
  // Fault injection: scales the analytic gradient by 1.1 before comparing it
  // with finite differences.
  bool corrupt_gradient = false;
};

std::vector<DiagnosticResult> RunDiagnostics(const ExperimentConfig& config,
                                             const DiagnosticOptions& options);

// True iff no result has status kFail.
bool AllPassed(const std::vector<DiagnosticResult>& results);

// Perturbations theta* + scale * N(0, 1) entrywise, redrawn until stable.
std::vector<Policy> RandomStablePerturbations(const Policy& center,
                                              const LiftedModel& m, int count,
                                              double scale, std::uint64_t seed);

// Truncation bound eps(T) = d_x J^2 / ((1 - gamma) T mu sigma_min(Q_blk)^2)
// and its cost version eps(T) (||Q_blk|| + ||R_blk|| ||theta_blk||^2).
double TruncationEpsilon(const LiftedModel& m, double cost, int T);
double TruncationCostBound(const LiftedModel& m, const Policy& policy,
                           double cost, int T);

// 1 - eta mu sigma_min(R_blk) / ||Sigma*||.
double NpgContractionBound(const LiftedModel& m, const Policy& nash,
                           double eta);

}  // namespace lqdeep

#endif  // LQDEEP_DIAGNOSTICS_H_
