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
// Model-based Nash equilibrium of the lifted game. The value matrix of a
// block-diagonal policy theta_blk = diag(theta, theta_bar) solves
//
//   M = Q_blk + theta_blk' R_blk theta_blk
//         + gamma (A_blk - B_blk theta_blk)' M (A_blk - B_blk theta_blk),
//
// and the equilibrium gains are the fixed point of M -> L(G(M)), where G maps
// a value matrix to the gains F_n^{-1} K_n, Fbar_n^{-1} Kbar_n.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef LQDEEP_RICCATI_NASH_H_
#define LQDEEP_RICCATI_NASH_H_

#include <optional>
#include <string>
#include <vector>

#include "lqdeep/game_model.h"

namespace lqdeep {

struct Policy {
  Matrix theta;      // d_u x d_x, acts on x^i - xbar
  Matrix theta_bar;  // d_u x d_x, acts on xbar

  static Policy Zero(int d_u, int d_x);
  // diag(theta, theta_bar), 2d_u x 2d_x.
  Matrix Block() const;
  // [theta, theta_bar], d_u x 2d_x.
  Matrix Concatenated() const;
  static Policy FromConcatenated(const Matrix& pair);
  double FrobeniusNorm() const;
};

// Closed-loop lifted matrix A_blk - B_blk diag(theta, theta_bar).
Matrix ClosedLoop(const Policy& policy, const LiftedModel& m);
// rho(A_blk - B_blk theta_blk) < 1.
bool IsStable(const Policy& policy, const LiftedModel& m);

struct ValueMatrix {
  Matrix M;  // 2d_x x 2d_x, symmetric

  // One-based block access, matching M^{1,1} ... M^{2,2}.
  Matrix BlockAt(int row, int col) const;
};

ValueMatrix ComputeValueMatrix(const Policy& policy, const LiftedModel& m,
                               double gamma, double tol = 1e-10);

struct RawGains {
  Matrix F, F_bar, K, K_bar;
};

RawGains AssembleGains(const ValueMatrix& value, const LiftedModel& m,
                       double gamma);

// G(M). Throws NumericalError("singular F ...") when F_n or Fbar_n has a
// condition number of 1e12 or more.
Policy GainMap(const ValueMatrix& value, const LiftedModel& m, double gamma);

struct NashOptions {
  double tol = 1e-10;
  int max_iter = 100000;
  // M <- (1 - relaxation) M + relaxation L(G(M)).
  double relaxation = 1.0;
  // Defaults to Q_blk.
  std::optional<Matrix> initial_value;
};

struct NashSolution {
  Policy policy;
  ValueMatrix value;
  RawGains gains_raw;
  int iterations = 0;
  double residual = 0.0;  // ||M - L(G(M))||_F at the returned M
  double cond_F = 0.0;
  double cond_F_bar = 0.0;
  // Largest observed ratio of successive fixed-point residuals over the tail
  // of the run; below one when the map behaves as a contraction.
  double contraction_estimate = 0.0;
  // Failed standing conditions on the gains (invertibility, weighted PD).
  std::vector<std::string> warnings;
};

NashSolution SolveNash(const LiftedModel& m, double gamma,
                       const NashOptions& options = {});

// Distance between the fixed points reached from M0 = Q_blk and M0 = 10 I.
// A value above the solver tolerance indicates multiple equilibria.
double FixedPointMultiplicityGap(const LiftedModel& m, double gamma,
                                 const NashOptions& options = {});

struct RiccatiSolution {
  Matrix P;
  Matrix gain;
  int iterations = 0;
};

// Standard discounted Riccati equation
//   P = Q + gamma A'PA - gamma^2 A'PB (R + gamma B'PB)^{-1} B'PA
// solved with the same policy/value fixed-point iteration as SolveNash.
RiccatiSolution SolveDiscountedRiccati(const Matrix& A, const Matrix& B,
                                       const Matrix& Q, const Matrix& R,
                                       double gamma, double tol = 1e-10,
                                       int max_iter = 100000);

// Limit gains for an infinite population with A_bar = B_bar = 0, from the
// two decoupled Riccati equations with data (A,B,Q,R) and (A,B,Q+S_x,R+S_u).
Policy DecoupledInfinite(const LiftedModel& m, double gamma);

// (1 - gamma) tr(M sigma_x) + gamma tr(M sigma_w).
double NashCost(const NashSolution& sol, const LiftedModel& m, double gamma);

}  // namespace lqdeep

#endif  // LQDEEP_RICCATI_NASH_H_
