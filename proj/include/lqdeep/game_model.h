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
// Raw description of a linear-quadratic game with homogeneous mean-field
// coupling, and its lifting to the 2*d_x dimensional "gauge" coordinates
//
//     x := (x^i - xbar, xbar),   u := (u^i - ubar, ubar)
//
// in which every player sees the block-diagonal dynamics
//
//     x_{t+1} = A_blk x_t + B_blk u_t + w_t
//
// and the per-step cost x' Q_blk x + u' R_blk u. All solvers in this library
// work on the lifted model.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef LQDEEP_GAME_MODEL_H_
#define LQDEEP_GAME_MODEL_H_

#include <string>
#include <utility>
#include <vector>

#include "lqdeep/types.h"

namespace lqdeep {

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-12;

struct GameSpec {
  int d_x = 1;
  int d_u = 1;
  PlayerCount n = PlayerCount::Finite(1);
  double gamma = 0.9;

  Matrix A, A_bar;           // d_x x d_x
  Matrix B, B_bar;           // d_x x d_u
  Matrix Q, S_x, Q_bar;      // d_x x d_x, symmetric
  Matrix R, S_u, R_bar;      // d_u x d_u, symmetric
  Vector init_mean;          // E[x_1^i], identical across players
  Matrix init_cov;           // cov(x_1^i), i.i.d. across players
  Matrix noise_cov;          // cov(w_t^i), i.i.d.

  // All-zero scalar-or-matrix game of the given dimensions.
  static GameSpec Zeros(int d_x, int d_u, PlayerCount n, double gamma);
};

struct AssumptionReport {
  std::string name;
  bool passed = true;
  std::string detail;
};

// Throws ConfigError on dimension mismatches, gamma outside (0,1), or
// non-symmetric cost matrices. Positive-definiteness failures come back as
// failed reports rather than errors: presets taken from the literature have a
// singular R_blk.
std::vector<AssumptionReport> Validate(const GameSpec& spec);

struct LiftedModel {
  GameSpec spec;
  Matrix A_blk;      // diag(A, A + A_bar)
  Matrix B_blk;      // diag(B, B + B_bar)
  Matrix Q_blk;      // [[Q, Q+S_x], [Q+S_x, Q+2S_x+Q_bar]]
  Matrix R_blk;      // [[R, R+S_u], [R+S_u, R+2S_u+R_bar]]
  Matrix P_n;        // [(1-1/n) I, (1/n) I], d_u x 2d_u
  Matrix P_tilde_n;  // diag((1-1/n) I, (1/n) I), 2d_u x 2d_u
  Matrix sigma_x;    // lifted second moment of the initial state
  Matrix sigma_w;    // lifted second moment of the noise

  int d_x() const { return spec.d_x; }
  int d_u() const { return spec.d_u; }
  const PlayerCount& n() const { return spec.n; }
};

// Validates (hard checks only) and assembles the lifted model.
LiftedModel Lift(const GameSpec& spec);

// Concatenation order is always (delta, mean).
struct LiftedVector {
  Vector delta;
  Vector mean;

  Vector Stacked() const;
  static LiftedVector FromStacked(const Vector& v);
};

// Columns of `states` / `actions` are the players. Returns the learner's
// (x^l - xbar, xbar) and (u^l - ubar, ubar).
std::pair<LiftedVector, LiftedVector> GaugeTransform(const Matrix& states,
                                                     const Matrix& actions,
                                                     int learner);

double PerStepCost(const LiftedVector& x, const LiftedVector& u,
                   const LiftedModel& model);

}  // namespace lqdeep

#endif  // LQDEEP_GAME_MODEL_H_
