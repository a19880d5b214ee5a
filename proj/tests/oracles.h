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
// Reference computations for the tests. None of these call the library's
// lifting, solvers or gradient code; they work either in raw per-player
// coordinates or from first-order conditions solved by vectorization.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef LQDEEP_TESTS_ORACLES_H_
#define LQDEEP_TESTS_ORACLES_H_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lqdeep/game_model.h"
#include "lqdeep/riccati_nash.h"

namespace lqdeep::oracle {

inline Matrix Scalar(double v) { return Matrix::Constant(1, 1, v); }

inline GameSpec ScalarGame(double a, double b, double q, double s_x,
                           double q_bar, double r, double s_u, double r_bar,
                           PlayerCount n, double gamma, double init_var,
                           double noise_var, double init_mean = 1.0) {
  GameSpec s = GameSpec::Zeros(1, 1, n, gamma);
  s.A = Scalar(a);
  s.B = Scalar(b);
  s.Q = Scalar(q);
  s.S_x = Scalar(s_x);
  s.Q_bar = Scalar(q_bar);
  s.R = Scalar(r);
  s.S_u = Scalar(s_u);
  s.R_bar = Scalar(r_bar);
  s.init_cov = Scalar(init_var);
  s.noise_cov = Scalar(noise_var);
  s.init_mean = Vector::Constant(1, init_mean);
  return s;
}

inline GameSpec Example1() {
  return ScalarGame(0.7, 0.4, 1, 4, 0, 1, 0, 0, PlayerCount::Finite(100), 0.9,
                    1.0, 0.4);
}
inline GameSpec Example2() {
  return ScalarGame(1.0, 0.5, 1, 2, 1, 1, 0, 0, PlayerCount::Finite(10), 0.9,
                    0.05, 0.01);
}
inline GameSpec Example3(PlayerCount n = PlayerCount::Finite(10)) {
  return ScalarGame(0.8, 0.2, 1, 2, 4, 1, 0, 0, n, 0.9, 1.0, 0.1);
}

// Per-step cost of player i in raw coordinates:
//   x'Qx + 2x'S_x xbar + xbar'Qbar xbar + u'Ru + 2u'S_u ubar + ubar'Rbar ubar.
inline double RawStepCost(const GameSpec& s, const Matrix& states,
                          const Matrix& actions, int i) {
  const Vector xb = states.rowwise().mean();
  const Vector ub = actions.rowwise().mean();
  const Vector x = states.col(i);
  const Vector u = actions.col(i);
  return x.dot(s.Q * x) + 2 * x.dot(s.S_x * xb) + xb.dot(s.Q_bar * xb) +
         u.dot(s.R * u) + 2 * u.dot(s.S_u * ub) + ub.dot(s.R_bar * ub);
}

// X = Q + gamma Phi' X Phi by plain fixed-point iteration.
inline Matrix Stein(const Matrix& phi, const Matrix& q, double gamma,
                    int max_iter = 200000, double tol = 1e-14) {
  Matrix x = q;
  for (int k = 0; k < max_iter; ++k) {
    Matrix next = q + gamma * phi.transpose() * x * phi;
    const double delta = (next - x).norm();
    x = next;
    if (delta <= tol * (1.0 + x.norm())) break;
  }
  return x;
}

// Learner's discounted cost (1 - gamma) sum gamma^{t-1} E[c_t] in the explicit
// n-player system with the learner (player 0) on `learner` and everyone else
// on `others`. The stacked state is z = (x^1, ..., x^n).
inline double ExplicitDeviationCost(const GameSpec& s, const Policy& learner,
                                    const Policy& others) {
  const int n = static_cast<int>(s.n.value());
  const int dx = s.d_x, du = s.d_u;
  const int nz = n * dx, nu = n * du;
  const double g = s.gamma;

  // Mean operators.
  Matrix avg_x = Matrix::Zero(dx, nz), avg_u = Matrix::Zero(du, nu);
  for (int j = 0; j < n; ++j) {
    avg_x.block(0, j * dx, dx, dx) = Matrix::Identity(dx, dx) / n;
    avg_u.block(0, j * du, du, du) = Matrix::Identity(du, du) / n;
  }
  // u = -K z with u^j = -theta_j x^j - (theta_bar_j - theta_j) xbar.
  Matrix K = Matrix::Zero(nu, nz);
  for (int j = 0; j < n; ++j) {
    const Policy& p = j == 0 ? learner : others;
    K.block(j * du, j * dx, du, dx) += p.theta;
    K.block(j * du, 0, du, nz) += (p.theta_bar - p.theta) * avg_x;
  }
  Matrix Abig = Matrix::Zero(nz, nz), Bbig = Matrix::Zero(nz, nu);
  for (int j = 0; j < n; ++j) {
    Abig.block(j * dx, j * dx, dx, dx) = s.A;
    Bbig.block(j * dx, j * du, dx, du) = s.B;
    Abig.block(j * dx, 0, dx, nz) += s.A_bar * avg_x;
    Bbig.block(j * dx, 0, dx, nu) += s.B_bar * avg_u;
  }
  const Matrix closed = Abig - Bbig * K;

  // c = z' Cz z + u' Cu u for player 0.
  Matrix sel_x = Matrix::Zero(dx, nz), sel_u = Matrix::Zero(du, nu);
  sel_x.block(0, 0, dx, dx).setIdentity();
  sel_u.block(0, 0, du, du).setIdentity();
  Matrix Cz = sel_x.transpose() * s.Q * sel_x +
              sel_x.transpose() * s.S_x * avg_x + avg_x.transpose() * s.S_x * sel_x +
              avg_x.transpose() * s.Q_bar * avg_x;
  Matrix Cu = sel_u.transpose() * s.R * sel_u +
              sel_u.transpose() * s.S_u * avg_u + avg_u.transpose() * s.S_u * sel_u +
              avg_u.transpose() * s.R_bar * avg_u;
  const Matrix stage = Cz + K.transpose() * Cu * K;
  const Matrix value = Stein(closed, stage, g);

  Matrix init = Matrix::Zero(nz, nz), noise = Matrix::Zero(nz, nz);
  for (int i = 0; i < n; ++i) {
    init.block(i * dx, i * dx, dx, dx) += s.init_cov;
    noise.block(i * dx, i * dx, dx, dx) = s.noise_cov;
    for (int j = 0; j < n; ++j) {
      init.block(i * dx, j * dx, dx, dx) += s.init_mean * s.init_mean.transpose();
    }
  }
  return (1 - g) * (value * init).trace() + g * (value * noise).trace();
}

// Stagewise equilibrium gains for continuation value M: the learner's first
// order condition P_n [(R_blk + g B'MB) diag(theta, theta_bar) - g B'MA] = 0,
// solved as one linear system in vec(theta), vec(theta_bar).
inline Policy StageNashGains(const Matrix& A, const Matrix& B, const Matrix& R,
                             const Matrix& P, const Matrix& M, double g,
                             int dx, int du) {
  const Matrix Rg = R + g * B.transpose() * M * B;
  const Matrix rhs = g * P * B.transpose() * M * A;  // du x 2dx
  Matrix S1 = Matrix::Zero(2 * du, du), S2 = Matrix::Zero(2 * du, du);
  S1.topRows(du).setIdentity();
  S2.bottomRows(du).setIdentity();
  Matrix T1 = Matrix::Zero(dx, 2 * dx), T2 = Matrix::Zero(dx, 2 * dx);
  T1.leftCols(dx).setIdentity();
  T2.rightCols(dx).setIdentity();
  auto kron = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  const Matrix c1 = kron(T1.transpose(), P * Rg * S1);
  const Matrix c2 = kron(T2.transpose(), P * Rg * S2);
  Matrix lhs(c1.rows(), c1.cols() + c2.cols());
  lhs << c1, c2;
  const Vector b = Eigen::Map<const Vector>(rhs.data(), rhs.size());
  const Vector sol = lhs.fullPivLu().solve(b);
  Policy p;
  p.theta = Eigen::Map<const Matrix>(sol.data(), du, dx);
  p.theta_bar = Eigen::Map<const Matrix>(sol.data() + du * dx, du, dx);
  return p;
}

// Finite-horizon backward induction from M = Q_blk for `horizon` stages.
// Builds the lifted matrices itself from the raw data.
inline Policy BackwardInduction(const GameSpec& s, int horizon) {
  const int dx = s.d_x, du = s.d_u;
  const double g = s.gamma;
  const double a = s.n.is_infinite() ? 1.0 : 1.0 - 1.0 / s.n.value();
  const double b = s.n.is_infinite() ? 0.0 : 1.0 / s.n.value();
  Matrix A = Matrix::Zero(2 * dx, 2 * dx), B = Matrix::Zero(2 * dx, 2 * du);
  A.topLeftCorner(dx, dx) = s.A;
  A.bottomRightCorner(dx, dx) = s.A + s.A_bar;
  B.topLeftCorner(dx, du) = s.B;
  B.bottomRightCorner(dx, du) = s.B + s.B_bar;
  Matrix Q(2 * dx, 2 * dx), R(2 * du, 2 * du);
  Q << s.Q, s.Q + s.S_x, s.Q + s.S_x, s.Q + 2 * s.S_x + s.Q_bar;
  R << s.R, s.R + s.S_u, s.R + s.S_u, s.R + 2 * s.S_u + s.R_bar;
  Matrix P(du, 2 * du);
  P << a * Matrix::Identity(du, du), b * Matrix::Identity(du, du);

  Matrix M = Q;
  Policy p;
  for (int t = 0; t < horizon; ++t) {
    p = StageNashGains(A, B, R, P, M, g, dx, du);
    Matrix K = Matrix::Zero(2 * du, 2 * dx);
    K.topLeftCorner(du, dx) = p.theta;
    K.bottomRightCorner(du, dx) = p.theta_bar;
    const Matrix cl = A - B * K;
    M = Q + K.transpose() * R * K + g * cl.transpose() * M * cl;
    M = 0.5 * (M + M.transpose());
  }
  return p;
}

// Scalar discounted Riccati value iteration; returns the optimal gain.
inline double ScalarRiccatiGain(double a, double b, double q, double r,
                                double g, int iters = 100000) {
  double p = q;
  for (int k = 0; k < iters; ++k) {
    p = q + g * a * a * p - g * g * a * a * b * b * p * p / (r + g * b * b * p);
  }
  return g * b * p * a / (r + g * b * b * p);
}

// Random game with stable open loop dynamics and PD block costs.
inline GameSpec RandomGame(std::mt19937_64& rng, int dx, int du, PlayerCount n,
                           double gamma) {
  std::normal_distribution<double> N(0.0, 1.0);
  auto rnd = [&](int r, int c, double scale) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = scale * N(rng);
    return m;
  };
  auto spd = [&](int d, double floor) {
    const Matrix g = rnd(d, d, 0.5);
    return Matrix(g * g.transpose() + floor * Matrix::Identity(d, d));
  };
  GameSpec s = GameSpec::Zeros(dx, du, n, gamma);
  s.A = rnd(dx, dx, 0.3);
  s.A_bar = rnd(dx, dx, 0.1);
  s.B = rnd(dx, du, 0.5);
  s.B_bar = rnd(dx, du, 0.1);
  s.Q = spd(dx, 1.0);
  s.S_x = 0.2 * spd(dx, 0.1);
  s.Q_bar = spd(dx, 0.5);
  s.R = spd(du, 1.0);
  s.S_u = 0.2 * spd(du, 0.1);
  s.R_bar = spd(du, 0.5);
  s.init_cov = spd(dx, 0.5);
  s.noise_cov = spd(dx, 0.1);
  s.init_mean = rnd(dx, 1, 1.0);
  return s;
}

}  // namespace lqdeep::oracle

#endif  // LQDEEP_TESTS_ORACLES_H_
