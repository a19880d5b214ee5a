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

#include "lqdeep/riccati_nash.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lqdeep/linalg.h"

namespace lqdeep {
namespace {

constexpr double kMaxConditionNumber = 1e12;

struct FixedPointRun {
  Matrix value;
  int iterations = 0;
  double contraction = 0.0;
};

// Iterates value <- (1 - w) value + w step(value) until successive iterates
// differ by at most `tol` in Frobenius norm. `step` returns L(G(value)).
template <typename Step>
FixedPointRun IterateFixedPoint(Matrix value, Step&& step, double relaxation,
                                double tol, int max_iter) {
  if (!(relaxation > 0.0 && relaxation <= 1.0)) {
    throw ConfigError("relaxation factor must lie in (0,1]");
  }
  FixedPointRun run;
  double min_residual = std::numeric_limits<double>::infinity();
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    const Matrix mapped = step(value);
    const double residual = (mapped - value).norm();
    if (!std::isfinite(residual)) {
      throw NumericalError("fixed point diverged: non-finite value matrix");
    }
    if (std::isfinite(previous) && previous > 1e3 * tol) {
      run.contraction = std::max(run.contraction, residual / previous);
    }
    min_residual = std::min(min_residual, residual);
    if (residual > 10.0 * min_residual) {
      std::ostringstream msg;
      msg << "fixed point diverged at iteration " << it << ": residual "
          << residual << " vs minimum " << min_residual;
      throw NumericalError(msg.str());
    }
    value = Symmetrize((1.0 - relaxation) * value + relaxation * mapped);
    previous = residual;
    run.iterations = it;
    if (residual <= tol) {
      run.value = std::move(value);
      return run;
    }
  }
  std::ostringstream msg;
  msg << "max iterations (" << max_iter << ") reached; last residual "
      << previous;
  throw NumericalError(msg.str());
}

// Exact L(theta) when theta is discounted-stable; otherwise a single sweep of
// the affine map, which is one backward-induction step of the finite-horizon
// problem and pulls the iterate toward the stabilizing region.
Matrix ValueStep(const Matrix& value, const Matrix& closed_loop,
                 const Matrix& stage_cost, double gamma) {
  if (std::sqrt(gamma) * SpectralRadius(closed_loop) < 1.0) {
    return SolveDiscountedStein(closed_loop, stage_cost, gamma).solution;
  }
  return Symmetrize(stage_cost +
                    gamma * closed_loop.transpose() * value * closed_loop);
}

Matrix SolveChecked(const Matrix& lhs, const Matrix& rhs, const char* name) {
  const double cond = ConditionNumber(lhs);
  if (!(cond < kMaxConditionNumber)) {
    std::ostringstream msg;
    msg << "singular " << name << ": condition number " << cond;
    throw NumericalError(msg.str());
  }
  return lhs.fullPivLu().solve(rhs);
}

bool IsZero(const Matrix& m) { return m.cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

Policy Policy::Zero(int d_u, int d_x) {
  return {Matrix::Zero(d_u, d_x), Matrix::Zero(d_u, d_x)};
}

Matrix Policy::Block() const { return BlockDiagonal(theta, theta_bar); }

Matrix Policy::Concatenated() const {
  Matrix out(theta.rows(), theta.cols() + theta_bar.cols());
  out << theta, theta_bar;
  return out;
}

Policy Policy::FromConcatenated(const Matrix& pair) {
  const auto dx = pair.cols() / 2;
  return {pair.leftCols(dx), pair.rightCols(dx)};
}

double Policy::FrobeniusNorm() const {
  return std::sqrt(theta.squaredNorm() + theta_bar.squaredNorm());
}

Matrix ClosedLoop(const Policy& policy, const LiftedModel& m) {
  return m.A_blk - m.B_blk * policy.Block();
}

bool IsStable(const Policy& policy, const LiftedModel& m) {
  return SpectralRadius(ClosedLoop(policy, m)) < 1.0;
}

Matrix ValueMatrix::BlockAt(int row, int col) const {
  const auto d = M.rows() / 2;
  return M.block((row - 1) * d, (col - 1) * d, d, d);
}

ValueMatrix ComputeValueMatrix(const Policy& policy, const LiftedModel& m,
                               double gamma, double tol) {
  const Matrix gain = policy.Block();
  const Matrix stage = Symmetrize(m.Q_blk + gain.transpose() * m.R_blk * gain);
  return {SolveDiscountedStein(ClosedLoop(policy, m), stage, gamma, tol)
              .solution};
}

RawGains AssembleGains(const ValueMatrix& value, const LiftedModel& m,
                       double gamma) {
  const int dx = m.d_x();
  const int du = m.d_u();
  const double a = m.n().Complement();
  const double b = m.n().Inverse();

  const Matrix A1 = m.A_blk.topLeftCorner(dx, dx);      // A
  const Matrix A2 = m.A_blk.bottomRightCorner(dx, dx);  // A + A_bar
  const Matrix B1 = m.B_blk.topLeftCorner(dx, du);      // B
  const Matrix B2 = m.B_blk.bottomRightCorner(dx, du);  // B + B_bar
  const Matrix R11 = m.R_blk.topLeftCorner(du, du);
  const Matrix R12 = m.R_blk.topRightCorner(du, du);
  const Matrix R21 = m.R_blk.bottomLeftCorner(du, du);
  const Matrix R22 = m.R_blk.bottomRightCorner(du, du);
  const Matrix M11 = value.BlockAt(1, 1);
  const Matrix M12 = value.BlockAt(1, 2);
  const Matrix M21 = value.BlockAt(2, 1);
  const Matrix M22 = value.BlockAt(2, 2);

  // Each gain pairs a B-block transpose on the left with the M-block whose
  // row index matches it, so that P_n E_theta = [F theta - K,
  // F_bar theta_bar - K_bar].
  RawGains g;
  g.F = a * (R11 + gamma * B1.transpose() * M11 * B1) +
        b * (R21 + gamma * B2.transpose() * M21 * B1);
  g.K = a * gamma * B1.transpose() * M11 * A1 +
        b * gamma * B2.transpose() * M21 * A1;
  g.F_bar = a * (R12 + gamma * B1.transpose() * M12 * B2) +
            b * (R22 + gamma * B2.transpose() * M22 * B2);
  g.K_bar = a * gamma * B1.transpose() * M12 * A2 +
            b * gamma * B2.transpose() * M22 * A2;
  return g;
}

Policy GainMap(const ValueMatrix& value, const LiftedModel& m, double gamma) {
  const RawGains g = AssembleGains(value, m, gamma);
  return {SolveChecked(g.F, g.K, "F"), SolveChecked(g.F_bar, g.K_bar, "F_bar")};
}

NashSolution SolveNash(const LiftedModel& m, double gamma,
                       const NashOptions& options) {
  Matrix start = options.initial_value.value_or(m.Q_blk);
  if (start.rows() != m.Q_blk.rows() || start.cols() != m.Q_blk.cols()) {
    throw ConfigError("initial value matrix has the wrong shape");
  }

  auto step = [&](const Matrix& value) {
    const Policy policy = GainMap(ValueMatrix{value}, m, gamma);
    const Matrix gain = policy.Block();
    const Matrix stage =
        Symmetrize(m.Q_blk + gain.transpose() * m.R_blk * gain);
    return ValueStep(value, ClosedLoop(policy, m), stage, gamma);
  };
  const FixedPointRun run = IterateFixedPoint(
      std::move(start), step, options.relaxation, options.tol,
      options.max_iter);

  NashSolution sol;
  sol.iterations = run.iterations;
  sol.contraction_estimate = run.contraction;
  sol.policy = GainMap(ValueMatrix{run.value}, m, gamma);
  if (!IsStable(sol.policy, m)) {
    std::ostringstream msg;
    msg << "fixed point gains are not stabilizing: spectral radius "
        << SpectralRadius(ClosedLoop(sol.policy, m));
    throw NumericalError(msg.str());
  }
  sol.value = ComputeValueMatrix(sol.policy, m, gamma);
  sol.residual = (sol.value.M - run.value).norm();
  sol.gains_raw = AssembleGains(sol.value, m, gamma);
  sol.cond_F = ConditionNumber(sol.gains_raw.F);
  sol.cond_F_bar = ConditionNumber(sol.gains_raw.F_bar);

  const double a = m.n().Complement();
  const double b = m.n().Inverse();
  const Matrix weighted = a * sol.gains_raw.F + b * sol.gains_raw.F_bar;
  if (MinEigenvalue(weighted) <= 0.0) {
    sol.warnings.push_back(
        "(1-1/n) F_n + (1/n) Fbar_n is not positive definite");
  }
  if (sol.contraction_estimate >= 1.0) {
    std::ostringstream msg;
    msg << "fixed-point map expanded a residual (ratio "
        << sol.contraction_estimate << ")";
    sol.warnings.push_back(msg.str());
  }
  return sol;
}

double FixedPointMultiplicityGap(const LiftedModel& m, double gamma,
                                 const NashOptions& options) {
  NashOptions from_q = options;
  from_q.initial_value.reset();
  NashOptions from_scaled_identity = options;
  from_scaled_identity.initial_value =
      10.0 * Matrix::Identity(m.Q_blk.rows(), m.Q_blk.cols());
  const NashSolution first = SolveNash(m, gamma, from_q);
  const NashSolution second = SolveNash(m, gamma, from_scaled_identity);
  return (first.value.M - second.value.M).norm();
}

RiccatiSolution SolveDiscountedRiccati(const Matrix& A, const Matrix& B,
                                       const Matrix& Q, const Matrix& R,
                                       double gamma, double tol,
                                       int max_iter) {
  auto gain_of = [&](const Matrix& p) {
    return SolveChecked(R + gamma * B.transpose() * p * B,
                        gamma * B.transpose() * p * A, "R + gamma B'PB");
  };
  auto step = [&](const Matrix& p) {
    const Matrix gain = gain_of(p);
    const Matrix stage = Symmetrize(Q + gain.transpose() * R * gain);
    return ValueStep(p, A - B * gain, stage, gamma);
  };
  const FixedPointRun run = IterateFixedPoint(Q, step, 1.0, tol, max_iter);
  RiccatiSolution sol;
  sol.gain = gain_of(run.value);
  sol.P = run.value;
  sol.iterations = run.iterations;
  return sol;
}

Policy DecoupledInfinite(const LiftedModel& m, double gamma) {
  const GameSpec& s = m.spec;
  if (!IsZero(s.A_bar) || !IsZero(s.B_bar)) {
    throw ConfigError("decoupled Riccati pair requires A_bar = B_bar = 0");
  }
  if (MinEigenvalue(s.Q) < -kPsdTolerance ||
      MinEigenvalue(s.Q + s.S_x) < -kPsdTolerance) {
    throw ConfigError("decoupled Riccati pair requires Q, Q+S_x PSD");
  }
  if (MinEigenvalue(s.R) <= kPsdTolerance ||
      MinEigenvalue(s.R + s.S_u) <= kPsdTolerance) {
    throw ConfigError("decoupled Riccati pair requires R, R+S_u PD");
  }
  const RiccatiSolution own =
      SolveDiscountedRiccati(s.A, s.B, s.Q, s.R, gamma);
  const RiccatiSolution mean =
      SolveDiscountedRiccati(s.A, s.B, s.Q + s.S_x, s.R + s.S_u, gamma);
  return {own.gain, mean.gain};
}

double NashCost(const NashSolution& sol, const LiftedModel& m, double gamma) {
  return (1.0 - gamma) * (sol.value.M * m.sigma_x).trace() +
         gamma * (sol.value.M * m.sigma_w).trace();
}

}  // namespace lqdeep
