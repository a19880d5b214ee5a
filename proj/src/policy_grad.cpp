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

#include "lqdeep/policy_grad.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "lqdeep/linalg.h"

namespace lqdeep {
namespace {

constexpr double kSingularCovariance = 1e-12;
constexpr double kMinBacktrackStep = 1e-14;
constexpr double kCostNoise = 8 * std::numeric_limits<double>::epsilon();

double LiftedCost(const Matrix& value, const LiftedModel& m, double gamma) {
  return (1.0 - gamma) * (value * m.sigma_x).trace() +
         gamma * (value * m.sigma_w).trace();
}

}  // namespace

Matrix GradientPair::Concatenated() const {
  Matrix out(d_theta.rows(), d_theta.cols() + d_theta_bar.cols());
  out << d_theta, d_theta_bar;
  return out;
}

GradientPair GradientPair::FromConcatenated(const Matrix& pair) {
  const auto dx = pair.cols() / 2;
  return {pair.leftCols(dx), pair.rightCols(dx)};
}

double GradientPair::FrobeniusNorm() const {
  return std::sqrt(d_theta.squaredNorm() + d_theta_bar.squaredNorm());
}

CovarianceMatrix DiscountedCovariance(const Policy& policy,
                                      const LiftedModel& m, double gamma) {
  // Transposed Stein equation: the same solver with Phi' in place of Phi.
  const Matrix phi = ClosedLoop(policy, m);
  const Matrix source = Symmetrize((1.0 - gamma) * m.sigma_x + gamma * m.sigma_w);
  return {SolveDiscountedStein(phi.transpose(), source, gamma).solution};
}

double PolicyCost(const Policy& policy, const LiftedModel& m, double gamma) {
  return LiftedCost(ComputeValueMatrix(policy, m, gamma).M, m, gamma);
}

Matrix DeviationGain(const Policy& learner, const Policy& others,
                     const LiftedModel& m) {
  // With sum_{j != l} (x^j - xbar) = -(x^l - xbar), the learner's lifted
  // action is linear in its lifted state with this 2x2 block gain.
  const double a = m.n().Complement();
  const double b = m.n().Inverse();
  const int dx = m.d_x();
  const int du = m.d_u();
  Matrix gain(2 * du, 2 * dx);
  gain.topLeftCorner(du, dx) = a * learner.theta + b * others.theta;
  gain.topRightCorner(du, dx) = a * (learner.theta_bar - others.theta_bar);
  gain.bottomLeftCorner(du, dx) = b * (learner.theta - others.theta);
  gain.bottomRightCorner(du, dx) = b * learner.theta_bar + a * others.theta_bar;
  return gain;
}

double DeviationCost(const Policy& learner, const Policy& others,
                     const LiftedModel& m, double gamma) {
  const Matrix gain = DeviationGain(learner, others, m);
  const Matrix phi = m.A_blk - m.B_blk * gain;
  if (SpectralRadius(phi) >= 1.0) {
    return std::numeric_limits<double>::infinity();
  }
  const Matrix stage = Symmetrize(m.Q_blk + gain.transpose() * m.R_blk * gain);
  return LiftedCost(SolveDiscountedStein(phi, stage, gamma).solution, m, gamma);
}

GradientPair ExactGradient(const Policy& policy, const LiftedModel& m,
                           double gamma) {
  const Matrix value = ComputeValueMatrix(policy, m, gamma).M;
  const Matrix sigma = DiscountedCovariance(policy, m, gamma).sigma;
  const Matrix gain = policy.Block();
  const Matrix e =
      (m.R_blk + gamma * m.B_blk.transpose() * value * m.B_blk) * gain -
      gamma * m.B_blk.transpose() * value * m.A_blk;
  return GradientPair::FromConcatenated(2.0 * m.P_n * e * sigma);
}

double InitialMomentFloor(const LiftedModel& m) {
  return MinSingularValue(m.sigma_x);
}

Policy GdStep(const Policy& policy, const GradientPair& grad, double eta) {
  return {policy.theta - eta * grad.d_theta,
          policy.theta_bar - eta * grad.d_theta_bar};
}

Policy NpgStep(const Policy& policy, const GradientPair& grad,
               const CovarianceMatrix& sigma, double eta) {
  const double floor = MinSingularValue(sigma.sigma);
  if (floor < kSingularCovariance) {
    std::ostringstream msg;
    msg << "singular covariance: sigma_min = " << floor;
    throw NumericalError(msg.str());
  }
  const Matrix direction =
      sigma.sigma.transpose()
          .ldlt()
          .solve(grad.Concatenated().transpose())
          .transpose();
  return GdStep(policy, GradientPair::FromConcatenated(direction), eta);
}

double NpgStepSize(const LiftedModel& m, double gamma, double initial_cost,
                   double mu) {
  if (!(mu > 0.0)) throw NumericalError("sigma_x is singular; no NPG step");
  const double a = m.n().Complement();
  const double b = m.n().Inverse();
  const double proj = a * a + b * b;  // ||P_n' P_n||
  const double b_norm = SpectralNorm(m.B_blk);
  return 1.0 / (proj * (SpectralNorm(m.R_blk) +
                        gamma * b_norm * b_norm * initial_cost / mu));
}

std::string ToString(Method method) {
  return method == Method::kGd ? "gd" : "npg";
}

Method ParseMethod(const std::string& text) {
  if (text == "gd") return Method::kGd;
  if (text == "npg" || text == "npgd") return Method::kNpg;
  throw ConfigError("unknown method '" + text + "' (expected gd or npg)");
}

std::string ToString(TerminalStatus status) {
  switch (status) {
    case TerminalStatus::kConverged: return "converged";
    case TerminalStatus::kMaxIter: return "max_iter";
    case TerminalStatus::kDestabilized: return "destabilized";
    case TerminalStatus::kStalled: return "stalled";
  }
  return "unknown";
}

TrainLog TrainModelBased(const LiftedModel& m, double gamma,
                         const Policy& init, const ModelBasedOptions& options) {
  if (!IsStable(init, m)) {
    std::ostringstream msg;
    msg << "initial policy unstable: spectral radius "
        << SpectralRadius(ClosedLoop(init, m));
    throw NumericalError(msg.str());
  }
  if (options.eta && !(*options.eta > 0.0)) {
    throw ConfigError("step size must be positive");
  }
  if (options.max_iterations < 0) {
    throw ConfigError("iteration count must be non-negative");
  }

  const auto start = std::chrono::steady_clock::now();
  auto seconds = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  std::optional<double> npg_auto;
  if (options.method == Method::kNpg && !options.eta) {
    npg_auto = NpgStepSize(m, gamma, PolicyCost(init, m, gamma),
                           InitialMomentFloor(m));
  }

  TrainLog log;
  Policy policy = init;
  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.policy = policy;
    rec.cost = PolicyCost(policy, m, gamma);
    const GradientPair grad = ExactGradient(policy, m, gamma);
    rec.grad_norm = grad.FrobeniusNorm();
    rec.rho = SpectralRadius(ClosedLoop(policy, m));

    const double progress = options.nash_cost
                                ? std::abs(rec.cost - *options.nash_cost)
                                : rec.grad_norm;
    if (progress <= options.stop_tol) {
      rec.wall_clock = seconds();
      log.iterations.push_back(rec);
      log.terminal_status = TerminalStatus::kConverged;
      return log;
    }
    if (k == options.max_iterations) {
      rec.wall_clock = seconds();
      log.iterations.push_back(rec);
      log.terminal_status = TerminalStatus::kMaxIter;
      return log;
    }

    Policy next;
    if (options.method == Method::kNpg) {
      rec.step = options.eta ? *options.eta : *npg_auto;
      next = NpgStep(policy, grad, DiscountedCovariance(policy, m, gamma),
                     rec.step);
    } else if (options.eta) {
      rec.step = *options.eta;
      next = GdStep(policy, grad, rec.step);
    } else {
      // Backtracking on the learner's own cost with the imitators frozen;
      // the shared cost need not decrease along the learner's gradient.
      const double current = DeviationCost(policy, policy, m, gamma);
      double eta = 1.0;
      for (;; eta *= 0.5) {
        if (eta < kMinBacktrackStep) {
          rec.wall_clock = seconds();
          log.iterations.push_back(rec);
          log.terminal_status = TerminalStatus::kStalled;
          log.message = "step-size backtracking stalled at iteration " +
                        std::to_string(k);
          return log;
        }
        next = GdStep(policy, grad, eta);
        if (!IsStable(next, m)) continue;
        const double trial = DeviationCost(next, policy, m, gamma);
        if (trial < current) break;
        // Near the equilibrium the decrease drops below the resolution of J;
        // there a step counts as descent if it also shrinks the gradient.
        if (trial <= current + kCostNoise * std::abs(current) &&
            ExactGradient(next, m, gamma).FrobeniusNorm() < rec.grad_norm) {
          break;
        }
      }
      rec.step = eta;
    }
    rec.wall_clock = seconds();
    log.iterations.push_back(rec);

    if (!IsStable(next, m)) {
      IterationRecord bad;
      bad.k = k + 1;
      bad.policy = next;
      bad.cost = std::numeric_limits<double>::infinity();
      bad.grad_norm = std::numeric_limits<double>::quiet_NaN();
      bad.rho = SpectralRadius(ClosedLoop(next, m));
      bad.wall_clock = seconds();
      log.iterations.push_back(bad);
      log.terminal_status = TerminalStatus::kDestabilized;
      log.message = "destabilized at iteration " + std::to_string(k + 1);
      return log;
    }
    policy = next;
  }
}

PlReport PlCheck(const Policy& policy, const NashSolution& nash,
                 const LiftedModel& m, double gamma) {
  PlReport report;
  const Matrix sigma_star = DiscountedCovariance(nash.policy, m, gamma).sigma;
  const int dx = m.d_x();

  if (m.n().is_infinite()) {
    const GameSpec& s = m.spec;
    const double c_min = MinSingularValue(s.init_cov);
    const double mm_min =
        MinSingularValue(s.init_mean * s.init_mean.transpose());
    const double r_min = MinSingularValue(s.R);
    const double rs_min = MinSingularValue(s.R + s.S_u);
    if (c_min <= kPsdTolerance || mm_min <= kPsdTolerance ||
        r_min <= kPsdTolerance || rs_min <= kPsdTolerance) {
      report.applicable = false;
      report.reason =
          "requires C, m m', R and R+S_u nonsingular for the infinite "
          "population";
      return report;
    }
    report.constant =
        SpectralNorm(sigma_star.topLeftCorner(dx, dx)) /
            (4.0 * c_min * c_min * r_min) +
        SpectralNorm(sigma_star.bottomRightCorner(dx, dx)) /
            (4.0 * mm_min * mm_min * rs_min);
  } else {
    const double r_min = MinSingularValue(m.R_blk);
    const double mu = InitialMomentFloor(m);
    if (r_min <= kPsdTolerance || mu <= kPsdTolerance) {
      std::ostringstream reason;
      reason << "requires R_blk and sigma_x nonsingular (sigma_min(R_blk) = "
             << r_min << ", sigma_min(sigma_x) = " << mu << ")";
      report.applicable = false;
      report.reason = reason.str();
      return report;
    }
    const double n = static_cast<double>(m.n().value());
    report.constant =
        n * n * SpectralNorm(sigma_star) / (4.0 * mu * mu * r_min);
  }

  report.gap = PolicyCost(policy, m, gamma) - NashCost(nash, m, gamma);
  const double g = ExactGradient(policy, m, gamma).FrobeniusNorm();
  report.bound = report.constant * g * g;
  report.holds = report.gap <= report.bound + 1e-12 * (1.0 + std::abs(report.gap));
  return report;
}

}  // namespace lqdeep
