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

#include "lqdeep/zeroth_order.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "lqdeep/counter_rng.h"
#include "lqdeep/linalg.h"
#include "lqdeep/parallel.h"

namespace lqdeep {
namespace {

// Sub-stream purposes for DeriveSeed.
enum Purpose : std::uint64_t {
  kSpherePurpose = 1,
  kPerturbedRolloutPurpose = 2,
  kBaselinePurpose = 3,
  kGradientPurpose = 4,
  kLearnerPurpose = 5,
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

PerturbationSample SampleSphere(double r, int d_u, int d_x, std::uint64_t seed,
                                std::uint32_t index) {
  if (!(r > 0.0)) throw ConfigError("smoothing radius must be positive");
  const int dim = 2 * d_u * d_x;
  RandomStream stream(DeriveSeed(seed, kSpherePurpose), index, 0, 0);
  Vector z(dim);
  do {
    for (int i = 0; i < dim; ++i) z(i) = stream.Normal();
  } while (z.norm() == 0.0);
  z *= r / z.norm();

  // Column-major reshape: first half fills theta_tilde, second theta_bar.
  PerturbationSample s;
  s.theta_tilde = Eigen::Map<const Matrix>(z.data(), d_u, d_x);
  s.theta_bar_tilde = Eigen::Map<const Matrix>(z.data() + d_u * d_x, d_u, d_x);
  return s;
}

GradientEstimate EmpiricalGradient(const Policy& policy, const LiftedModel& m,
                                   const SmoothingConfig& smoothing,
                                   std::uint64_t seed) {
  if (!(smoothing.r > 0.0)) {
    throw ConfigError("smoothing radius must be positive");
  }
  if (smoothing.L < 1 || smoothing.T < 1 ||
      smoothing.rollouts_per_perturbation < 1) {
    throw ConfigError("L, T and rollouts per perturbation must be positive");
  }
  if (m.n().is_infinite()) {
    throw ConfigError("model-free estimation requires a finite player count");
  }
  const int dx = m.d_x();
  const int du = m.d_u();

  GradientEstimate est;
  est.samples.resize(static_cast<std::size_t>(smoothing.L));
  ParallelFor(est.samples.size(), [&](std::size_t l) {
    PerturbationSample s = SampleSphere(smoothing.r, du, dx, seed,
                                        static_cast<std::uint32_t>(l));
    const Policy perturbed{policy.theta + s.theta_tilde,
                           policy.theta_bar + s.theta_bar_tilde};
    RolloutConfig cfg;
    cfg.T = smoothing.T;
    cfg.n_rollouts = smoothing.rollouts_per_perturbation;
    cfg.seed = DeriveSeed(seed, kPerturbedRolloutPurpose, l);
    cfg.learner_index = smoothing.learner_index;
    cfg.record_trajectory = false;
    cfg.state_guard = smoothing.guard ? kStateGuard
                                      : std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (const auto& tr : Rollout(m, perturbed, policy, cfg)) {
      if (tr.diverged) s.rejected = true;
      total += tr.discounted_cost;
    }
    s.cost_sample = s.rejected ? kNaN : total / cfg.n_rollouts;
    est.samples[l] = std::move(s);
  });

  Matrix sum = Matrix::Zero(du, 2 * dx);
  Matrix direction(du, 2 * dx);
  for (const auto& s : est.samples) {
    if (s.rejected) {
      ++est.rejected;
      continue;
    }
    direction << s.theta_tilde, s.theta_bar_tilde;
    sum += s.cost_sample * direction;
    ++est.accepted;
  }
  if (est.accepted == 0) {
    throw NumericalError("perturbed policy unstable: every sample rejected");
  }
  const double scale = 2.0 * dx * du /
                       (smoothing.r * smoothing.r * est.accepted);
  est.gradient = GradientPair::FromConcatenated(scale * sum);
  return est;
}

TrainLog TrainModelFree(const LiftedModel& m, const Policy& init,
                        const ModelFreeOptions& options) {
  if (m.n().is_infinite()) {
    throw ConfigError("model-free training requires a finite player count");
  }
  if (!(options.eta > 0.0)) throw ConfigError("step size must be positive");
  if (options.iterations < 0) {
    throw ConfigError("iteration count must be non-negative");
  }
  if (options.use_model_for_evaluation && !IsStable(init, m)) {
    std::ostringstream msg;
    msg << "initial policy unstable: spectral radius "
        << SpectralRadius(ClosedLoop(init, m));
    throw NumericalError(msg.str());
  }
  const double gamma = m.spec.gamma;
  const int n = static_cast<int>(m.n().value());
  const int baseline = options.baseline_rollouts > 0
                           ? options.baseline_rollouts
                           : std::max(options.smoothing.L / 10, 50);

  const auto start = std::chrono::steady_clock::now();
  auto seconds = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  TrainLog log;
  auto abort = [&log, &seconds](IterationRecord rec, int k) {
    rec.wall_clock = seconds();
    log.iterations.push_back(std::move(rec));
    log.terminal_status = TerminalStatus::kDestabilized;
    log.message = "destabilized at iteration " + std::to_string(k);
    return log;
  };

  Policy policy = init;
  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.policy = policy;
    rec.cost = rec.rho = rec.grad_norm = kNaN;
    if (options.use_model_for_evaluation) {
      rec.rho = SpectralRadius(ClosedLoop(policy, m));
      if (rec.rho >= 1.0) {
        rec.cost = std::numeric_limits<double>::infinity();
        return abort(rec, k);
      }
      rec.cost = PolicyCost(policy, m, gamma);
    }

    SmoothingConfig smoothing = options.smoothing;
    if (options.random_learner) {
      RandomStream pick(DeriveSeed(options.seed, kLearnerPurpose, k), 0, 0, 0);
      smoothing.learner_index =
          std::min(n - 1, static_cast<int>(pick.Uniform() * n));
    }

    RolloutConfig cfg;
    cfg.T = smoothing.T;
    cfg.n_rollouts = baseline;
    cfg.seed = DeriveSeed(options.seed, kBaselinePurpose, k);
    cfg.learner_index = smoothing.learner_index;
    cfg.record_trajectory = false;
    const auto traces = Rollout(m, policy, policy, cfg);
    try {
      rec.empirical_cost = EmpiricalCost(traces).mean;
    } catch (const NumericalError&) {
      rec.empirical_cost = std::numeric_limits<double>::infinity();
      return abort(rec, k);
    }

    if (k == options.iterations) {
      rec.wall_clock = seconds();
      log.iterations.push_back(rec);
      log.terminal_status = TerminalStatus::kMaxIter;
      return log;
    }

    GradientEstimate est;
    try {
      est = EmpiricalGradient(policy, m, smoothing,
                              DeriveSeed(options.seed, kGradientPurpose, k));
    } catch (const NumericalError&) {
      rec.rejected = smoothing.L;
      return abort(rec, k);
    }
    rec.grad_norm = est.gradient.FrobeniusNorm();
    rec.rejected = est.rejected;
    rec.step = options.eta;
    const Policy next =
        options.method == Method::kNpg
            ? NpgStep(policy, est.gradient, EmpiricalCovariance(traces).mean,
                      options.eta)
            : GdStep(policy, est.gradient, options.eta);
    rec.wall_clock = seconds();
    log.iterations.push_back(rec);
    policy = next;
  }
}

}  // namespace lqdeep
