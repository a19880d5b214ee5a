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

#include "lqdeep/sim_engine.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lqdeep/counter_rng.h"
#include "lqdeep/linalg.h"
#include "lqdeep/parallel.h"

namespace lqdeep {
namespace {

// Stream coordinate reserved for the per-rollout learner draw.
constexpr std::uint32_t kLearnerDrawStep = 0xFFFFFFFFu;

void CheckPolicyShape(const Policy& p, const LiftedModel& m) {
  if (p.theta.rows() != m.d_u() || p.theta.cols() != m.d_x() ||
      p.theta_bar.rows() != m.d_u() || p.theta_bar.cols() != m.d_x()) {
    throw ConfigError("policy dimensions do not match the game");
  }
}

RolloutTrace SimulateOne(const LiftedModel& m, const Policy& learner_policy,
                         const Policy& others_policy, const RolloutConfig& cfg,
                         const PrimitiveSampler& sampler, std::uint32_t rollout) {
  const GameSpec& s = m.spec;
  const int n = static_cast<int>(m.n().value());
  const int dx = m.d_x();
  const int du = m.d_u();
  const double gamma = s.gamma;

  RolloutTrace trace;
  trace.learner = cfg.learner_index;
  if (cfg.random_learner) {
    RandomStream pick(cfg.seed, rollout, kLearnerDrawStep, 0);
    trace.learner = std::min(n - 1, static_cast<int>(pick.Uniform() * n));
  }
  const int l = trace.learner;
  if (cfg.record_trajectory) {
    trace.lifted_states = Matrix::Zero(2 * dx, cfg.T);
    trace.lifted_actions = Matrix::Zero(2 * du, cfg.T);
    trace.per_step_costs.reserve(cfg.T);
  }
  trace.discounted_second_moment = Matrix::Zero(2 * dx, 2 * dx);

  const Matrix others_shift = others_policy.theta_bar - others_policy.theta;
  const Matrix learner_shift = learner_policy.theta_bar - learner_policy.theta;

  Matrix x = sampler(cfg.seed, rollout, 0, n);
  if (x.rows() != dx || x.cols() != n) {
    throw ConfigError("sampler returned primitives of the wrong shape");
  }
  Matrix u(du, n);
  Vector xs(2 * dx), us(2 * du);
  double weight = 1.0 - gamma;

  for (int t = 1; t <= cfg.T; ++t) {
    const Vector x_bar = x.rowwise().mean();
    u.noalias() = -others_policy.theta * x;
    u.colwise() -= others_shift * x_bar;
    u.col(l) = -learner_policy.theta * x.col(l) - learner_shift * x_bar;
    const Vector u_bar = u.rowwise().mean();

    xs << x.col(l) - x_bar, x_bar;
    us << u.col(l) - u_bar, u_bar;
    const double cost = xs.dot(m.Q_blk * xs) + us.dot(m.R_blk * us);

    if (cfg.record_trajectory) {
      trace.lifted_states.col(t - 1) = xs;
      trace.lifted_actions.col(t - 1) = us;
      trace.per_step_costs.push_back(cost);
    }
    if (cfg.record_all_players) trace.player_states.push_back(x);
    trace.discounted_cost += weight * cost;
    trace.discounted_second_moment.noalias() += weight * xs * xs.transpose();
    weight *= gamma;

    if (t == cfg.T) break;
    const Vector common = s.A_bar * x_bar + s.B_bar * u_bar;
    Matrix next = s.A * x + s.B * u + sampler(cfg.seed, rollout, t, n);
    next.colwise() += common;
    x = std::move(next);
    const double peak = x.cwiseAbs().maxCoeff();
    if (!(peak <= cfg.state_guard)) {
      trace.diverged = true;
      trace.discounted_cost = std::numeric_limits<double>::infinity();
      break;
    }
  }
  return trace;
}

}  // namespace

PrimitiveSampler GaussianSampler(const GameSpec& spec) {
  const Matrix init_root = PsdSquareRoot(spec.init_cov);
  const Matrix noise_root = PsdSquareRoot(spec.noise_cov);
  const Vector mean = spec.init_mean;
  const int dx = spec.d_x;
  return [init_root, noise_root, mean, dx](std::uint64_t seed,
                                           std::uint32_t rollout,
                                           std::uint32_t t, int n) {
    Matrix out(dx, n);
    Vector z(dx);
    for (int j = 0; j < n; ++j) {
      RandomStream stream(seed, rollout, t, static_cast<std::uint32_t>(j));
      for (int i = 0; i < dx; ++i) z(i) = stream.Normal();
      out.col(j) = t == 0 ? Vector(mean + init_root * z) : Vector(noise_root * z);
    }
    return out;
  };
}

std::vector<RolloutTrace> Rollout(const LiftedModel& m,
                                  const Policy& learner_policy,
                                  const Policy& others_policy,
                                  const RolloutConfig& cfg,
                                  const PrimitiveSampler& sampler) {
  if (m.n().is_infinite()) {
    throw ConfigError(
        "simulation requires a finite player count; use a large finite n");
  }
  if (cfg.T < 1 || cfg.n_rollouts < 1) {
    throw ConfigError("horizon and rollout count must be positive");
  }
  if (!cfg.random_learner &&
      (cfg.learner_index < 0 || cfg.learner_index >= m.n().value())) {
    std::ostringstream msg;
    msg << "learner index " << cfg.learner_index << " out of range for n = "
        << m.n().value();
    throw ConfigError(msg.str());
  }
  CheckPolicyShape(learner_policy, m);
  CheckPolicyShape(others_policy, m);

  const PrimitiveSampler draw = sampler ? sampler : GaussianSampler(m.spec);
  std::vector<RolloutTrace> traces(static_cast<std::size_t>(cfg.n_rollouts));
  ParallelFor(traces.size(), [&](std::size_t r) {
    traces[r] = SimulateOne(m, learner_policy, others_policy, cfg, draw,
                            static_cast<std::uint32_t>(r));
  });
  return traces;
}

ScalarEstimate EmpiricalCost(const std::vector<RolloutTrace>& traces) {
  if (traces.empty()) throw ConfigError("no traces to average");
  ScalarEstimate est;
  double sum = 0.0;
  for (const auto& tr : traces) {
    if (tr.diverged) {
      ++est.diverged;
      continue;
    }
    sum += tr.discounted_cost;
    ++est.samples;
  }
  if (est.samples == 0) throw NumericalError("every rollout diverged");
  est.mean = sum / est.samples;
  if (est.samples > 1) {
    double ss = 0.0;
    for (const auto& tr : traces) {
      if (!tr.diverged) ss += std::pow(tr.discounted_cost - est.mean, 2);
    }
    est.standard_error = std::sqrt(ss / (est.samples - 1) / est.samples);
  }
  return est;
}

CovarianceEstimate EmpiricalCovariance(const std::vector<RolloutTrace>& traces) {
  if (traces.empty()) throw ConfigError("no traces to average");
  CovarianceEstimate est;
  const auto d = traces.front().discounted_second_moment.rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& tr : traces) {
    if (tr.diverged) {
      ++est.diverged;
      continue;
    }
    sum += tr.discounted_second_moment;
    ++est.samples;
  }
  if (est.samples == 0) throw NumericalError("every rollout diverged");
  const Matrix mean = sum / est.samples;
  est.mean.sigma = Symmetrize(mean);
  est.standard_error = Matrix::Zero(d, d);
  if (est.samples > 1) {
    Matrix ss = Matrix::Zero(d, d);
    for (const auto& tr : traces) {
      if (!tr.diverged) {
        ss += (tr.discounted_second_moment - mean).cwiseAbs2();
      }
    }
    est.standard_error =
        (ss / static_cast<double>(est.samples - 1) / est.samples).cwiseSqrt();
  }
  return est;
}

}  // namespace lqdeep
