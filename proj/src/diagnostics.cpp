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

#include "lqdeep/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "lqdeep/counter_rng.h"
#include "lqdeep/linalg.h"
#include "lqdeep/sim_engine.h"

namespace lqdeep {
namespace {

enum Purpose : std::uint64_t {
  kPerturbationPurpose = 11,
  kFiniteDifferencePurpose = 12,
  kSimulationPurpose = 13,
};

struct Context {
  const ExperimentConfig& config;
  const DiagnosticOptions& options;
  LiftedModel m;
  double gamma;
  std::optional<NashSolution> nash;
  double nash_cost = 0.0;
  std::vector<DiagnosticResult> results;

  void Add(const std::string& name, CheckStatus status, const std::string& detail) {
    results.push_back({name, status, detail});
  }

  // Runs `body`; any exception becomes a failed check carrying its message.
  void Run(const std::string& name,
           const std::function<std::pair<CheckStatus, std::string>()>& body) {
    try {
      auto [status, detail] = body();
      Add(name, status, detail);
    } catch (const std::exception& e) {
      Add(name, CheckStatus::kFail, e.what());
    }
  }

  std::pair<CheckStatus, std::string> NeedsNash() const {
    return {CheckStatus::kInapplicable, "no Nash solution available"};
  }
};

std::string Fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

CheckStatus PassIf(bool ok) { return ok ? CheckStatus::kPass : CheckStatus::kFail; }

Policy InitialPolicy(const Context& c) {
  return c.config.params.init.value_or(Policy::Zero(c.m.d_u(), c.m.d_x()));
}

void AddAssumptionChecks(Context& c) {
  for (const auto& report : Validate(c.config.game)) {
    c.Add("assumption: " + report.name,
          report.passed ? CheckStatus::kPass : CheckStatus::kWarn,
          report.detail);
  }
  const Policy init = InitialPolicy(c);
  const double rho = SpectralRadius(ClosedLoop(init, c.m));
  c.Add("assumption: initial policy stable", PassIf(rho < 1.0),
        "spectral radius " + Fmt(rho));
}

void AddNashChecks(Context& c) {
  c.Run("nash_solve", [&]() -> std::pair<CheckStatus, std::string> {
    c.nash = SolveNash(c.m, c.gamma);
    c.nash_cost = NashCost(*c.nash, c.m, c.gamma);
    std::ostringstream detail;
    detail << "iterations " << c.nash->iterations << ", residual "
           << Fmt(c.nash->residual) << ", cost " << Fmt(c.nash_cost);
    for (const auto& w : c.nash->warnings) detail << "; " << w;
    const bool stable = IsStable(c.nash->policy, c.m);
    if (!stable) return {CheckStatus::kFail, detail.str() + "; policy unstable"};
    return {c.nash->warnings.empty() ? CheckStatus::kPass : CheckStatus::kWarn,
            detail.str()};
  });
  if (!c.nash) return;
  const Policy& star = c.nash->policy;
  const double scale = 1.0 + star.FrobeniusNorm();

  c.Run("fixed_point_consistency", [&]() -> std::pair<CheckStatus, std::string> {
    const Policy again =
        GainMap(ComputeValueMatrix(star, c.m, c.gamma), c.m, c.gamma);
    const double gap = (again.Concatenated() - star.Concatenated()).norm();
    return {PassIf(gap <= 1e-8 * scale), "||G(M(theta*)) - theta*|| = " + Fmt(gap)};
  });
  c.Run("nash_stationarity", [&]() -> std::pair<CheckStatus, std::string> {
    const double g = ExactGradient(star, c.m, c.gamma).FrobeniusNorm();
    return {PassIf(g <= 1e-6 * scale), "||grad J(theta*)||_F = " + Fmt(g)};
  });
  c.Run("fixed_point_multiplicity", [&]() -> std::pair<CheckStatus, std::string> {
    const double gap = FixedPointMultiplicityGap(c.m, c.gamma);
    return {gap <= 1e-6 ? CheckStatus::kPass : CheckStatus::kWarn,
            "gap between fixed points from M0 = Q_blk and M0 = 10 I: " + Fmt(gap)};
  });

  const GameSpec& s = c.config.game;
  const bool decouples = s.A_bar.isZero(0.0) && s.B_bar.isZero(0.0) &&
                         MinEigenvalue(s.R) > kPsdTolerance &&
                         MinEigenvalue(s.R + s.S_u) > kPsdTolerance &&
                         MinEigenvalue(s.Q) >= -kPsdTolerance &&
                         MinEigenvalue(s.Q + s.S_x) >= -kPsdTolerance;
  if (!decouples) {
    c.Add("infinite_population_agreement", CheckStatus::kInapplicable,
          "requires A_bar = B_bar = 0, Q and Q+S_x PSD, R and R+S_u PD");
  } else {
    c.Run("infinite_population_agreement",
          [&]() -> std::pair<CheckStatus, std::string> {
            GameSpec inf = s;
            inf.n = PlayerCount::Infinite();
            const LiftedModel mi = Lift(inf);
            const Policy a = DecoupledInfinite(mi, c.gamma);
            const Policy b = SolveNash(mi, c.gamma).policy;
            const double gap = (a.Concatenated() - b.Concatenated()).norm();
            return {PassIf(gap <= 1e-8),
                    "decoupled vs coupled solver at n = infinite: " + Fmt(gap)};
          });
  }
}

void AddGradientChecks(Context& c) {
  if (!c.nash) return;
  const std::uint64_t seed = c.config.seed;
  const auto policies = RandomStablePerturbations(
      c.nash->policy, c.m, 5, 0.1, DeriveSeed(seed, kFiniteDifferencePurpose));

  c.Run("gradient_finite_difference", [&]() -> std::pair<CheckStatus, std::string> {
    constexpr double h = 1e-5;
    double worst = 0.0;
    for (const auto& p : policies) {
      Matrix analytic = ExactGradient(p, c.m, c.gamma).Concatenated();
      if (c.options.corrupt_gradient) analytic *= 1.1;
      const Matrix base = p.Concatenated();
      Matrix fd(base.rows(), base.cols());
      for (Eigen::Index i = 0; i < base.size(); ++i) {
        Matrix up = base, down = base;
        up(i) += h;
        down(i) -= h;
        fd(i) = (DeviationCost(Policy::FromConcatenated(up), p, c.m, c.gamma) -
                 DeviationCost(Policy::FromConcatenated(down), p, c.m, c.gamma)) /
                (2 * h);
      }
      worst = std::max(worst, (analytic - fd).norm() / std::max(fd.norm(), 1e-12));
    }
    return {PassIf(worst <= 1e-4),
            "worst relative error vs central differences: " + Fmt(worst)};
  });

  c.Run("cost_duality", [&]() -> std::pair<CheckStatus, std::string> {
    double worst = 0.0;
    for (const auto& p : policies) {
      const Matrix gain = p.Block();
      const double primal = PolicyCost(p, c.m, c.gamma);
      const double dual =
          ((c.m.Q_blk + gain.transpose() * c.m.R_blk * gain) *
           DiscountedCovariance(p, c.m, c.gamma).sigma)
              .trace();
      worst = std::max(worst, std::abs(primal - dual) / std::max(std::abs(primal), 1e-300));
    }
    return {PassIf(worst <= 1e-8), "worst relative gap: " + Fmt(worst)};
  });

  c.Run("covariance_identity", [&]() -> std::pair<CheckStatus, std::string> {
    double worst_residual = 0.0, worst_floor = 0.0;
    for (const auto& p : policies) {
      const Matrix sigma = DiscountedCovariance(p, c.m, c.gamma).sigma;
      const Matrix phi = ClosedLoop(p, c.m);
      const Matrix rhs = (1 - c.gamma) * c.m.sigma_x + c.gamma * c.m.sigma_w +
                         c.gamma * phi * sigma * phi.transpose();
      worst_residual = std::max(worst_residual,
                                (sigma - rhs).norm() / (1.0 + sigma.norm()));
      worst_floor = std::min(
          worst_floor, MinEigenvalue(sigma - (1 - c.gamma) * c.m.sigma_x));
    }
    return {PassIf(worst_residual <= 1e-10 && worst_floor >= -1e-10),
            "relative residual " + Fmt(worst_residual) +
                ", min eig(Sigma - (1-gamma) sigma_x) " + Fmt(worst_floor)};
  });
}

void AddPlChecks(Context& c) {
  if (!c.nash) return;
  const auto policies = RandomStablePerturbations(
      c.nash->policy, c.m, c.options.perturbations, 0.3,
      DeriveSeed(c.config.seed, kPerturbationPurpose));
  c.Run("pl_inequality", [&]() -> std::pair<CheckStatus, std::string> {
    int violated = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    PlReport first;
    for (std::size_t i = 0; i < policies.size(); ++i) {
      const PlReport r = PlCheck(policies[i], *c.nash, c.m, c.gamma);
      if (i == 0) first = r;
      if (!r.applicable) return {CheckStatus::kInapplicable, r.reason};
      if (!r.holds) ++violated;
      min_slack = std::min(min_slack, r.bound - r.gap);
    }
    std::ostringstream detail;
    detail << "L1 = " << Fmt(first.constant) << ", " << violated << " of "
           << policies.size() << " perturbations violate, min slack "
           << Fmt(min_slack);
    return {PassIf(violated == 0), detail.str()};
  });
}

void AddTrainingChecks(Context& c) {
  if (!c.nash) return;
  const Policy init = InitialPolicy(c);
  if (!IsStable(init, c.m)) return;

  c.Run("npg_contraction", [&]() -> std::pair<CheckStatus, std::string> {
    if (c.m.n().is_infinite() || MinSingularValue(c.m.R_blk) <= kPsdTolerance) {
      return {CheckStatus::kInapplicable,
              "requires finite n and sigma_min(R_blk) > 0, got " +
                  Fmt(MinSingularValue(c.m.R_blk))};
    }
    ModelBasedOptions o;
    o.method = Method::kNpg;
    o.max_iterations = 200;
    o.stop_tol = 1e-12;
    o.nash_cost = c.nash_cost;
    const TrainLog log = TrainModelBased(c.m, c.gamma, init, o);
    const double eta = log.iterations.front().step;
    const double bound = NpgContractionBound(c.m, c.nash->policy, eta) + 1e-9;
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < log.iterations.size(); ++k) {
      const double g0 = std::abs(log.iterations[k].cost - c.nash_cost);
      const double g1 = std::abs(log.iterations[k + 1].cost - c.nash_cost);
      if (g0 <= 1e-12) break;
      worst = std::max(worst, g1 / g0);
    }
    return {PassIf(worst <= bound),
            "eta = " + Fmt(eta) + ", worst gap ratio " + Fmt(worst) +
                " vs bound " + Fmt(bound)};
  });

  c.Run("gd_descent", [&]() -> std::pair<CheckStatus, std::string> {
    ModelBasedOptions o;
    o.method = Method::kGd;
    o.max_iterations = 50;
    o.stop_tol = 0.0;
    const TrainLog log = TrainModelBased(c.m, c.gamma, init, o);
    int increases = 0;
    for (std::size_t k = 0; k + 1 < log.iterations.size(); ++k) {
      const auto& a = log.iterations[k];
      const auto& b = log.iterations[k + 1];
      if (DeviationCost(b.policy, a.policy, c.m, c.gamma) > a.cost + 1e-12) {
        ++increases;
      }
    }
    return {PassIf(increases == 0),
            std::to_string(increases) + " learner-cost increases over " +
                std::to_string(log.iterations.size() - 1) + " steps"};
  });

  c.Run("model_based_convergence", [&]() -> std::pair<CheckStatus, std::string> {
    ModelBasedOptions o;
    o.method = Method::kGd;
    o.max_iterations = 10000;
    o.stop_tol = 1e-8;
    o.nash_cost = c.nash_cost;
    const TrainLog log = TrainModelBased(c.m, c.gamma, init, o);
    const auto& last = log.iterations.back();
    return {PassIf(log.terminal_status == TerminalStatus::kConverged),
            "gd (backtracking) " + ToString(log.terminal_status) + " after " +
                std::to_string(last.k) + " iterations, |J - J*| = " +
                Fmt(std::abs(last.cost - c.nash_cost))};
  });
}

void AddSimulationChecks(Context& c) {
  if (!c.nash) return;
  if (c.m.n().is_infinite()) {
    for (const char* name : {"nash_cost_simulation", "covariance_monte_carlo",
                             "truncation_bound"}) {
      c.Add(name, CheckStatus::kInapplicable,
            "simulation requires a finite player count");
    }
    return;
  }
  const Policy& star = c.nash->policy;
  RolloutConfig cfg;
  cfg.n_rollouts = c.options.rollouts;
  cfg.record_trajectory = false;
  cfg.seed = DeriveSeed(c.config.seed, kSimulationPurpose);

  std::vector<RolloutTrace> long_traces;
  c.Run("nash_cost_simulation", [&]() -> std::pair<CheckStatus, std::string> {
    cfg.T = 200;
    long_traces = Rollout(c.m, star, star, cfg);
    const ScalarEstimate est = EmpiricalCost(long_traces);
    const double dev = std::abs(est.mean - c.nash_cost);
    return {PassIf(dev <= 3 * est.standard_error),
            "closed form " + Fmt(c.nash_cost) + ", simulated " + Fmt(est.mean) +
                " +- " + Fmt(est.standard_error) + " (" +
                std::to_string(est.samples) + " rollouts, T = 200)"};
  });
  c.Run("covariance_monte_carlo", [&]() -> std::pair<CheckStatus, std::string> {
    if (long_traces.empty()) return {CheckStatus::kFail, "no rollouts"};
    const CovarianceEstimate est = EmpiricalCovariance(long_traces);
    const Matrix exact = DiscountedCovariance(star, c.m, c.gamma).sigma;
    const Matrix z = (est.mean.sigma - exact).cwiseAbs().cwiseQuotient(
        est.standard_error.cwiseMax(1e-300));
    const double worst = z.maxCoeff();
    return {PassIf(worst <= 3.0),
            "largest entrywise deviation " + Fmt(worst) + " standard errors"};
  });
  c.Run("truncation_bound", [&]() -> std::pair<CheckStatus, std::string> {
    std::ostringstream detail;
    bool ok = true;
    for (int T : {10, 100}) {
      cfg.T = T;
      const auto traces = Rollout(c.m, star, star, cfg);
      const ScalarEstimate est = EmpiricalCost(traces);
      const double bound = TruncationCostBound(c.m, star, c.nash_cost, T);
      const double dev = std::abs(est.mean - c.nash_cost);
      ok = ok && dev <= bound;
      detail << "T=" << T << ": |J_T - J| = " << Fmt(dev) << " <= "
             << Fmt(bound) << "; ";
    }
    return {PassIf(ok), detail.str()};
  });
}

}  // namespace

std::string ToString(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kWarn: return "warn";
    case CheckStatus::kInapplicable: return "inapplicable";
    case CheckStatus::kFail: return "fail";
  }
  return "unknown";
}

std::vector<Policy> RandomStablePerturbations(const Policy& center,
                                              const LiftedModel& m, int count,
                                              double scale, std::uint64_t seed) {
  std::vector<Policy> out;
  const Matrix base = center.Concatenated();
  for (std::uint32_t draw = 0; static_cast<int>(out.size()) < count; ++draw) {
    if (draw > 1000u * static_cast<std::uint32_t>(count) + 1000u) {
      throw NumericalError("could not draw stable perturbations");
    }
    RandomStream stream(seed, draw, 0, 0);
    Matrix p = base;
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) += scale * stream.Normal();
    const Policy candidate = Policy::FromConcatenated(p);
    if (IsStable(candidate, m)) out.push_back(candidate);
  }
  return out;
}

double TruncationEpsilon(const LiftedModel& m, double cost, int T) {
  const double mu = MinSingularValue(m.sigma_x);
  const double q = MinSingularValue(m.Q_blk);
  return m.d_x() * cost * cost /
         ((1.0 - m.spec.gamma) * T * mu * q * q);
}

double TruncationCostBound(const LiftedModel& m, const Policy& policy,
                           double cost, int T) {
  const double theta = SpectralNorm(policy.Block());
  return TruncationEpsilon(m, cost, T) *
         (SpectralNorm(m.Q_blk) + SpectralNorm(m.R_blk) * theta * theta);
}

double NpgContractionBound(const LiftedModel& m, const Policy& nash,
                           double eta) {
  const Matrix sigma = DiscountedCovariance(nash, m, m.spec.gamma).sigma;
  return 1.0 - eta * MinSingularValue(m.sigma_x) * MinSingularValue(m.R_blk) /
                   SpectralNorm(sigma);
}

bool AllPassed(const std::vector<DiagnosticResult>& results) {
  return std::none_of(results.begin(), results.end(), [](const auto& r) {
    return r.status == CheckStatus::kFail;
  });
}

std::vector<DiagnosticResult> RunDiagnostics(const ExperimentConfig& config,
                                             const DiagnosticOptions& options) {
  Context c{config, options, Lift(config.game), config.game.gamma, {}, 0.0, {}};
  AddAssumptionChecks(c);
  AddNashChecks(c);
  AddGradientChecks(c);
  AddPlChecks(c);
  AddTrainingChecks(c);
  AddSimulationChecks(c);
  return c.results;
}

}  // namespace lqdeep
