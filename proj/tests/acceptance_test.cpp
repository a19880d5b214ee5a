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
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any selected criterion fails. Usage:
//
//   acceptance_test                 all criteria
//   acceptance_test --criterion 7   one criterion
//   acceptance_test --criterion 9 --full   the long model-free run
//
// Tolerances and runtime budgets are fixed here and never relaxed.
//
///////////////////////////////////////////////////////////////////////////////

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lqdeep/config.h"
#include "lqdeep/counter_rng.h"
#include "lqdeep/diagnostics.h"
#include "lqdeep/linalg.h"
#include "lqdeep/zeroth_order.h"
#include "oracles.h"

namespace lqdeep {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string Num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

struct Preset {
  ExperimentConfig config;
  LiftedModel m;
  NashSolution nash;
  double cost = 0.0;
};

Preset Load(const std::string& name) {
  Preset p{LoadPreset(name), {}, {}, 0.0};
  p.m = Lift(p.config.game);
  p.nash = SolveNash(p.m, p.config.game.gamma);
  p.cost = NashCost(p.nash, p.m, p.config.game.gamma);
  return p;
}

// 1. Gradient at the solver's equilibrium vanishes on every preset.
Outcome NashStationarity() {
  Outcome o{true, ""};
  for (const std::string& name : PresetNames()) {
    const Preset p = Load(name);
    const double g =
        ExactGradient(p.nash.policy, p.m, p.config.game.gamma).FrobeniusNorm();
    const double tol = 1e-6 * (1 + p.nash.policy.FrobeniusNorm());
    o.pass = o.pass && g <= tol;
    o.detail += name + " |grad|=" + Num(g) + " (tol " + Num(tol) + ") ";
  }
  return o;
}

// 2. Exact gradient against central differences on random stable games.
Outcome GradientOracle() {
  std::mt19937_64 rng(20260101);
  std::normal_distribution<double> N(0, 1);
  const std::vector<PlayerCount> counts = {
      PlayerCount::Finite(2), PlayerCount::Finite(10), PlayerCount::Infinite()};
  const double h = 1e-5, gamma = 0.9;
  double worst = 0;
  int games = 0;
  while (games < 20) {
    const int dx = 1 + static_cast<int>(rng() % 3);
    const int du = 1 + static_cast<int>(rng() % 3);
    const GameSpec s = oracle::RandomGame(rng, dx, du, counts[games % 3], gamma);
    const LiftedModel m = Lift(s);
    Policy p = Policy::Zero(du, dx);
    for (int i = 0; i < p.theta.size(); ++i) p.theta.data()[i] = 0.2 * N(rng);
    for (int i = 0; i < p.theta_bar.size(); ++i) {
      p.theta_bar.data()[i] = 0.2 * N(rng);
    }
    if (!IsStable(p, m)) continue;
    ++games;
    const Matrix g = ExactGradient(p, m, gamma).Concatenated();
    const Matrix base = p.Concatenated();
    Matrix fd(base.rows(), base.cols());
    for (int i = 0; i < base.size(); ++i) {
      Matrix up = base, down = base;
      up.data()[i] += h;
      down.data()[i] -= h;
      // The learner's cost with everyone else held at p.
      fd.data()[i] =
          (DeviationCost(Policy::FromConcatenated(up), p, m, gamma) -
           DeviationCost(Policy::FromConcatenated(down), p, m, gamma)) /
          (2 * h);
    }
    worst = std::max(worst, (g - fd).norm() / fd.norm());
  }
  return {worst <= 1e-4, "20 games, worst relative error " + Num(worst) +
                             " (tol 1e-4)"};
}

// 3. Example 1 with eta = 0.1: both methods reach gap 1e-8 within 10^4
// iterations, NPG reaches 1e-6 strictly sooner.
Outcome ModelBasedConvergence() {
  const Preset p = Load("example1");
  const double gamma = p.config.game.gamma;
  auto first_below = [&](const TrainLog& log, double tol) {
    for (const auto& r : log.iterations) {
      if (std::abs(r.cost - p.cost) <= tol) return r.k;
    }
    return -1;
  };
  ModelBasedOptions opt;
  opt.eta = 0.1;
  opt.max_iterations = 10000;
  opt.stop_tol = 1e-8;
  opt.nash_cost = p.cost;
  const Policy init = p.config.params.init.value_or(Policy::Zero(1, 1));
  const TrainLog gd = TrainModelBased(p.m, gamma, init, opt);
  opt.method = Method::kNpg;
  const TrainLog npg = TrainModelBased(p.m, gamma, init, opt);
  const int gd8 = first_below(gd, 1e-8), npg8 = first_below(npg, 1e-8);
  const int gd6 = first_below(gd, 1e-6), npg6 = first_below(npg, 1e-6);
  const bool pass = gd8 >= 0 && npg8 >= 0 && gd6 >= 0 && npg6 >= 0 &&
                    npg6 < gd6;
  return {pass, "GD: gap<=1e-6 at k=" + std::to_string(gd6) + ", <=1e-8 at k=" +
                    std::to_string(gd8) + "; NPG: gap<=1e-6 at k=" +
                    std::to_string(npg6) + ", <=1e-8 at k=" +
                    std::to_string(npg8)};
}

// 4. Per-iteration NPG gap ratio under the constant step size, for every
// preset whose R_blk is nonsingular.
Outcome NpgContraction() {
  Outcome o{true, ""};
  int applicable = 0;
  for (const std::string& name : PresetNames()) {
    const Preset p = Load(name);
    const double r_min = MinSingularValue(p.m.R_blk);
    if (!(r_min > kPsdTolerance)) {
      o.detail += name + " sigma_min(R_blk)=" + Num(r_min) + " (excluded); ";
      continue;
    }
    ++applicable;
    const double gamma = p.config.game.gamma;
    const Policy init = p.config.params.init.value_or(Policy::Zero(1, 1));
    const double mu = InitialMomentFloor(p.m);
    const double eta =
        NpgStepSize(p.m, gamma, PolicyCost(init, p.m, gamma), mu);
    const double bound = NpgContractionBound(p.m, p.nash.policy, eta) + 1e-9;
    ModelBasedOptions opt;
    opt.method = Method::kNpg;
    opt.eta = eta;
    opt.max_iterations = 2000;
    opt.nash_cost = p.cost;
    const TrainLog log = TrainModelBased(p.m, gamma, init, opt);
    double worst = 0;
    for (std::size_t k = 1; k < log.iterations.size(); ++k) {
      const double prev = log.iterations[k - 1].cost - p.cost;
      const double next = log.iterations[k].cost - p.cost;
      if (std::abs(prev) < 1e-13) break;
      worst = std::max(worst, next / prev);
    }
    o.pass = o.pass && worst <= bound &&
             log.terminal_status != TerminalStatus::kDestabilized;
    o.detail += name + " worst ratio " + Num(worst) + " vs " + Num(bound) + "; ";
  }
  if (applicable == 0) o.detail += "no preset has sigma_min(R_blk) > 0";
  return o;
}

// 5. PL inequality on 100 stable perturbations of Example 2, finite n with
// L1 = n^2 ||Sigma*|| / (4 mu^2 sigma_min(R_blk)) and at infinite n with the
// decoupled constant.
Outcome PlInequality() {
  Outcome o{true, ""};
  {
    const Preset p = Load("example2");
    const double gamma = p.config.game.gamma;
    const double n = static_cast<double>(p.m.n().value());
    const double mu = InitialMomentFloor(p.m);
    const double sigma_norm =
        SpectralNorm(DiscountedCovariance(p.nash.policy, p.m, gamma).sigma);
    const double r_min = MinSingularValue(p.m.R_blk);
    const double l1 = n * n * sigma_norm / (4 * mu * mu * r_min);
    int held = 0;
    const auto perturbed =
        RandomStablePerturbations(p.nash.policy, p.m, 100, 0.3, 5);
    for (const Policy& q : perturbed) {
      const double gap = PolicyCost(q, p.m, gamma) - p.cost;
      const double g = ExactGradient(q, p.m, gamma).FrobeniusNorm();
      if (gap <= l1 * g * g) ++held;
    }
    o.pass = held == 100;
    o.detail += "n=10: " + std::to_string(held) + "/100 (L1=" + Num(l1) +
                ", sigma_min(R_blk)=" + Num(r_min) + "); ";
  }
  {
    ExperimentConfig c = LoadPreset("example2");
    c.game.n = PlayerCount::Infinite();
    const LiftedModel m = Lift(c.game);
    const NashSolution nash = SolveNash(m, c.game.gamma);
    int held = 0;
    double constant = 0;
    bool applicable = true;
    for (const Policy& q : RandomStablePerturbations(nash.policy, m, 100, 0.3, 6)) {
      const PlReport r = PlCheck(q, nash, m, c.game.gamma);
      applicable = applicable && r.applicable;
      constant = r.constant;
      if (r.applicable && r.holds) ++held;
    }
    o.pass = o.pass && applicable && held == 100;
    o.detail += "infinite n: " + std::to_string(held) + "/100 (L1=" +
                Num(constant) + ")";
  }
  return o;
}

// 6. Truncation: |J_T - J| <= eps_bar(T) and ||Sigma_T - Sigma|| <= eps(T)
// + 3 standard errors, Example 2 at equilibrium, 10^4 rollouts per T.
Outcome Truncation() {
  const Preset p = Load("example2");
  const double gamma = p.config.game.gamma;
  const Matrix sigma = DiscountedCovariance(p.nash.policy, p.m, gamma).sigma;
  Outcome o{true, ""};
  for (int T : {10, 100, 1000}) {
    RolloutConfig cfg;
    cfg.T = T;
    cfg.n_rollouts = 10000;
    cfg.seed = DeriveSeed(p.config.seed, 6, T);
    cfg.record_trajectory = false;
    const auto traces = Rollout(p.m, p.nash.policy, p.nash.policy, cfg);
    const ScalarEstimate cost = EmpiricalCost(traces);
    const CovarianceEstimate cov = EmpiricalCovariance(traces);
    const double eps = TruncationEpsilon(p.m, p.cost, T);
    const double eps_bar = TruncationCostBound(p.m, p.nash.policy, p.cost, T);
    const double dj = std::abs(cost.mean - p.cost);
    const double ds = SpectralNorm(cov.mean.sigma - sigma);
    const double ds_bound = eps + 3 * cov.standard_error.norm();
    o.pass = o.pass && dj <= eps_bar && ds <= ds_bound;
    o.detail += "T=" + std::to_string(T) + ": |dJ|=" + Num(dj) + "<=" +
                Num(eps_bar) + ", |dSigma|=" + Num(ds) + "<=" + Num(ds_bound) +
                "; ";
  }
  return o;
}

// 7. Equilibrium cost formula against simulation, Example 2.
Outcome CostFormula() {
  const Preset p = Load("example2");
  RolloutConfig cfg;
  cfg.T = 200;
  cfg.n_rollouts = 10000;
  cfg.seed = p.config.seed;
  cfg.record_trajectory = false;
  const ScalarEstimate est =
      EmpiricalCost(Rollout(p.m, p.nash.policy, p.nash.policy, cfg));
  const double dev = std::abs(est.mean - p.cost);
  const bool pass = dev <= 3 * est.standard_error && dev <= 0.01 * p.cost;
  return {pass, "J*=" + Num(p.cost) + ", simulated " + Num(est.mean) + " +- " +
                    Num(est.standard_error) + " (" + Num(dev / est.standard_error) +
                    " SE, " + Num(100 * dev / p.cost) + "%)"};
}

// 8. Mean-field limit on Example 3.
Outcome MeanFieldLimit() {
  ExperimentConfig c = LoadPreset("example3");
  const double gamma = c.game.gamma;
  GameSpec limit_spec = c.game;
  limit_spec.n = PlayerCount::Infinite();
  const Policy limit = DecoupledInfinite(Lift(limit_spec), gamma);
  Outcome o{true, ""};
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {2, 5, 10, 20, 100}) {
    GameSpec s = c.game;
    s.n = PlayerCount::Finite(n);
    const Policy p = SolveNash(Lift(s), gamma).policy;
    const double gap = (p.Concatenated() - limit.Concatenated()).norm();
    o.pass = o.pass && gap < prev;
    prev = gap;
    o.detail += "n=" + std::to_string(n) + ":" + Num(gap) + " ";
  }
  GameSpec big = c.game;
  big.n = PlayerCount::Finite(10000);
  const Policy p = SolveNash(Lift(big), gamma).policy;
  const double gap = (p.Concatenated() - limit.Concatenated()).cwiseAbs().maxCoeff();
  o.pass = o.pass && gap <= 1e-3;
  o.detail += "; n=1e4 vs decoupled " + Num(gap) + " (tol 1e-3)";
  return o;
}

// 9. Model-free GD on Example-2 dynamics. Desk scale: L=200, T=50, 500
// iterations, 10 seeds, success when both gains land within 0.05. The full
// run uses the preset parameters unchanged on one seed.
Outcome ModelFree(bool full) {
  const Preset p = Load("example2");
  const TaskParams& t = p.config.params;
  ModelFreeOptions opt;
  opt.method = Method::kGd;
  opt.eta = *t.eta;
  opt.smoothing.r = t.r;
  opt.smoothing.L = full ? t.L : 200;
  opt.smoothing.T = full ? t.T : 50;
  opt.iterations = full ? t.iterations : 500;
  const Policy init = t.init.value_or(Policy::Zero(1, 1));
  const int seeds = full ? 1 : 10;
  int hits = 0;
  std::string detail;
  for (int s = 1; s <= seeds; ++s) {
    opt.seed = static_cast<std::uint64_t>(s);
    std::string where;
    try {
      const TrainLog log = TrainModelFree(p.m, init, opt);
      const Policy& last = log.iterations.back().policy;
      const double d1 = std::abs(last.theta(0, 0) - p.nash.policy.theta(0, 0));
      const double d2 =
          std::abs(last.theta_bar(0, 0) - p.nash.policy.theta_bar(0, 0));
      if (log.terminal_status != TerminalStatus::kDestabilized && d1 <= 0.05 &&
          d2 <= 0.05) {
        ++hits;
      }
      where = "(" + Num(last.theta(0, 0)) + "," + Num(last.theta_bar(0, 0)) + ")";
    } catch (const NumericalError& e) {
      where = std::string("error: ") + e.what();
    }
    detail += "seed " + std::to_string(s) + " " + where + "; ";
  }
  const int needed = full ? 1 : 8;
  return {hits >= needed,
          std::to_string(hits) + "/" + std::to_string(seeds) +
              " within 0.05 of Nash (" + Num(p.nash.policy.theta(0, 0)) + "," +
              Num(p.nash.policy.theta_bar(0, 0)) + "), need " +
              std::to_string(needed) + ". " + detail};
}

// 10. Zeroth-order estimator error shrinks with L at r = 0.05, T = 100.
Outcome EstimatorConsistency() {
  const Preset p = Load("example2");
  const Policy at = p.config.params.init.value_or(Policy::Zero(1, 1));
  const Matrix exact =
      ExactGradient(at, p.m, p.config.game.gamma).Concatenated();
  Outcome o{true, ""};
  double prev = std::numeric_limits<double>::infinity();
  for (int L : {100, 1000, 10000}) {
    std::vector<double> errors;
    for (int rep = 0; rep < 20; ++rep) {
      SmoothingConfig sm;
      sm.r = 0.05;
      sm.T = 100;
      sm.L = L;
      const GradientEstimate est =
          EmpiricalGradient(at, p.m, sm, DeriveSeed(p.config.seed, L, rep));
      errors.push_back((est.gradient.Concatenated() - exact).norm());
    }
    std::nth_element(errors.begin(), errors.begin() + 10, errors.end());
    const double upper = errors[10];
    std::nth_element(errors.begin(), errors.begin() + 9, errors.begin() + 10);
    const double median = 0.5 * (errors[9] + upper);
    o.pass = o.pass && median < prev;
    prev = median;
    o.detail += "L=" + std::to_string(L) + ": median error " + Num(median) + "; ";
  }
  return o;
}

// 11. Every subcommand, run twice with the same config and seed, writes
// byte-identical CSVs. The second run uses a different worker count.
Outcome Determinism() {
  const std::vector<std::string> runs = {
      "solve --preset example1",
      "train-mb --preset example1 --method both",
      "train-mf --preset example2 --iterations 5 --L 50 --T 20",
      "simulate --preset example2 --rollouts 200 --T 50 --trace",
      "sweep-n --preset example3",
      "check --preset example3",
  };
  const fs::path root = fs::temp_directory_path() / "lqdeep_acceptance_c11";
  fs::remove_all(root);
  Outcome o{true, ""};
  int compared = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / (std::to_string(i) + "_" + std::to_string(rep));
      const std::string env = rep == 0 ? "LQDEEP_NUM_THREADS=1 "
                                       : "LQDEEP_NUM_THREADS=3 ";
      const std::string cmd = env + LQDEEP_CLI_PATH + " " + runs[i] +
                              " --seed 7 --out " + dir.string() +
                              " >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        o.pass = false;
        o.detail += "'" + runs[i] + "' exited abnormally; ";
      }
      dirs.push_back(dir);
    }
    int csvs = 0;
    if (fs::exists(dirs[0])) {
      for (const auto& entry : fs::directory_iterator(dirs[0])) {
        if (entry.path().extension() != ".csv") continue;
        ++csvs;
        std::ifstream a(entry.path(), std::ios::binary);
        std::ifstream b(dirs[1] / entry.path().filename(), std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        if (!b || sa.str() != sb.str()) {
          o.pass = false;
          o.detail += entry.path().filename().string() + " differs; ";
        }
      }
    }
    if (csvs == 0) {
      o.pass = false;
      o.detail += "'" + runs[i] + "' wrote no CSV; ";
    }
    compared += csvs;
  }
  o.detail += std::to_string(compared) + " CSV pairs compared over " +
              std::to_string(runs.size()) + " subcommands";
  return o;
}

}  // namespace
}  // namespace lqdeep

int main(int argc, char** argv) {
  using namespace lqdeep;
  int only = 0;
  bool full = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (arg == "--full") {
      full = true;
    } else {
      std::cerr << "usage: acceptance_test [--criterion N] [--full]\n";
      return 64;
    }
  }
  const std::vector<Criterion> criteria = {
      {1, "nash_stationarity", 1, NashStationarity},
      {2, "gradient_oracle", 30, GradientOracle},
      {3, "model_based_convergence", 10, ModelBasedConvergence},
      {4, "npg_contraction", 10, NpgContraction},
      {5, "pl_inequality", 30, PlInequality},
      {6, "truncation_bounds", 120, Truncation},
      {7, "cost_formula_vs_simulation", 60, CostFormula},
      {8, "mean_field_limit", 10, MeanFieldLimit},
      {9, full ? "model_free_convergence_full" : "model_free_convergence",
       full ? 36000.0 : 600.0, [full] { return ModelFree(full); }},
      {10, "estimator_consistency", 300, EstimatorConsistency},
      {11, "determinism", 60, Determinism},
  };
  int failures = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const bool in_budget = elapsed < c.budget_seconds;
    const bool pass = o.pass && in_budget;
    if (!pass) ++failures;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " "
              << c.name << ": " << o.detail << " [" << Num(elapsed) << " s, budget "
              << c.budget_seconds << " s" << (in_budget ? "" : ", OVER BUDGET")
              << "]" << std::endl;
  }
  if (ran == 0) {
    std::cerr << "no criterion " << only << "\n";
    return 64;
  }
  return failures == 0 ? 0 : 1;
}
