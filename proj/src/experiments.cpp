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

#include "lqdeep/experiments.h"

#include <Eigen/Core>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "lqdeep/diagnostics.h"
#include "lqdeep/linalg.h"
#include "lqdeep/output.h"
#include "lqdeep/parallel.h"
#include "lqdeep/sim_engine.h"
#include "lqdeep/zeroth_order.h"

#ifndef LQDEEP_VERSION
#define LQDEEP_VERSION "unknown"
#endif

namespace lqdeep {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class Artifacts {
 public:
  explicit Artifacts(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " +
                              ec.message());
  }

  void Csv(const std::string& name, const CsvTable& table) {
    WriteCsv((dir_ / name).string(), table);
    files_.push_back(name);
  }

  void Svg(const std::string& name, const std::string& title,
           const std::string& x_label, const std::vector<double>& x,
           const std::vector<PlotSeries>& series, bool log_y) {
    WriteSvgPlot((dir_ / name).string(), title, x_label, x, series, log_y);
    files_.push_back(name);
  }

  void Metadata(const ExperimentConfig& config, const RunOptions& options,
                const json& summary) {
    json meta = {
        {"tool", "lqdeep"},
        {"version", LQDEEP_VERSION},
        {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." +
                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
        {"task", options.task},
        {"seed", config.seed},
        {"worker_threads", WorkerCount()},
        {"config", ToJson(config)},
        {"files", files_},
        {"summary", summary}};
    std::ofstream out(dir_ / "run_metadata.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write run_metadata.json");
    out << meta.dump(2) << '\n';
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::vector<std::string> Concat(std::vector<std::string> a,
                                const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<std::string> PolicyColumns(const LiftedModel& m,
                                       const std::string& prefix = "") {
  return Concat(GainColumns(prefix + "theta", m.d_u(), m.d_x()),
                GainColumns(prefix + "theta_bar", m.d_u(), m.d_x()));
}

std::vector<std::string> PolicyCells(const Policy& p) {
  return Concat(GainCells(p.theta), GainCells(p.theta_bar));
}

json PolicyJson(const Policy& p) {
  return {{"theta", ToJson(p.theta)}, {"theta_bar", ToJson(p.theta_bar)}};
}

Policy InitialPolicy(const ExperimentConfig& c) {
  return c.params.init.value_or(Policy::Zero(c.game.d_u, c.game.d_x));
}

void Report(std::ostream& out, const RunOptions& options, const json& summary,
            const std::string& text) {
  if (options.emit_json) {
    out << summary.dump() << '\n';
  } else {
    out << text;
  }
}

std::string Num(double v) { return FormatDouble(v); }

// First record whose |J - J*| is at or below `level`, or -1.
int FirstBelow(const TrainLog& log, double nash_cost, double level) {
  for (const auto& rec : log.iterations) {
    if (std::abs(rec.cost - nash_cost) <= level) return rec.k;
  }
  return -1;
}

int StatusExit(const TrainLog& log) {
  return log.terminal_status == TerminalStatus::kDestabilized ||
                 log.terminal_status == TerminalStatus::kStalled
             ? kExitNumericalFailure
             : kExitSuccess;
}

// Long-format plot data shared by the two training tasks.
void WriteTrainingPlots(Artifacts& art, const RunOptions& options,
                        const LiftedModel& m, const Policy& nash,
                        double nash_cost,
                        const std::vector<std::pair<std::string, TrainLog>>& runs) {
  CsvTable gap{{"method", "k", "abs_gap"}, {}};
  CsvTable policy{Concat(Concat({"method", "k"}, PolicyColumns(m)),
                         PolicyColumns(m, "nash_")),
                  {}};
  for (const auto& [name, log] : runs) {
    for (const auto& rec : log.iterations) {
      gap.AddRow({name, std::to_string(rec.k), Num(std::abs(rec.cost - nash_cost))});
      policy.AddRow(Concat(Concat({name, std::to_string(rec.k)}, PolicyCells(rec.policy)),
                           PolicyCells(nash)));
    }
  }
  art.Csv("plot_gap_vs_iteration.csv", gap);
  art.Csv("plot_policy_vs_iteration.csv", policy);
  if (!options.svg) return;

  std::vector<double> x;
  std::vector<PlotSeries> gaps, gains;
  std::size_t longest = 0;
  for (const auto& [name, log] : runs) longest = std::max(longest, log.iterations.size());
  for (std::size_t k = 0; k < longest; ++k) x.push_back(static_cast<double>(k));
  for (const auto& [name, log] : runs) {
    PlotSeries g{name + " |J-J*|", {}}, t{name + " theta", {}}, tb{name + " theta_bar", {}};
    for (const auto& rec : log.iterations) {
      g.y.push_back(std::abs(rec.cost - nash_cost));
      t.y.push_back(rec.policy.theta(0, 0));
      tb.y.push_back(rec.policy.theta_bar(0, 0));
    }
    gaps.push_back(g);
    gains.push_back(t);
    gains.push_back(tb);
  }
  gains.push_back({"theta*", std::vector<double>(longest, nash.theta(0, 0))});
  gains.push_back({"theta_bar*", std::vector<double>(longest, nash.theta_bar(0, 0))});
  art.Svg("plot_gap_vs_iteration.svg", "cost gap", "iteration", x, gaps, true);
  art.Svg("plot_policy_vs_iteration.svg", "gains (entry 0,0)", "iteration", x,
          gains, false);
}

int RunSolve(const ExperimentConfig& c, const RunOptions& options,
             std::ostream& out) {
  Artifacts art(options.output_dir);
  const LiftedModel m = Lift(c.game);
  const double gamma = c.game.gamma;
  std::ostringstream text;
  json checks = json::array();
  for (const auto& r : Validate(c.game)) {
    checks.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    text << (r.passed ? "  ok    " : "  WARN  ") << r.name << ": " << r.detail << '\n';
  }
  const NashSolution sol = SolveNash(m, gamma);
  const double cost = NashCost(sol, m, gamma);

  CsvTable table{Concat(Concat({"n"}, PolicyColumns(m)),
                        {"cost", "residual", "iterations", "cond_F", "cond_F_bar",
                         "contraction_estimate"}),
                 {}};
  table.AddRow(Concat(Concat({c.game.n.ToString()}, PolicyCells(sol.policy)),
                      {Num(cost), Num(sol.residual), std::to_string(sol.iterations),
                       Num(sol.cond_F), Num(sol.cond_F_bar),
                       Num(sol.contraction_estimate)}));
  art.Csv("nash.csv", table);

  json summary = {{"task", "solve"},
                  {"n", ToJson(c.game.n)},
                  {"policy", PolicyJson(sol.policy)},
                  {"cost", cost},
                  {"residual", sol.residual},
                  {"iterations", sol.iterations},
                  {"cond_F", sol.cond_F},
                  {"cond_F_bar", sol.cond_F_bar},
                  {"contraction_estimate", sol.contraction_estimate},
                  {"warnings", sol.warnings},
                  {"assumptions", checks}};
  text << "Nash equilibrium (n = " << c.game.n.ToString() << ", gamma = "
       << Num(gamma) << ")\n"
       << "  theta     = " << sol.policy.theta.format(Eigen::IOFormat(10)) << '\n'
       << "  theta_bar = " << sol.policy.theta_bar.format(Eigen::IOFormat(10)) << '\n'
       << "  cost      = " << Num(cost) << '\n'
       << "  residual  = " << Num(sol.residual) << " after " << sol.iterations
       << " iterations\n"
       << "  cond(F) = " << Num(sol.cond_F) << ", cond(F_bar) = "
       << Num(sol.cond_F_bar) << '\n';
  for (const auto& w : sol.warnings) text << "  warning: " << w << '\n';
  art.Metadata(c, options, summary);
  Report(out, options, summary, text.str());
  return kExitSuccess;
}

int RunTrainModelBased(const ExperimentConfig& c, const RunOptions& options,
                       std::ostream& out) {
  Artifacts art(options.output_dir);
  const LiftedModel m = Lift(c.game);
  const double gamma = c.game.gamma;
  const NashSolution nash = SolveNash(m, gamma);
  const double nash_cost = NashCost(nash, m, gamma);
  const Policy init = InitialPolicy(c);

  std::vector<std::string> methods;
  if (c.params.method == "both") {
    methods = {"gd", "npg"};
  } else {
    methods = {c.params.method};
  }

  std::vector<std::pair<std::string, TrainLog>> runs;
  json summary = {{"task", "train-mb"},
                  {"nash_policy", PolicyJson(nash.policy)},
                  {"nash_cost", nash_cost},
                  {"runs", json::array()}};
  std::ostringstream text;
  text << "Nash reference: cost " << Num(nash_cost) << '\n';
  int exit_code = kExitSuccess;
  for (const auto& name : methods) {
    ModelBasedOptions o;
    o.method = ParseMethod(name);
    o.eta = c.params.eta;
    o.max_iterations = c.params.iterations;
    o.stop_tol = c.params.stop_tol;
    o.nash_cost = nash_cost;
    TrainLog log = TrainModelBased(m, gamma, init, o);

    CsvTable table{Concat({"k", "J", "gap", "grad_norm", "rho", "step"},
                          PolicyColumns(m)),
                   {}};
    for (const auto& rec : log.iterations) {
      table.AddRow(Concat({std::to_string(rec.k), Num(rec.cost),
                           Num(rec.cost - nash_cost), Num(rec.grad_norm),
                           Num(rec.rho), Num(rec.step)},
                          PolicyCells(rec.policy)));
    }
    art.Csv("train_mb_" + name + ".csv", table);

    const auto& last = log.iterations.back();
    summary["runs"].push_back(
        {{"method", name},
         {"status", ToString(log.terminal_status)},
         {"message", log.message},
         {"iterations", last.k},
         {"final_policy", PolicyJson(last.policy)},
         {"final_abs_gap", std::abs(last.cost - nash_cost)},
         {"first_k_gap_1e-6", FirstBelow(log, nash_cost, 1e-6)},
         {"first_k_gap_1e-8", FirstBelow(log, nash_cost, 1e-8)}});
    text << name << ": " << ToString(log.terminal_status) << " after " << last.k
         << " iterations, |J - J*| = " << Num(std::abs(last.cost - nash_cost))
         << ", gap <= 1e-6 first at k = " << FirstBelow(log, nash_cost, 1e-6)
         << '\n';
    if (!log.message.empty()) text << "  " << log.message << '\n';
    exit_code = std::max(exit_code, StatusExit(log));
    runs.emplace_back(name, std::move(log));
  }
  WriteTrainingPlots(art, options, m, nash.policy, nash_cost, runs);
  art.Metadata(c, options, summary);
  Report(out, options, summary, text.str());
  return exit_code;
}

int RunTrainModelFree(const ExperimentConfig& c, const RunOptions& options,
                      std::ostream& out) {
  if (c.params.method == "both") {
    throw ConfigError("train-mf takes a single method (gd or npg)");
  }
  if (!c.params.eta) throw ConfigError("train-mf needs a numeric eta");
  Artifacts art(options.output_dir);
  const LiftedModel m = Lift(c.game);
  const double gamma = c.game.gamma;
  const NashSolution nash = SolveNash(m, gamma);
  const double nash_cost = NashCost(nash, m, gamma);

  ModelFreeOptions o;
  o.method = ParseMethod(c.params.method);
  o.eta = *c.params.eta;
  o.iterations = c.params.iterations;
  o.smoothing.r = c.params.r;
  o.smoothing.L = c.params.L;
  o.smoothing.T = c.params.T;
  o.smoothing.rollouts_per_perturbation = c.params.rollouts_per_perturbation;
  o.smoothing.learner_index = c.params.learner - 1;
  o.random_learner = c.params.random_learner;
  o.seed = c.seed;
  TrainLog log = TrainModelFree(m, InitialPolicy(c), o);

  CsvTable table{Concat({"k", "J", "gap", "empirical_cost", "grad_norm", "rho",
                         "step", "rejected"},
                        PolicyColumns(m)),
                 {}};
  for (const auto& rec : log.iterations) {
    table.AddRow(Concat({std::to_string(rec.k), Num(rec.cost),
                         Num(rec.cost - nash_cost), Num(rec.empirical_cost),
                         Num(rec.grad_norm), Num(rec.rho), Num(rec.step),
                         std::to_string(rec.rejected)},
                        PolicyCells(rec.policy)));
  }
  art.Csv("train_mf_" + c.params.method + ".csv", table);

  const auto& last = log.iterations.back();
  const Matrix err = last.policy.Concatenated() - nash.policy.Concatenated();
  json summary = {{"task", "train-mf"},
                  {"method", c.params.method},
                  {"status", ToString(log.terminal_status)},
                  {"message", log.message},
                  {"iterations", last.k},
                  {"final_policy", PolicyJson(last.policy)},
                  {"nash_policy", PolicyJson(nash.policy)},
                  {"max_abs_policy_error", err.cwiseAbs().maxCoeff()},
                  {"final_cost", last.cost},
                  {"nash_cost", nash_cost}};
  std::ostringstream text;
  text << "model-free " << c.params.method << ": " << ToString(log.terminal_status)
       << " after " << last.k << " iterations\n"
       << "  final theta = " << last.policy.theta.format(Eigen::IOFormat(10))
       << ", theta_bar = " << last.policy.theta_bar.format(Eigen::IOFormat(10))
       << '\n'
       << "  Nash  theta = " << nash.policy.theta.format(Eigen::IOFormat(10))
       << ", theta_bar = " << nash.policy.theta_bar.format(Eigen::IOFormat(10))
       << '\n'
       << "  largest gain error " << Num(err.cwiseAbs().maxCoeff()) << '\n';
  if (!log.message.empty()) text << "  " << log.message << '\n';
  const int code = StatusExit(log);
  WriteTrainingPlots(art, options, m, nash.policy, nash_cost,
                     {{c.params.method, std::move(log)}});
  art.Metadata(c, options, summary);
  Report(out, options, summary, text.str());
  return code;
}

int RunSimulate(const ExperimentConfig& c, const RunOptions& options,
                std::ostream& out) {
  Artifacts art(options.output_dir);
  const LiftedModel m = Lift(c.game);
  const double gamma = c.game.gamma;
  Policy policy;
  if (options.policy_source == "nash") {
    policy = SolveNash(m, gamma).policy;
  } else if (options.policy_source == "init") {
    policy = InitialPolicy(c);
  } else {
    throw ConfigError("policy source must be nash or init");
  }

  RolloutConfig cfg;
  cfg.T = c.params.T;
  cfg.n_rollouts = c.params.rollouts;
  cfg.seed = c.seed;
  cfg.learner_index = c.params.learner - 1;
  cfg.random_learner = c.params.random_learner;
  cfg.record_trajectory = false;
  const auto traces = Rollout(m, policy, policy, cfg);
  const ScalarEstimate est = EmpiricalCost(traces);

  CsvTable table{{"rollout", "learner", "discounted_cost", "diverged"}, {}};
  for (std::size_t r = 0; r < traces.size(); ++r) {
    table.AddRow({std::to_string(r), std::to_string(traces[r].learner + 1),
                  Num(traces[r].discounted_cost),
                  traces[r].diverged ? "1" : "0"});
  }
  art.Csv("simulate.csv", table);

  if (options.trace) {
    RolloutConfig one = cfg;
    one.n_rollouts = 1;
    one.record_trajectory = true;
    const RolloutTrace tr = Rollout(m, policy, policy, one).front();
    const int dx = m.d_x(), du = m.d_u();
    std::vector<std::string> header{"t"};
    for (int i = 0; i < dx; ++i) header.push_back("x_delta_" + std::to_string(i));
    for (int i = 0; i < dx; ++i) header.push_back("x_mean_" + std::to_string(i));
    for (int i = 0; i < du; ++i) header.push_back("u_delta_" + std::to_string(i));
    for (int i = 0; i < du; ++i) header.push_back("u_mean_" + std::to_string(i));
    header.push_back("cost");
    CsvTable trace{header, {}};
    for (std::size_t t = 0; t < tr.per_step_costs.size(); ++t) {
      std::vector<std::string> row{std::to_string(t + 1)};
      const auto col = static_cast<Eigen::Index>(t);
      for (Eigen::Index i = 0; i < 2 * dx; ++i) row.push_back(Num(tr.lifted_states(i, col)));
      for (Eigen::Index i = 0; i < 2 * du; ++i) row.push_back(Num(tr.lifted_actions(i, col)));
      row.push_back(Num(tr.per_step_costs[t]));
      trace.AddRow(row);
    }
    art.Csv("trace.csv", trace);
  }

  const double exact = PolicyCost(policy, m, gamma);
  json summary = {{"task", "simulate"},
                  {"policy", PolicyJson(policy)},
                  {"T", cfg.T},
                  {"rollouts", est.samples},
                  {"diverged", est.diverged},
                  {"mean_cost", est.mean},
                  {"standard_error", est.standard_error},
                  {"closed_form_cost", exact}};
  std::ostringstream text;
  text << "simulated " << est.samples << " rollouts (T = " << cfg.T << ", "
       << est.diverged << " diverged)\n"
       << "  mean discounted cost " << Num(est.mean) << " +- "
       << Num(est.standard_error) << '\n'
       << "  closed-form cost     " << Num(exact) << '\n';
  art.Metadata(c, options, summary);
  Report(out, options, summary, text.str());
  return kExitSuccess;
}

int RunSweep(const ExperimentConfig& c, const RunOptions& options,
             std::ostream& out) {
  Artifacts art(options.output_dir);
  const double gamma = c.game.gamma;
  std::vector<PlayerCount> ns = c.params.sweep_n;
  if (ns.empty()) {
    for (int n : {2, 5, 10, 20, 100}) ns.push_back(PlayerCount::Finite(n));
  }

  GameSpec limit_spec = c.game;
  limit_spec.n = PlayerCount::Infinite();
  const LiftedModel limit_model = Lift(limit_spec);
  Policy limit;
  std::string limit_source;
  try {
    limit = DecoupledInfinite(limit_model, gamma);
    limit_source = "decoupled Riccati pair";
  } catch (const ConfigError&) {
    limit = SolveNash(limit_model, gamma).policy;
    limit_source = "coupled solver at n = infinite";
  }

  const LiftedModel base = Lift(c.game);
  CsvTable table{Concat(Concat({"n"}, PolicyColumns(base)),
                        {"cost", "gap_to_limit", "iterations"}),
                 {}};
  CsvTable plot{Concat(Concat({"n"}, PolicyColumns(base)), PolicyColumns(base, "limit_")),
                {}};
  json rows = json::array();
  std::ostringstream text;
  text << "limit (n = infinite) from " << limit_source << ": theta = "
       << limit.theta.format(Eigen::IOFormat(10))
       << ", theta_bar = " << limit.theta_bar.format(Eigen::IOFormat(10)) << '\n';
  std::vector<double> xs;
  PlotSeries theta{"theta(n)", {}}, theta_bar{"theta_bar(n)", {}};
  for (const auto& n : ns) {
    GameSpec s = c.game;
    s.n = n;
    const LiftedModel m = Lift(s);
    const NashSolution sol = SolveNash(m, gamma);
    const double cost = NashCost(sol, m, gamma);
    const double gap = (sol.policy.Concatenated() - limit.Concatenated()).norm();
    table.AddRow(Concat(Concat({n.ToString()}, PolicyCells(sol.policy)),
                        {Num(cost), Num(gap), std::to_string(sol.iterations)}));
    plot.AddRow(Concat(Concat({n.ToString()}, PolicyCells(sol.policy)),
                       PolicyCells(limit)));
    rows.push_back({{"n", ToJson(n)}, {"policy", PolicyJson(sol.policy)},
                    {"cost", cost}, {"gap_to_limit", gap}});
    text << "  n = " << n.ToString() << ": theta = "
         << sol.policy.theta.format(Eigen::IOFormat(10)) << ", theta_bar = "
         << sol.policy.theta_bar.format(Eigen::IOFormat(10)) << ", gap "
         << Num(gap) << '\n';
    if (!n.is_infinite()) {
      xs.push_back(static_cast<double>(n.value()));
      theta.y.push_back(sol.policy.theta(0, 0));
      theta_bar.y.push_back(sol.policy.theta_bar(0, 0));
    }
  }
  art.Csv("sweep_n.csv", table);
  art.Csv("plot_policy_vs_n.csv", plot);
  if (options.svg) {
    art.Svg("plot_policy_vs_n.svg", "gains vs player count", "n", xs,
            {theta, theta_bar,
             {"theta(inf)", std::vector<double>(xs.size(), limit.theta(0, 0))},
             {"theta_bar(inf)",
              std::vector<double>(xs.size(), limit.theta_bar(0, 0))}},
            false);
  }
  json summary = {{"task", "sweep-n"},
                  {"limit", PolicyJson(limit)},
                  {"limit_source", limit_source},
                  {"rows", rows}};
  art.Metadata(c, options, summary);
  Report(out, options, summary, text.str());
  return kExitSuccess;
}

int RunCheck(const ExperimentConfig& c, const RunOptions& options,
             std::ostream& out) {
  Artifacts art(options.output_dir);
  DiagnosticOptions d;
  d.corrupt_gradient = options.corrupt_gradient;
  const auto results = RunDiagnostics(c, d);
  CsvTable table{{"check", "status", "detail"}, {}};
  json list = json::array();
  std::ostringstream text;
  for (const auto& r : results) {
    table.AddRow({CsvEscape(r.name), ToString(r.status), CsvEscape(r.detail)});
    list.push_back({{"check", r.name}, {"status", ToString(r.status)}, {"detail", r.detail}});
    text << "  " << ToString(r.status);
    for (std::size_t pad = ToString(r.status).size(); pad < 13; ++pad) text << ' ';
    text << r.name << ": " << r.detail << '\n';
  }
  const bool ok = AllPassed(results);
  text << (ok ? "all checks passed\n" : "some checks FAILED\n");
  art.Csv("check.csv", table);
  json summary = {{"task", "check"}, {"passed", ok}, {"checks", list}};
  art.Metadata(c, options, summary);
  Report(out, options, summary, text.str());
  return ok ? kExitSuccess : kExitNumericalFailure;
}

}  // namespace

std::vector<std::string> TaskNames() {
  return {"solve", "train-mb", "train-mf", "simulate", "sweep-n", "check"};
}

int RunExperiment(const ExperimentConfig& config, const RunOptions& options,
                  std::ostream& out) {
  if (options.task == "solve") return RunSolve(config, options, out);
  if (options.task == "train-mb") return RunTrainModelBased(config, options, out);
  if (options.task == "train-mf") return RunTrainModelFree(config, options, out);
  if (options.task == "simulate") return RunSimulate(config, options, out);
  if (options.task == "sweep-n") return RunSweep(config, options, out);
  if (options.task == "check") return RunCheck(config, options, out);
  throw ConfigError("unknown task '" + options.task +
                    "' (expected solve, train-mb, train-mf, simulate, sweep-n "
                    "or check)");
}

}  // namespace lqdeep
