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

#include "lqdeep/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "presets.h"

namespace lqdeep {
namespace {

using nlohmann::json;

void RejectUnknownKeys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

Matrix ParseMatrix(const json& value, const std::string& key) {
  if (value.is_number()) {
    Matrix m(1, 1);
    m(0, 0) = value.get<double>();
    return m;
  }
  if (!value.is_array() || value.empty()) {
    throw ConfigError(key + " must be a non-empty nested array");
  }
  const auto rows = static_cast<Eigen::Index>(value.size());
  if (!value[0].is_array()) {
    throw ConfigError(key + " must be a row-major nested array");
  }
  const auto cols = static_cast<Eigen::Index>(value[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = value[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(key + " has ragged rows");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      const json& entry = row[static_cast<std::size_t>(j)];
      if (!entry.is_number()) throw ConfigError(key + " has a non-numeric entry");
      m(i, j) = entry.get<double>();
    }
  }
  return m;
}

Vector ParseVector(const json& value, const std::string& key) {
  if (value.is_number()) return Vector::Constant(1, value.get<double>());
  if (!value.is_array()) throw ConfigError(key + " must be an array");
  Vector v(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number()) throw ConfigError(key + " has a non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = value[i].get<double>();
  }
  return v;
}

template <typename T>
T Get(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad or missing '" + key + "' in " + where + ": " +
                      e.what());
  }
}

GameSpec ParseGame(const json& g) {
  RejectUnknownKeys(g,
                    {"d_x", "d_u", "n", "gamma", "A", "A_bar", "B", "B_bar",
                     "Q", "S_x", "Q_bar", "R", "S_u", "R_bar", "init_mean",
                     "init_cov", "noise_cov"},
                    "game");
  const int dx = Get<int>(g, "d_x", "game");
  const int du = Get<int>(g, "d_u", "game");
  if (dx < 1 || du < 1) throw ConfigError("d_x and d_u must be positive");
  if (!g.contains("n")) throw ConfigError("missing 'n' in game");
  GameSpec s = GameSpec::Zeros(dx, du, ParsePlayerCount(g.at("n")),
                               Get<double>(g, "gamma", "game"));
  for (const char* required : {"A", "B", "Q", "R", "init_mean", "init_cov"}) {
    if (!g.contains(required)) {
      throw ConfigError(std::string("missing '") + required + "' in game");
    }
  }
  const std::pair<const char*, Matrix*> matrices[] = {
      {"A", &s.A},     {"A_bar", &s.A_bar}, {"B", &s.B},
      {"B_bar", &s.B_bar}, {"Q", &s.Q},     {"S_x", &s.S_x},
      {"Q_bar", &s.Q_bar}, {"R", &s.R},     {"S_u", &s.S_u},
      {"R_bar", &s.R_bar}, {"init_cov", &s.init_cov},
      {"noise_cov", &s.noise_cov}};
  for (const auto& [key, target] : matrices) {
    if (g.contains(key)) *target = ParseMatrix(g.at(key), key);
  }
  s.init_mean = ParseVector(g.at("init_mean"), "init_mean");
  return s;
}

TaskParams ParseParams(const json& p, const GameSpec& game) {
  RejectUnknownKeys(p,
                    {"method", "eta", "iterations", "stop_tol", "T", "L", "r",
                     "rollouts_per_perturbation", "rollouts", "learner",
                     "random_learner", "init_theta", "init_theta_bar",
                     "sweep_n"},
                    "params");
  TaskParams t;
  if (p.contains("method")) t.method = Get<std::string>(p, "method", "params");
  if (p.contains("eta")) {
    const json& eta = p.at("eta");
    if (eta.is_string() && eta.get<std::string>() == "auto") {
      t.eta.reset();
    } else if (eta.is_number()) {
      t.eta = eta.get<double>();
    } else {
      throw ConfigError("eta must be a number or \"auto\"");
    }
  }
  if (p.contains("iterations")) t.iterations = Get<int>(p, "iterations", "params");
  if (p.contains("stop_tol")) t.stop_tol = Get<double>(p, "stop_tol", "params");
  if (p.contains("T")) t.T = Get<int>(p, "T", "params");
  if (p.contains("L")) t.L = Get<int>(p, "L", "params");
  if (p.contains("r")) t.r = Get<double>(p, "r", "params");
  if (p.contains("rollouts_per_perturbation")) {
    t.rollouts_per_perturbation =
        Get<int>(p, "rollouts_per_perturbation", "params");
  }
  if (p.contains("rollouts")) t.rollouts = Get<int>(p, "rollouts", "params");
  if (p.contains("learner")) t.learner = Get<int>(p, "learner", "params");
  if (p.contains("random_learner")) {
    t.random_learner = Get<bool>(p, "random_learner", "params");
  }
  if (p.contains("init_theta") || p.contains("init_theta_bar")) {
    if (!p.contains("init_theta") || !p.contains("init_theta_bar")) {
      throw ConfigError("init_theta and init_theta_bar must be given together");
    }
    Policy init{ParseMatrix(p.at("init_theta"), "init_theta"),
                ParseMatrix(p.at("init_theta_bar"), "init_theta_bar")};
    if (init.theta.rows() != game.d_u || init.theta.cols() != game.d_x ||
        init.theta_bar.rows() != game.d_u ||
        init.theta_bar.cols() != game.d_x) {
      throw ConfigError("initial policy must be d_u x d_x");
    }
    t.init = init;
  }
  if (p.contains("sweep_n")) {
    if (!p.at("sweep_n").is_array()) throw ConfigError("sweep_n must be an array");
    for (const auto& v : p.at("sweep_n")) t.sweep_n.push_back(ParsePlayerCount(v));
  }
  if (t.method != "gd" && t.method != "npg" && t.method != "both") {
    throw ConfigError("method must be gd, npg or both");
  }
  if (t.eta && !(*t.eta > 0.0)) throw ConfigError("eta must be positive");
  if (t.iterations < 0 || t.T < 1 || t.L < 1 || t.rollouts < 1 ||
      t.rollouts_per_perturbation < 1 || !(t.r > 0.0)) {
    throw ConfigError(
        "iterations must be non-negative; T, L, rollouts and r positive");
  }
  return t;
}

}  // namespace

PlayerCount ParsePlayerCount(const json& value) {
  if (value.is_string()) {
    if (value.get<std::string>() == "infinite") return PlayerCount::Infinite();
    throw ConfigError("n must be a positive integer or \"infinite\"");
  }
  if (!value.is_number_integer()) {
    throw ConfigError("n must be a positive integer or \"infinite\"");
  }
  return PlayerCount::Finite(value.get<std::int64_t>());
}

json ToJson(const PlayerCount& n) {
  if (n.is_infinite()) return "infinite";
  return n.value();
}

json ToJson(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

ExperimentConfig ParseConfig(const json& doc) {
  RejectUnknownKeys(doc, {"name", "game", "params", "seed"}, "config");
  if (!doc.contains("game")) throw ConfigError("config has no 'game' record");
  ExperimentConfig c;
  if (doc.contains("name")) c.name = Get<std::string>(doc, "name", "config");
  c.game = ParseGame(doc.at("game"));
  Validate(c.game);  // shape, symmetry and discount errors surface here
  c.params = ParseParams(doc.value("params", json::object()), c.game);
  if (doc.contains("seed")) c.seed = Get<std::uint64_t>(doc, "seed", "config");
  return c;
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return ParseConfig(doc);
}

ExperimentConfig LoadPreset(const std::string& name) {
  const auto& table = internal::PresetTable();
  const auto it = table.find(name);
  if (it == table.end()) {
    std::string known;
    for (const auto& [key, _] : table) known += (known.empty() ? "" : ", ") + key;
    throw ConfigError("unknown preset '" + name + "' (available: " + known + ")");
  }
  return ParseConfig(json::parse(it->second));
}

std::vector<std::string> PresetNames() {
  std::vector<std::string> names;
  for (const auto& [key, _] : internal::PresetTable()) names.push_back(key);
  return names;
}

json ToJson(const ExperimentConfig& c) {
  const GameSpec& s = c.game;
  json game = {{"d_x", s.d_x},          {"d_u", s.d_u},
               {"n", ToJson(s.n)},      {"gamma", s.gamma},
               {"A", ToJson(s.A)},      {"A_bar", ToJson(s.A_bar)},
               {"B", ToJson(s.B)},      {"B_bar", ToJson(s.B_bar)},
               {"Q", ToJson(s.Q)},      {"S_x", ToJson(s.S_x)},
               {"Q_bar", ToJson(s.Q_bar)}, {"R", ToJson(s.R)},
               {"S_u", ToJson(s.S_u)},  {"R_bar", ToJson(s.R_bar)},
               {"init_cov", ToJson(s.init_cov)},
               {"noise_cov", ToJson(s.noise_cov)}};
  json mean = json::array();
  for (Eigen::Index i = 0; i < s.init_mean.size(); ++i) {
    mean.push_back(s.init_mean(i));
  }
  game["init_mean"] = mean;

  const TaskParams& t = c.params;
  json params = {{"method", t.method},
                 {"iterations", t.iterations},
                 {"stop_tol", t.stop_tol},
                 {"T", t.T},
                 {"L", t.L},
                 {"r", t.r},
                 {"rollouts_per_perturbation", t.rollouts_per_perturbation},
                 {"rollouts", t.rollouts},
                 {"learner", t.learner},
                 {"random_learner", t.random_learner}};
  params["eta"] = t.eta ? json(*t.eta) : json("auto");
  if (t.init) {
    params["init_theta"] = ToJson(t.init->theta);
    params["init_theta_bar"] = ToJson(t.init->theta_bar);
  }
  json sweep = json::array();
  for (const auto& n : t.sweep_n) sweep.push_back(ToJson(n));
  params["sweep_n"] = sweep;
  return {{"name", c.name}, {"game", game}, {"params", params}, {"seed", c.seed}};
}

}  // namespace lqdeep
