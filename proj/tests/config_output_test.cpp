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

#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <limits>
#include <random>

#include "lqdeep/config.h"
#include "lqdeep/output.h"
#include "lqdeep/parallel.h"

namespace lqdeep {
namespace {

using nlohmann::json;

TEST(PresetTest, ExamplesExpandToTheirParameterLists) {
  const ExperimentConfig e1 = LoadPreset("example1");
  EXPECT_EQ(e1.game.n, PlayerCount::Finite(100));
  EXPECT_EQ(e1.game.A(0, 0), 0.7);
  EXPECT_EQ(e1.game.B(0, 0), 0.4);
  EXPECT_EQ(e1.game.S_x(0, 0), 4.0);
  EXPECT_EQ(e1.game.R_bar(0, 0), 0.0);
  EXPECT_EQ(e1.game.noise_cov(0, 0), 0.4);
  EXPECT_EQ(e1.game.gamma, 0.9);
  EXPECT_EQ(e1.game.init_mean(0), 1.0);
  EXPECT_EQ(*e1.params.eta, 0.1);

  const ExperimentConfig e2 = LoadPreset("example2");
  EXPECT_EQ(e2.game.A(0, 0), 1.0);
  EXPECT_EQ(e2.game.B(0, 0), 0.5);
  EXPECT_EQ(e2.game.Q_bar(0, 0), 1.0);
  EXPECT_EQ(e2.game.init_cov(0, 0), 0.05);
  EXPECT_EQ(e2.game.noise_cov(0, 0), 0.01);
  EXPECT_EQ(e2.params.L, 1500);
  EXPECT_EQ(e2.params.T, 10);
  EXPECT_EQ(e2.params.r, 0.09);
  EXPECT_EQ(e2.params.iterations, 6000);
  EXPECT_EQ(*e2.params.eta, 0.04);

  const ExperimentConfig e3 = LoadPreset("example3");
  EXPECT_EQ(e3.game.A(0, 0), 0.8);
  EXPECT_EQ(e3.game.B(0, 0), 0.2);
  EXPECT_EQ(e3.game.Q_bar(0, 0), 4.0);
  EXPECT_EQ(e3.params.sweep_n.size(), 5u);

  EXPECT_EQ(PresetNames().size(), 3u);
  EXPECT_THROW(LoadPreset("example9"), ConfigError);
}

TEST(ConfigTest, JsonRoundTrip) {
  for (const std::string& name : PresetNames()) {
    const ExperimentConfig c = LoadPreset(name);
    const json doc = ToJson(c);
    const ExperimentConfig back = ParseConfig(doc);
    EXPECT_EQ(ToJson(back), doc) << name;
  }
}

TEST(ConfigTest, InfinitePlayerCountAndAutoStep) {
  json doc = ToJson(LoadPreset("example3"));
  doc["game"]["n"] = "infinite";
  doc["params"]["eta"] = "auto";
  const ExperimentConfig c = ParseConfig(doc);
  EXPECT_TRUE(c.game.n.is_infinite());
  EXPECT_FALSE(c.params.eta.has_value());
  EXPECT_EQ(ParsePlayerCount(json("infinite")), PlayerCount::Infinite());
  EXPECT_EQ(ParsePlayerCount(json(7)), PlayerCount::Finite(7));
  EXPECT_THROW(ParsePlayerCount(json(0)), ConfigError);
  EXPECT_THROW(ParsePlayerCount(json("many")), ConfigError);
}

TEST(ConfigTest, RejectsMalformedDocuments) {
  const json base = ToJson(LoadPreset("example2"));
  json doc = base;
  doc["game"]["Qbar"] = json::array({json::array({1.0})});
  EXPECT_THROW(ParseConfig(doc), ConfigError);
  doc = base;
  doc["game"]["A"] = json::array({json::array({1.0, 2.0})});
  EXPECT_THROW(ParseConfig(doc), ConfigError);
  doc = base;
  doc["game"]["Q"] = json::array({json::array({-1.0, 0.0}), json::array({1.0, 1.0})});
  EXPECT_THROW(ParseConfig(doc), ConfigError);
  doc = base;
  doc["params"]["method"] = "newton";
  EXPECT_THROW(ParseConfig(doc), ConfigError);
  doc = base;
  doc["params"]["eta"] = "fast";
  EXPECT_THROW(ParseConfig(doc), ConfigError);
  doc = base;
  doc["params"]["eta"] = -0.1;
  EXPECT_THROW(ParseConfig(doc), ConfigError);
  doc = base;
  doc.erase("game");
  EXPECT_THROW(ParseConfig(doc), ConfigError);
  EXPECT_THROW(LoadConfigFile("/nonexistent/config.json"), ConfigError);
}

TEST(FormatDoubleTest, RoundTripsExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = i % 2 ? U(rng) : U(rng) * 1e-12;
    const std::string s = FormatDouble(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v);
  }
  EXPECT_EQ(FormatDouble(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(FormatDouble(std::nan("")), "nan");
  EXPECT_EQ(FormatDouble(0.1), "0.1");
}

TEST(CsvTest, EscapingAndColumns) {
  EXPECT_EQ(CsvEscape("plain"), "plain");
  EXPECT_EQ(CsvEscape("a,b"), "\"a,b\"");
  EXPECT_EQ(CsvEscape("say \"hi\""), "\"say \"\"hi\"\"\"");
  const auto cols = GainColumns("theta", 2, 1);
  ASSERT_EQ(cols.size(), 2u);
  EXPECT_EQ(cols[0], "theta_0_0");
  EXPECT_EQ(cols[1], "theta_1_0");
  CsvTable t;
  t.header = {"a", "b"};
  EXPECT_THROW(t.AddRow({"1"}), std::exception);
}

TEST(ParallelTest, HonorsThreadVariable) {
  setenv(kThreadCountVariable, "3", 1);
  EXPECT_EQ(WorkerCount(), 3);
  setenv(kThreadCountVariable, "zero", 1);
  EXPECT_THROW(WorkerCount(), ConfigError);
  unsetenv(kThreadCountVariable);
  EXPECT_GE(WorkerCount(), 1);

  setenv(kThreadCountVariable, "4", 1);
  std::vector<int> hits(1000, 0);
  ParallelFor(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(ParallelFor(10,
                           [](std::size_t i) {
                             if (i == 7) throw NumericalError("boom");
                           }),
               NumericalError);
  unsetenv(kThreadCountVariable);
}

}  // namespace
}  // namespace lqdeep
