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

#ifndef LQDEEP_TYPES_H_
#define LQDEEP_TYPES_H_

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace lqdeep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Bad input: malformed configuration, dimension mismatch, out-of-range
// parameter. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine could not produce a trustworthy answer (unstable
// policy, divergence, singular system). Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Number of players. "Infinite" is a distinct value, not a large integer, so
// that the 1/n weights vanish exactly.
class PlayerCount {
 public:
  static PlayerCount Finite(std::int64_t n) {
    if (n < 1) throw ConfigError("player count must be positive");
    return PlayerCount(n);
  }
  static PlayerCount Infinite() { return PlayerCount(std::nullopt); }

  bool is_infinite() const { return !n_.has_value(); }
  std::int64_t value() const {
    if (!n_) throw ConfigError("player count is infinite");
    return *n_;
  }

  // 1/n, exactly zero for the infinite population.
  double Inverse() const { return n_ ? 1.0 / static_cast<double>(*n_) : 0.0; }
  // 1 - 1/n, exactly one for the infinite population.
  double Complement() const {
    return n_ ? 1.0 - 1.0 / static_cast<double>(*n_) : 1.0;
  }

  std::string ToString() const {
    return n_ ? std::to_string(*n_) : std::string("infinite");
  }

  friend bool operator==(const PlayerCount&, const PlayerCount&) = default;

 private:
  explicit PlayerCount(std::optional<std::int64_t> n) : n_(n) {}
  std::optional<std::int64_t> n_;
};

}  // namespace lqdeep

#endif  // LQDEEP_TYPES_H_
