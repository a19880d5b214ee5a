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

#include "lqdeep/game_model.h"

#include <sstream>

#include "lqdeep/linalg.h"

namespace lqdeep {
namespace {

void CheckShape(const std::string& name, const Matrix& m, int rows, int cols) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream msg;
    msg << name << " has shape " << m.rows() << "x" << m.cols()
        << ", expected " << rows << "x" << cols;
    throw ConfigError(msg.str());
  }
}

void CheckSymmetric(const std::string& name, const Matrix& m) {
  if (!IsSymmetric(m, kSymmetryTolerance)) {
    throw ConfigError(name + " not symmetric");
  }
}

AssumptionReport PsdReport(const std::string& name, const Matrix& m) {
  const double lo = MinEigenvalue(m);
  std::ostringstream detail;
  detail << "min eigenvalue " << lo;
  return {name + " PSD", lo >= -kPsdTolerance, detail.str()};
}

AssumptionReport PdReport(const std::string& name, const Matrix& m) {
  const double lo = MinEigenvalue(m);
  std::ostringstream detail;
  if (lo > kPsdTolerance) {
    detail << "sigma_min = " << MinSingularValue(m);
  } else {
    detail << name << " singular or indefinite: sigma_min = "
           << MinSingularValue(m) << ", min eigenvalue = " << lo;
  }
  return {name + " positive definite", lo > kPsdTolerance, detail.str()};
}

Matrix LiftedCostBlock(const Matrix& own, const Matrix& cross,
                       const Matrix& mean) {
  const auto d = own.rows();
  Matrix out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = own;
  out.topRightCorner(d, d) = own + cross;
  out.bottomLeftCorner(d, d) = own + cross;
  out.bottomRightCorner(d, d) = own + 2.0 * cross + mean;
  return out;
}

}  // namespace

GameSpec GameSpec::Zeros(int d_x, int d_u, PlayerCount n, double gamma) {
  GameSpec s;
  s.d_x = d_x;
  s.d_u = d_u;
  s.n = n;
  s.gamma = gamma;
  s.A = s.A_bar = Matrix::Zero(d_x, d_x);
  s.B = s.B_bar = Matrix::Zero(d_x, d_u);
  s.Q = s.S_x = s.Q_bar = Matrix::Zero(d_x, d_x);
  s.R = s.S_u = s.R_bar = Matrix::Zero(d_u, d_u);
  s.init_mean = Vector::Zero(d_x);
  s.init_cov = s.noise_cov = Matrix::Zero(d_x, d_x);
  return s;
}

std::vector<AssumptionReport> Validate(const GameSpec& s) {
  if (s.d_x < 1 || s.d_u < 1) throw ConfigError("dimensions must be positive");
  if (!(s.gamma > 0.0 && s.gamma < 1.0)) {
    std::ostringstream msg;
    msg << "gamma must lie in (0,1), got " << s.gamma;
    throw ConfigError(msg.str());
  }
  CheckShape("A", s.A, s.d_x, s.d_x);
  CheckShape("A_bar", s.A_bar, s.d_x, s.d_x);
  CheckShape("B", s.B, s.d_x, s.d_u);
  CheckShape("B_bar", s.B_bar, s.d_x, s.d_u);
  CheckShape("Q", s.Q, s.d_x, s.d_x);
  CheckShape("S_x", s.S_x, s.d_x, s.d_x);
  CheckShape("Q_bar", s.Q_bar, s.d_x, s.d_x);
  CheckShape("R", s.R, s.d_u, s.d_u);
  CheckShape("S_u", s.S_u, s.d_u, s.d_u);
  CheckShape("R_bar", s.R_bar, s.d_u, s.d_u);
  CheckShape("init_cov", s.init_cov, s.d_x, s.d_x);
  CheckShape("noise_cov", s.noise_cov, s.d_x, s.d_x);
  if (s.init_mean.size() != s.d_x) {
    throw ConfigError("init_mean has the wrong length");
  }
  for (const auto& [name, m] :
       {std::pair<const char*, const Matrix*>{"Q", &s.Q}, {"S_x", &s.S_x},
        {"Q_bar", &s.Q_bar}, {"R", &s.R}, {"S_u", &s.S_u},
        {"R_bar", &s.R_bar}, {"init_cov", &s.init_cov},
        {"noise_cov", &s.noise_cov}}) {
    CheckSymmetric(name, *m);
  }

  std::vector<AssumptionReport> reports;
  reports.push_back({"dimensions", true, "all shapes consistent"});
  reports.push_back({"symmetry", true, "cost matrices symmetric to 1e-12"});
  reports.push_back(PsdReport("init_cov", s.init_cov));
  reports.push_back(PsdReport("noise_cov", s.noise_cov));

  if (s.n.is_infinite()) {
    reports.push_back(PdReport("Q", s.Q));
    reports.push_back(PdReport("Q+S_x", s.Q + s.S_x));
    reports.push_back(PdReport("R", s.R));
    reports.push_back(PdReport("R+S_u", s.R + s.S_u));
  } else {
    reports.push_back(
        PdReport("Q_blk", LiftedCostBlock(s.Q, s.S_x, s.Q_bar)));
    reports.push_back(
        PdReport("R_blk", LiftedCostBlock(s.R, s.S_u, s.R_bar)));
  }

  const double a = s.n.Complement();
  const double b = s.n.Inverse();
  const Matrix sigma_x =
      BlockDiagonal(a * s.init_cov,
                    b * s.init_cov + s.init_mean * s.init_mean.transpose());
  const double mu = MinSingularValue(sigma_x);
  std::ostringstream detail;
  detail << "sigma_min(sigma_x) = " << mu;
  reports.push_back({"sigma_x positive definite", mu > kPsdTolerance,
                     detail.str()});
  return reports;
}

LiftedModel Lift(const GameSpec& spec) {
  Validate(spec);
  const int du = spec.d_u;
  const double a = spec.n.Complement();
  const double b = spec.n.Inverse();

  LiftedModel m;
  m.spec = spec;
  m.A_blk = BlockDiagonal(spec.A, spec.A + spec.A_bar);
  m.B_blk = BlockDiagonal(spec.B, spec.B + spec.B_bar);
  m.Q_blk = LiftedCostBlock(spec.Q, spec.S_x, spec.Q_bar);
  m.R_blk = LiftedCostBlock(spec.R, spec.S_u, spec.R_bar);

  const Matrix iu = Matrix::Identity(du, du);
  m.P_n.resize(du, 2 * du);
  m.P_n << a * iu, b * iu;
  m.P_tilde_n = BlockDiagonal(a * iu, b * iu);

  m.sigma_x = BlockDiagonal(
      a * spec.init_cov,
      b * spec.init_cov + spec.init_mean * spec.init_mean.transpose());
  m.sigma_w = BlockDiagonal(a * spec.noise_cov, b * spec.noise_cov);
  return m;
}

Vector LiftedVector::Stacked() const {
  Vector out(delta.size() + mean.size());
  out << delta, mean;
  return out;
}

LiftedVector LiftedVector::FromStacked(const Vector& v) {
  const auto d = v.size() / 2;
  return {v.head(d), v.tail(d)};
}

std::pair<LiftedVector, LiftedVector> GaugeTransform(const Matrix& states,
                                                     const Matrix& actions,
                                                     int learner) {
  if (learner < 0 || learner >= states.cols() ||
      states.cols() != actions.cols()) {
    throw ConfigError("learner index out of range or player count mismatch");
  }
  const Vector x_bar = states.rowwise().mean();
  const Vector u_bar = actions.rowwise().mean();
  return {LiftedVector{states.col(learner) - x_bar, x_bar},
          LiftedVector{actions.col(learner) - u_bar, u_bar}};
}

double PerStepCost(const LiftedVector& x, const LiftedVector& u,
                   const LiftedModel& model) {
  const Vector xs = x.Stacked();
  const Vector us = u.Stacked();
  return xs.dot(model.Q_blk * xs) + us.dot(model.R_blk * us);
}

}  // namespace lqdeep
