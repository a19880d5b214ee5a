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

#include "lqdeep/linalg.h"

#include <cmath>
#include <limits>
#include <sstream>

namespace lqdeep {

double SpectralRadius(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double SpectralNorm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double MinSingularValue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  // Wide/tall matrices have min(rows, cols) singular values; a non-square
  // matrix is always rank deficient on its larger side.
  if (m.rows() != m.cols()) return 0.0;
  return s(s.size() - 1);
}

double MinEigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(Symmetrize(m),
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double ConditionNumber(const Matrix& m) {
  const double smin = MinSingularValue(m);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return SpectralNorm(m) / smin;
}

Matrix Symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool IsSymmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

Matrix PsdSquareRoot(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(Symmetrize(m));
  const Vector roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * roots.asDiagonal() *
         solver.eigenvectors().transpose();
}

Matrix BlockDiagonal(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

SteinResult SolveDiscountedStein(const Matrix& phi, const Matrix& q,
                                 double gamma, double tol, int max_iter) {
  const double radius = std::sqrt(gamma) * SpectralRadius(phi);
  if (!(radius < 1.0)) {
    std::ostringstream msg;
    msg << "unstable policy: discounted spectral radius " << radius;
    throw NumericalError(msg.str());
  }

  SteinResult result;
  Matrix sum = q;
  Matrix power = std::sqrt(gamma) * phi;
  const double scale = std::max(1.0, q.norm());
  for (int it = 1; it <= max_iter; ++it) {
    const Matrix increment = power.transpose() * sum * power;
    sum += increment;
    sum = Symmetrize(sum);
    power = power * power;
    result.iterations = it;
    if (increment.norm() <= 1e-17 * scale || power.norm() == 0.0) break;
    if (!sum.allFinite()) throw NumericalError("Stein iteration overflowed");
  }

  // A plain affine-map sweep exposes the residual and polishes rounding.
  Matrix refined = Symmetrize(q + gamma * phi.transpose() * sum * phi);
  result.residual = (refined - sum).norm();
  result.solution = std::move(refined);
  if (!(result.residual <= tol * std::max(1.0, result.solution.norm()))) {
    std::ostringstream msg;
    msg << "no convergence: Stein residual " << result.residual;
    throw NumericalError(msg.str());
  }
  return result;
}

}  // namespace lqdeep
