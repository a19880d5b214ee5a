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

#ifndef LQDEEP_LINALG_H_
#define LQDEEP_LINALG_H_

#include "lqdeep/types.h"

namespace lqdeep {

double SpectralRadius(const Matrix& m);
// Largest singular value.
double SpectralNorm(const Matrix& m);
double MinSingularValue(const Matrix& m);
// Smallest eigenvalue of the symmetric part.
double MinEigenvalue(const Matrix& m);
// Ratio of extreme singular values; infinity when singular.
double ConditionNumber(const Matrix& m);

Matrix Symmetrize(const Matrix& m);
bool IsSymmetric(const Matrix& m, double tol);

// Symmetric PSD square root, clipping tiny negative eigenvalues to zero.
Matrix PsdSquareRoot(const Matrix& m);

// Block-diagonal [a 0; 0 b].
Matrix BlockDiagonal(const Matrix& a, const Matrix& b);

struct SteinResult {
  Matrix solution;
  int iterations = 0;
  double residual = 0.0;
};

// Solves X = Q + gamma * Phi^T X Phi for symmetric Q by squaring (Smith
// doubling), then reports the true residual of the affine map. Requires
// rho(sqrt(gamma) * Phi) < 1; throws NumericalError otherwise or when the
// residual does not reach `tol` within `max_iter` doublings.
SteinResult SolveDiscountedStein(const Matrix& phi, const Matrix& q,
                                 double gamma, double tol = 1e-10,
                                 int max_iter = 200);

}  // namespace lqdeep

#endif  // LQDEEP_LINALG_H_
